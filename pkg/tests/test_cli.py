import json
import shutil

import numpy as np
import pytest

from gnarx.cli import MANIFEST_FORMAT, main, run
from gnarx.experiments import write_demo_inputs
from gnarx.design import ModelOrder


@pytest.fixture(scope="module")
def demo(tmp_path_factory):
    d = tmp_path_factory.mktemp("demo")
    write_demo_inputs(d)
    return d


def _edit(demo, tmp_path, **changes):
    cfg = json.loads((demo / "config.json").read_text())
    for k, v in changes.items():
        if v is None:
            cfg.pop(k, None)
        else:
            cfg[k] = v
    for f in demo.iterdir():
        if f.is_file() and f.name != "config.json":
            shutil.copy(f, tmp_path / f.name)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path


def _numeric_files(out):
    return {f.name: f.read_bytes() for f in sorted(out.iterdir()) if f.name != "manifest.json"}


@pytest.mark.parametrize("command", ["select", "fit", "evaluate", "forecast", "bootstrap", "simstudy", "midas"])
def test_rerun_is_byte_identical(demo, tmp_path, command):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main([command, "--config", str(demo / "config.json"), "--out", str(a)]) == 0
    assert main([command, "--config", str(demo / "config.json"), "--out", str(b)]) == 0
    first = _numeric_files(a)
    assert first and first == _numeric_files(b)
    manifest = json.loads((a / "manifest.json").read_text())
    assert manifest["manifest_format"] == MANIFEST_FORMAT
    assert manifest["command"] == command
    assert set(manifest["outputs"]) == set(first)


def test_manifest_rerun(demo, tmp_path):
    run("forecast", demo / "config.json", tmp_path / "a", seed=11)
    run("forecast", tmp_path / "a" / "manifest.json", tmp_path / "b")
    m = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert m["seed"] == 11
    assert _numeric_files(tmp_path / "a") == _numeric_files(tmp_path / "b")


def test_seed_changes_bootstrap(demo, tmp_path):
    run("bootstrap", demo / "config.json", tmp_path / "a", seed=1)
    run("bootstrap", demo / "config.json", tmp_path / "b", seed=2)
    assert (tmp_path / "a" / "bootstrap_intervals.csv").read_bytes() != (
        tmp_path / "b" / "bootstrap_intervals.csv").read_bytes()


def test_threads_do_not_change_output(demo, tmp_path):
    run("bootstrap", demo / "config.json", tmp_path / "a", threads=1)
    run("bootstrap", demo / "config.json", tmp_path / "b", threads=3)
    assert _numeric_files(tmp_path / "a") == _numeric_files(tmp_path / "b")


def test_select_recovers_simulated_order(demo, tmp_path):
    run("select", demo / "config.json", tmp_path)
    order = ModelOrder.from_dict(json.loads((tmp_path / "selected_order.json").read_text()))
    assert (order.p, order.s, order.p_prime) == (1, (1,), (1,))
    header = (tmp_path / "selection_trace.csv").read_text().splitlines()[0]
    assert header == "order,bic,msfe"


def test_singleton_search_space(demo, tmp_path):
    search = {"method": "global", "p_min": 2, "p_max": 2, "s_max": 0, "p_prime_max": 0, "alpha": "global"}
    cfg = _edit(demo, tmp_path, search=search)
    run("select", cfg, tmp_path / "out")
    order = ModelOrder.from_dict(json.loads((tmp_path / "out" / "selected_order.json").read_text()))
    assert (order.p, order.s, order.p_prime, order.alpha) == (2, (0, 0), (0,), "global")
    assert len((tmp_path / "out" / "selection_trace.csv").read_text().splitlines()) == 2


def test_msfe_table_layout(demo, tmp_path):
    run("evaluate", demo / "config.json", tmp_path)
    lines = (tmp_path / "msfe_table.csv").read_text().splitlines()
    assert lines[0] == "model,order,parameters,msfe,se"
    models = [l.split(",")[0].strip('"') for l in lines[1:]]
    assert models[0].startswith("local-alpha GNARX") and models[1:] == ["VAR", "AR", "Naive forecast"]
    msfe = [float(l.split(",")[-2]) for l in lines[1:]]
    assert msfe[0] < msfe[1]


def test_three_scenarios_three_forecasts(demo, tmp_path):
    files = run("forecast", demo / "config.json", tmp_path)
    assert sorted(files) == ["forecast_constant.csv", "forecast_easing.csv", "forecast_tightening.csv"]
    for f in files:
        lines = (tmp_path / f).read_text().splitlines()
        assert lines[0] == "node,date,point,lo95,hi95,realized"
        assert len(lines) == 1 + 5 * 6
        row = lines[1].split(",")
        assert float(row[3]) <= float(row[2]) <= float(row[4])


def test_midas_outputs(demo, tmp_path):
    run("midas", demo / "config.json", tmp_path)
    fit = json.loads((tmp_path / "midas_fit.json").read_text())
    assert abs(fit["slope"] - 0.5) < 0.05
    rows = (tmp_path / "gdp_projection.csv").read_text().splitlines()
    assert [r.split(",")[1] for r in rows[1:]] == ["tightening", "constant", "easing"]


def test_fit_outputs(demo, tmp_path):
    run("fit", demo / "config.json", tmp_path)
    report = json.loads((tmp_path / "fit.json").read_text())
    assert report["stationarity"] in ("stationary_sufficient", "not_guaranteed")
    assert np.isfinite(report["bic"])


def test_missing_panel_exit_code(demo, tmp_path, capsys):
    cfg = _edit(demo, tmp_path, panel="nowhere.csv")
    assert main(["fit", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "panel" in capsys.readouterr().err


def test_bad_field_exit_code(demo, tmp_path, capsys):
    cfg = _edit(demo, tmp_path, B=-3)
    assert main(["bootstrap", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "'B'" in capsys.readouterr().err


def test_bad_data_exit_code(demo, tmp_path, capsys):
    cfg = _edit(demo, tmp_path)
    text = (tmp_path / "panel.csv").read_text().splitlines()
    text[3] = text[3].rsplit(",", 1)[0] + ",abc"
    (tmp_path / "panel.csv").write_text("\n".join(text) + "\n")
    assert main(["fit", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 3
    assert "error" in capsys.readouterr().err


def test_numerical_failure_exit_code(demo, tmp_path):
    cfg = _edit(demo, tmp_path)
    lines = (tmp_path / "regressor.csv").read_text().splitlines()
    # a constant regressor makes its lag-0 and lag-1 columns identical
    out = [lines[0]] + [l.split(",")[0] + ",1,1,1,1,1" for l in lines[1:]]
    (tmp_path / "regressor.csv").write_text("\n".join(out) + "\n")
    assert main(["fit", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 4


def test_var_intercept_flag(demo, tmp_path):
    cfg = _edit(demo, tmp_path, evaluate={"var_intercept": True})
    run("evaluate", cfg, tmp_path / "o")
    var_row = (tmp_path / "o" / "msfe_table.csv").read_text().splitlines()[2].split(",")
    assert var_row[:3] == ["VAR", "2", "55"]
