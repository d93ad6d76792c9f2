"""Command-line front end.

Every command reads a JSON run configuration, writes its results into the
output directory together with ``manifest.json``, and exits with code 2, 3
or 4 on configuration, data or numerical failures.  A manifest can be passed
back as ``--config`` to repeat the run.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .design import ModelOrder, SeriesData, check_stationarity
from .errors import ConfigurationError, GnarxError
from .estimator import fit, fitted_values
from .forecaster import (
    ScenarioPath,
    comparator_reports,
    forecast_scenario,
    rolling_evaluation,
    write_forecast_csv,
    write_msfe_table,
)
from .midas import (
    MidasSpec,
    MonthlyForecast,
    QuarterStamp,
    align_midas,
    fit_midas,
    load_quarterly_csv,
    project_gdp,
    write_projection_csv,
)
from .network import (
    Network,
    build_fully_connected,
    build_nearest_neighbour,
    five_net,
    load_edges_csv,
    load_exports_csv,
)
from .panel import CalendarStamp, Panel, difference, format_float, load_panel_csv, zero_fill_before
from .selector import SearchSpace, bic, select_global, select_stagewise
from .stochastic import bootstrap_intervals

MANIFEST_FORMAT = "gnarx-manifest/1"
FORMATS = {
    "panel_csv": 1,
    "forecast_csv": 1,
    "msfe_csv": 1,
    "trace_csv": 1,
    "order_json": 1,
    "projection_csv": 1,
}
COMMANDS = ("select", "fit", "evaluate", "forecast", "bootstrap", "simstudy", "midas")
_PATH_KEYS = ("panel", "quarterly", "order_file")


# configuration ----------------------------------------------------------------


@dataclass
class ExogSpec:
    name: str
    path: Path
    difference: bool = False
    zero_before: CalendarStamp | None = None


@dataclass
class RunConfig:
    """Validated run configuration; paths are absolute."""

    raw: dict
    panel: Path | None = None
    nodes: list[str] | None = None
    exog: list[ExogSpec] = field(default_factory=list)
    network: dict = field(default_factory=dict)
    order: ModelOrder | None = None
    search: dict | None = None
    sample_start: CalendarStamp | None = None
    sample_end: CalendarStamp | None = None
    split: CalendarStamp | None = None
    eval_end: CalendarStamp | None = None
    evaluate: dict = field(default_factory=dict)
    standardize: bool = False
    scenarios: list[ScenarioPath] = field(default_factory=list)
    horizon: int = 6
    B: int = 1000
    alpha: float = 0.05
    seed: int = 0
    quarterly: Path | None = None
    midas: dict = field(default_factory=dict)
    simstudy: dict = field(default_factory=dict)


def _month(value, key):
    if value is None:
        return None
    try:
        return CalendarStamp.parse(str(value))
    except GnarxError:
        raise ConfigurationError(f"config field {key!r}: expected YYYY-MM, got {value!r}") from None


def _existing(base: Path, value, key) -> Path:
    if not isinstance(value, str):
        raise ConfigurationError(f"config field {key!r} must be a path")
    p = (base / value).resolve()
    if not p.is_file():
        raise ConfigurationError(f"config field {key!r}: file not found: {p}")
    return p


def absolutize(raw: dict, base: Path) -> dict:
    """Copy of ``raw`` with every file reference made absolute."""
    out = json.loads(json.dumps(raw))

    def fix(v):
        return str((base / v).resolve()) if isinstance(v, str) else v

    for k in _PATH_KEYS:
        if k in out:
            out[k] = fix(out[k])
    for ex in out.get("exog", []) or []:
        if isinstance(ex, dict) and "path" in ex:
            ex["path"] = fix(ex["path"])
    net = out.get("network")
    if isinstance(net, dict):
        for k in ("path", "exports"):
            if k in net:
                net[k] = fix(net[k])
    out["scenarios"] = [fix(s) if isinstance(s, str) else s for s in out.get("scenarios", []) or []]
    return out


def parse_config(raw: dict, base: Path, command: str) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigurationError("configuration must be a JSON object")
    cfg = RunConfig(raw=raw)
    needs_data = command != "simstudy"
    if needs_data:
        if "panel" not in raw:
            raise ConfigurationError("config field 'panel' is required")
        cfg.panel = _existing(base, raw["panel"], "panel")
    cfg.nodes = raw.get("nodes")
    for k, ex in enumerate(raw.get("exog", []) or []):
        if not isinstance(ex, dict) or "name" not in ex or "path" not in ex:
            raise ConfigurationError(f"config field 'exog[{k}]' needs 'name' and 'path'")
        cfg.exog.append(ExogSpec(str(ex["name"]), _existing(base, ex["path"], f"exog[{k}].path"),
                                 bool(ex.get("difference", False)),
                                 _month(ex.get("zero_before"), f"exog[{k}].zero_before")))
    net = raw.get("network", {"kind": "five_net"} if not needs_data else None)
    if needs_data:
        if not isinstance(net, dict) or "kind" not in net:
            raise ConfigurationError("config field 'network' needs a 'kind'")
        kind = net["kind"]
        if kind == "edges":
            net = {**net, "path": _existing(base, net.get("path"), "network.path")}
        elif kind in ("fully_connected", "nearest_neighbour"):
            net = {**net, "exports": _existing(base, net.get("exports"), "network.exports")}
        elif kind != "five_net":
            raise ConfigurationError(f"config field 'network.kind': unknown kind {kind!r}")
    cfg.network = net or {}
    if "order" in raw:
        try:
            cfg.order = ModelOrder.from_dict(raw["order"])
        except (TypeError, KeyError) as exc:
            raise ConfigurationError(f"config field 'order': {exc}") from None
    elif "order_file" in raw:
        path = _existing(base, raw["order_file"], "order_file")
        cfg.order = ModelOrder.from_json(path.read_text())
    cfg.search = raw.get("search")
    sample = raw.get("sample", {}) or {}
    cfg.sample_start = _month(sample.get("start"), "sample.start")
    cfg.sample_end = _month(sample.get("end"), "sample.end")
    cfg.split = _month(raw.get("split"), "split")
    cfg.evaluate = dict(raw.get("evaluate", {}) or {})
    cfg.eval_end = _month(cfg.evaluate.get("end"), "evaluate.end")
    cfg.standardize = bool(raw.get("standardize", False))
    for k, sc in enumerate(raw.get("scenarios", []) or []):
        if isinstance(sc, str):
            cfg.scenarios.append(ScenarioPath.load(_existing(base, sc, f"scenarios[{k}]")))
        elif isinstance(sc, dict):
            cfg.scenarios.append(ScenarioPath.from_dict(sc))
        else:
            raise ConfigurationError(f"config field 'scenarios[{k}]' must be a path or an object")
    labels = [s.label for s in cfg.scenarios]
    if len(set(labels)) != len(labels):
        raise ConfigurationError("scenario labels must be unique")
    for key, kind, default, ok, rule in (
        ("horizon", int, 6, lambda v: v >= 1, ">= 1"),
        ("B", int, 1000, lambda v: v >= 0, ">= 0"),
        ("alpha", float, 0.05, lambda v: 0 < v < 1, "in (0, 1)"),
        ("seed", int, 0, lambda v: v >= 0, ">= 0"),
    ):
        try:
            value = kind(raw.get(key, default))
        except (TypeError, ValueError):
            raise ConfigurationError(f"config field {key!r}: expected a number, got {raw.get(key)!r}") from None
        if not ok(value):
            raise ConfigurationError(f"config field {key!r} must be {rule}, got {value}")
        setattr(cfg, key, value)
    if "quarterly" in raw:
        cfg.quarterly = _existing(base, raw["quarterly"], "quarterly")
    cfg.midas = dict(raw.get("midas", {}) or {})
    cfg.simstudy = dict(raw.get("simstudy", {}) or {})
    return cfg


# data assembly ----------------------------------------------------------------


@dataclass
class Inputs:
    panel: Panel
    data: SeriesData
    net: Network
    levels: np.ndarray
    differenced: list[bool]
    names: list[str]
    mean: np.ndarray
    sd: np.ndarray

    def unscale(self, values: np.ndarray) -> np.ndarray:
        """Map target values (N x ...) back to original units."""
        shape = (-1,) + (1,) * (values.ndim - 1)
        return values * self.sd.reshape(shape) + self.mean.reshape(shape)


def _build_network(spec: dict, nodes) -> Network:
    kind = spec["kind"]
    if kind == "five_net":
        net = five_net()
        if tuple(nodes) != net.nodes:
            raise ConfigurationError("five_net network needs nodes named 1..5")
        return net
    if kind == "edges":
        return load_edges_csv(spec["path"], nodes)
    exports, _ = load_exports_csv(spec["exports"], nodes)
    if kind == "fully_connected":
        return build_fully_connected(exports, nodes)
    return build_nearest_neighbour(exports, nodes, allow_ties=bool(spec.get("allow_ties", False)))


def load_inputs(cfg: RunConfig) -> Inputs:
    panel = load_panel_csv(cfg.panel, cfg.nodes)
    if cfg.sample_start or cfg.sample_end:
        panel = panel.window(cfg.sample_start, cfg.sample_end)
    exog, levels = [], []
    for ex in cfg.exog:
        p = load_panel_csv(ex.path, list(panel.nodes))
        if ex.zero_before is not None:
            p = zero_fill_before(p, ex.zero_before)
        lv = p.reindex(panel.times)
        levels.append(lv.filled[:, -1])
        exog.append(difference(p) if ex.difference else p)
    mean, sd = np.zeros(panel.N), np.ones(panel.N)
    if cfg.standardize:
        ref = panel if cfg.split is None else panel.window(None, cfg.split)
        for i in range(panel.N):
            x = ref.values[i, ref.observed[i]]
            if x.size < 2 or not x.std(ddof=1) > 0:
                raise ConfigurationError(f"cannot standardise node {panel.nodes[i]!r}")
            mean[i], sd[i] = x.mean(), x.std(ddof=1)
        panel = panel.with_values((panel.filled - mean[:, None]) / sd[:, None])
    data = SeriesData.from_panels(panel, exog)
    net = _build_network(cfg.network, panel.nodes)
    return Inputs(panel, data, net, np.array(levels).reshape(len(exog), panel.N),
                  [ex.difference for ex in cfg.exog], [ex.name for ex in cfg.exog], mean, sd)


def _split_index(cfg: RunConfig, inp: Inputs, required: bool) -> int:
    if cfg.split is None:
        if required:
            raise ConfigurationError("config field 'split' is required for this command")
        return inp.data.T
    return inp.panel.time_index(cfg.split) + 1


def _need_order(cfg: RunConfig) -> ModelOrder:
    if cfg.order is None:
        raise ConfigurationError("config needs 'order' or 'order_file'")
    return cfg.order


def _search_space(search: dict) -> tuple[SearchSpace, dict]:
    search = dict(search or {})
    opts = {k: search.pop(k) for k in ("method", "criterion", "penalty", "fit_end") if k in search}
    try:
        return SearchSpace(**search), opts
    except TypeError as exc:
        raise ConfigurationError(f"config field 'search': {exc}") from None


# output helpers -----------------------------------------------------------------


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _slug(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", label).strip("_") or "scenario"


def _scenarios(cfg: RunConfig) -> list[ScenarioPath]:
    return cfg.scenarios or [ScenarioPath("baseline")]


def _future_x(sc: ScenarioPath, inp: Inputs, horizon: int) -> np.ndarray:
    return sc.future_regressors(inp.names, inp.data.nodes, horizon, inp.levels, inp.differenced)


# commands -----------------------------------------------------------------------


def cmd_select(cfg: RunConfig, out: Path, threads: int) -> list[str]:
    inp = load_inputs(cfg)
    data = inp.data.head(_split_index(cfg, inp, False))
    space, opts = _search_space(cfg.search)
    method = opts.get("method", "stagewise")
    if method not in ("stagewise", "global"):
        raise ConfigurationError(f"config field 'search.method': unknown method {method!r}")
    fit_end = opts.get("fit_end")
    if fit_end is not None:
        fit_end = inp.panel.time_index(_month(fit_end, "search.fit_end")) + 1
    select = select_stagewise if method == "stagewise" else select_global
    trace = select(space, data, inp.net, criterion=opts.get("criterion", "bic"), fit_end=fit_end,
                   threads=threads, penalty=opts.get("penalty", "cells"))
    trace.to_csv(out / "selection_trace.csv")
    (out / "selected_order.json").write_text(trace.winner.order.to_json() + "\n")
    return ["selection_trace.csv", "selected_order.json"]


def cmd_fit(cfg: RunConfig, out: Path, threads: int) -> list[str]:
    inp = load_inputs(cfg)
    order = _need_order(cfg)
    data = inp.data.head(_split_index(cfg, inp, False))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        res = fit(order, inp.net, data)
        criterion = bic(res)
    report = res.to_dict()
    st = check_stationarity(order, res.params, data.N)
    report.update({"bic": criterion, "stationarity": st.status, "stationarity_margins": st.margins.tolist(),
                   "hc2_excluded": res.hc2_excluded})
    _write_json(out / "fit.json", report)
    fitted = fitted_values(res, inp.net, data)
    cols = np.arange(res.start, data.T)
    write_forecast_csv(out / "fitted.csv", data.nodes, data.times[res.start:], inp.unscale(fitted),
                       inp.unscale(data.y[:, cols]), data.y_obs[:, cols])
    return ["fit.json", "fitted.csv"]


def cmd_evaluate(cfg: RunConfig, out: Path, threads: int) -> list[str]:
    inp = load_inputs(cfg)
    order = _need_order(cfg)
    split = _split_index(cfg, inp, True)
    end = inp.data.T if cfg.eval_end is None else inp.panel.time_index(cfg.eval_end) + 1
    ev = cfg.evaluate
    data = inp.data
    if cfg.standardize:
        data = SeriesData(inp.unscale(data.y), data.y_obs, data.x, data.x_obs, data.nodes, data.times)
    gnar = rolling_evaluation(order, inp.net, inp.data, split, end, refit=bool(ev.get("refit", False)),
                              mode=ev.get("mode", "out_of_sample"))
    gnar.point = inp.unscale(gnar.point)
    gnar.realized = data.y[:, split:end]
    reports = [gnar] + comparator_reports(data, split, end, var_p=int(ev.get("var_p", 2)),
                                          ar_p=int(ev.get("ar_p", 1)),
                                          var_intercept=bool(ev.get("var_intercept", False)))
    write_msfe_table(out / "msfe_table.csv", reports)
    gnar.to_csv(out / "evaluation_forecasts.csv")
    return ["msfe_table.csv", "evaluation_forecasts.csv"]


def _interval_run(cfg, inp, res, sc, seed, threads):
    fx = _future_x(sc, inp, cfg.horizon)
    point = forecast_scenario(res, inp.net, inp.data, fx, cfg.horizon)
    rep = None
    if cfg.B > 0:
        rep = bootstrap_intervals(res.order, inp.net, inp.data, fx, cfg.horizon, cfg.B, cfg.alpha, seed,
                                  threads, fitted=res)
    return point, rep


def cmd_forecast(cfg: RunConfig, out: Path, threads: int) -> list[str]:
    inp = load_inputs(cfg)
    res = fit(_need_order(cfg), inp.net, inp.data, covariances=False)
    times = tuple(inp.panel.times[-1].shift(k) for k in range(1, cfg.horizon + 1))
    files = []
    for sc in _scenarios(cfg):
        point, rep = _interval_run(cfg, inp, res, sc, cfg.seed, threads)
        lo = hi = None
        if rep is not None:
            lo, hi = inp.unscale(rep.lower), inp.unscale(rep.upper)
        name = f"forecast_{_slug(sc.label)}.csv"
        write_forecast_csv(out / name, inp.data.nodes, times, inp.unscale(point), lower=lo, upper=hi)
        files.append(name)
    return files


def cmd_bootstrap(cfg: RunConfig, out: Path, threads: int) -> list[str]:
    inp = load_inputs(cfg)
    if cfg.B < 1:
        raise ConfigurationError("config field 'B' must be positive for bootstrap")
    res = fit(_need_order(cfg), inp.net, inp.data, covariances=False)
    _, rep = _interval_run(cfg, inp, res, _scenarios(cfg)[0], cfg.seed, threads)
    write_forecast_csv(out / "bootstrap_intervals.csv", rep.nodes, rep.times, inp.unscale(rep.point),
                       lower=inp.unscale(rep.lower), upper=inp.unscale(rep.upper))
    _write_json(out / "bootstrap_summary.json", {"B": rep.B, "dropped": rep.dropped, "alpha": cfg.alpha})
    return ["bootstrap_intervals.csv", "bootstrap_summary.json"]


def cmd_simstudy(cfg: RunConfig, out: Path, threads: int) -> list[str]:
    from . import experiments as ex

    study = dict(cfg.simstudy)
    kind = study.pop("kind", "selection")
    seed = cfg.seed
    path = out / "simstudy.csv"
    if kind == "selection":
        T, n = int(study.get("T", 128)), int(study.get("n_reps", 1000))
        method = study.get("method", "global")
        space = None
        if "search" in study:
            space, _ = _search_space(study["search"])
        res = ex.selection_study(T, n, seed, method, space, threads, penalty=study.get("penalty", "cells"))
        rows = sorted(res.counts.items(), key=lambda kv: (-kv[1], kv[0].sort_key()))
        lines = ["order,count,share"] + [f"{o.label()},{c},{format_float(c / n)}" for o, c in rows]
    elif kind == "estimator":
        T, n = int(study.get("T", 512)), int(study.get("n_reps", 500))
        est, se = ex.estimator_study(T, n, seed, threads)
        truth = ex.benchmark_params().to_gamma()
        from .design import param_names

        names = param_names(ex.BENCHMARK_ORDER, ex.five_net().nodes)
        cover = np.mean(np.abs(est - truth) <= 3 * se, axis=0)
        lines = ["parameter,truth,mean,mc_sd,mean_se,within_3se"]
        for k, name in enumerate(names):
            lines.append(",".join([name, format_float(truth[k]), format_float(est[:, k].mean()),
                                   format_float(est[:, k].std(ddof=1)), format_float(se[:, k].mean()),
                                   format_float(cover[k])]))
    elif kind == "bootstrap":
        cov = ex.bootstrap_coverage_study(int(study.get("n_outer", 200)), int(study.get("B", 300)),
                                          int(study.get("T", 200)), float(study.get("alpha", 0.05)), seed, threads)
        lines = ["coverage", format_float(cov)]
    elif kind == "forecast":
        lines = ["seed,gnar_msfe,var_msfe,true_msfe,selected"]
        for s in range(int(study.get("n_seeds", 20))):
            r = ex.forecast_comparison(seed + s)
            lines.append(f"{seed + s},{format_float(r.gnar)},{format_float(r.var)},{format_float(r.truth)},"
                         f"{r.selected.key()}")
    else:
        raise ConfigurationError(f"config field 'simstudy.kind': unknown kind {kind!r}")
    path.write_text("\n".join(lines) + "\n")
    return ["simstudy.csv"]


def cmd_midas(cfg: RunConfig, out: Path, threads: int) -> list[str]:
    if cfg.quarterly is None:
        raise ConfigurationError("config field 'quarterly' is required for midas")
    m = dict(cfg.midas)
    node = m.pop("node", None)
    quarters = m.pop("quarters", [])
    spec = MidasSpec.from_dict(m) if m else MidasSpec()
    inp = load_inputs(cfg)
    if node is None:
        if inp.data.N != 1:
            raise ConfigurationError("config field 'midas.node' is required for multi-node panels")
        node = inp.data.nodes[0]
    if node not in inp.data.nodes:
        raise ConfigurationError(f"config field 'midas.node': unknown node {node!r}")
    i = inp.data.nodes.index(node)
    history = {t: float(v) for t, v, o in zip(inp.panel.times, inp.unscale(inp.data.y)[i], inp.data.y_obs[i]) if o}
    gdp = load_quarterly_csv(cfg.quarterly)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        rows = align_midas(history, gdp, spec)
    bridge = fit_midas(rows, spec)
    _write_json(out / "midas_fit.json", bridge.to_dict())
    try:
        qs = [QuarterStamp.parse(q) for q in quarters]
    except GnarxError as exc:
        raise ConfigurationError(f"config field 'midas.quarters': {exc}") from None
    files = ["midas_fit.json"]
    if qs:
        if cfg.B < 1:
            raise ConfigurationError("config field 'B' must be positive to project quarters")
        res = fit(_need_order(cfg), inp.net, inp.data, covariances=False)
        projections = []
        for sc in _scenarios(cfg):
            _, rep = _interval_run(cfg, inp, res, sc, cfg.seed, threads)
            fc = MonthlyForecast(rep.times, inp.unscale(rep.point)[i],
                                 rep.replicate_paths[:, i, :] * inp.sd[i] + inp.mean[i])
            projections.append(project_gdp(bridge, history, fc, qs, cfg.seed, sc.label, cfg.alpha))
        write_projection_csv(projections, out / "gdp_projection.csv")
        files.append("gdp_projection.csv")
    return files


HANDLERS = {
    "select": cmd_select,
    "fit": cmd_fit,
    "evaluate": cmd_evaluate,
    "forecast": cmd_forecast,
    "bootstrap": cmd_bootstrap,
    "simstudy": cmd_simstudy,
    "midas": cmd_midas,
}


# entry point --------------------------------------------------------------------


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def config_hash(raw: dict) -> str:
    return _sha256(json.dumps(raw, sort_keys=True, separators=(",", ":")).encode())


def load_config_file(path: Path) -> tuple[dict, Path, int | None]:
    """Read a config or a manifest; returns (raw config, base dir, recorded seed)."""
    try:
        obj = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file {path} is not valid JSON: {exc}") from None
    if isinstance(obj, dict) and obj.get("manifest_format") == MANIFEST_FORMAT:
        return obj["config"], Path("/"), obj.get("seed")
    return obj, path.resolve().parent, None


def run(command: str, config_path, out, seed: int | None = None, threads: int = 1) -> list[str]:
    raw, base, recorded_seed = load_config_file(Path(config_path))
    if not isinstance(raw, dict):
        raise ConfigurationError("configuration must be a JSON object")
    resolved = absolutize(raw, base)
    if seed is None:
        seed = recorded_seed
    if seed is not None:
        resolved["seed"] = int(seed)
    cfg = parse_config(resolved, Path("/"), command)
    if threads < 1:
        raise ConfigurationError("--threads must be positive")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    files = HANDLERS[command](cfg, out, threads)
    manifest = {
        "manifest_format": MANIFEST_FORMAT,
        "command": command,
        "config": resolved,
        "config_sha256": config_hash(resolved),
        "seed": cfg.seed,
        "formats": FORMATS,
        "outputs": {f: _sha256((out / f).read_bytes()) for f in sorted(files)},
    }
    _write_json(out / "manifest.json", manifest)
    return files


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gnarx", description="Network autoregression with exogenous regressors.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON run configuration (or a manifest.json to rerun)")
    common.add_argument("--seed", type=int, default=None, help="overrides the seed in the configuration")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--threads", type=int, default=1, help="worker threads for bootstrap and search")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "select": "choose a model order by BIC",
        "fit": "estimate a fixed model order",
        "evaluate": "rolling one-step forecast evaluation against comparators",
        "forecast": "scenario forecasts with bootstrap intervals",
        "bootstrap": "bootstrap prediction intervals",
        "simstudy": "simulation studies on the benchmark process",
        "midas": "bridge monthly forecasts to quarterly growth",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        files = run(args.command, args.config, args.out, args.seed, args.threads)
    except GnarxError as exc:
        print(f"gnarx {args.command}: error: {exc}", file=sys.stderr)
        return exc.exit_code
    for f in files:
        print(Path(args.out) / f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
