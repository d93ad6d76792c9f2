import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gnarx.design import ModelOrder, ParameterVector, SeriesData, assemble_coefficients
from gnarx.errors import UnsupportedDataError, ValidationError
from gnarx.estimator import fit
from gnarx.experiments import BENCHMARK_ORDER, benchmark_params, simulate_benchmark
from gnarx.forecaster import (
    ScenarioPath,
    comparator_reports,
    fit_ar_baseline,
    fit_var_baseline,
    forecast_one_step,
    forecast_scenario,
    iterate_forecast,
    linear_path,
    naive_forecast,
    rolling_evaluation,
    write_forecast_csv,
    write_msfe_table,
)
from gnarx.network import Network, five_net, from_edges
from gnarx.stochastic import simulate

NET = five_net()


def test_zero_parameters_forecast_zero():
    data = simulate_benchmark(30, np.random.default_rng(0))
    g = np.zeros(8)
    out = iterate_forecast(BENCHMARK_ORDER, g, NET, data, np.ones((1, 5, 3)), 3)
    assert not out.any()


def test_scalar_ar_forecast():
    net = Network(("uk",), np.zeros((1, 1)))
    data = SeriesData.from_arrays(np.array([[10.0, 50.0]]))
    out = iterate_forecast(ModelOrder(1, (0,)), np.array([0.9]), net, data, None, 1)
    assert out[0, 0] == pytest.approx(45.0)


def test_one_step_matches_phi_times_history():
    nodes = ["UK", "US", "DE", "FR"]
    net = from_edges(nodes, [("UK", "US", 3.0), ("UK", "DE", 1.0), ("US", "UK"), ("DE", "FR"), ("FR", "UK")])
    order = ModelOrder(1, (1,), (), "local")
    params = ParameterVector(order, np.array([[0.90, 0.85, 0.7, 0.6]]), (np.array([0.07]),))
    y_t = np.array([52.0, 48.0, 55.0, 47.0])
    data = SeriesData.from_arrays(np.column_stack([np.zeros(4), y_t]))
    (phi,), _ = assemble_coefficients(order, params, net)
    out = iterate_forecast(order, params.to_gamma(), net, data, None, 1)[:, 0]
    np.testing.assert_allclose(out, phi @ y_t, atol=1e-12)
    assert out[0] == pytest.approx(0.90 * 52 + 0.07 * (0.75 * 48 + 0.25 * 55))


def test_rolling_one_point_window_equals_one_step():
    data = simulate_benchmark(80, np.random.default_rng(1))
    rep = rolling_evaluation(BENCHMARK_ORDER, NET, data, 60, 61)
    res = fit(BENCHMARK_ORDER, NET, data.head(60), covariances=False)
    direct = forecast_one_step(res, NET, data.head(60), data.x[:, :, 60])
    np.testing.assert_allclose(rep.point[:, 0], direct, atol=1e-12)


def test_rolling_window_validation():
    data = simulate_benchmark(40, np.random.default_rng(1))
    with pytest.raises(ValidationError):
        rolling_evaluation(BENCHMARK_ORDER, NET, data, 40)


def test_refit_and_in_sample_modes():
    data = simulate_benchmark(90, np.random.default_rng(2))
    fixed = rolling_evaluation(BENCHMARK_ORDER, NET, data, 70)
    refit = rolling_evaluation(BENCHMARK_ORDER, NET, data, 70, refit=True)
    ins = rolling_evaluation(BENCHMARK_ORDER, NET, data, 70, mode="in_sample")
    np.testing.assert_allclose(refit.point[:, 0], fixed.point[:, 0], atol=1e-12)
    assert not np.allclose(refit.point, fixed.point)
    assert not np.allclose(ins.point, fixed.point)


def _ar_panel(rho, N=5, T=600, seed=3):
    rng = np.random.default_rng(seed)
    y = np.zeros((N, T))
    for t in range(1, T):
        y[:, t] = rho * y[:, t - 1] + rng.standard_normal(N)
    return SeriesData.from_arrays(y)


def test_persistent_process_naive_close_to_model():
    data = _ar_panel(0.99)
    order = ModelOrder(1, (0,), (), "local")
    model = rolling_evaluation(order, NET, data, 300)
    naive = comparator_reports(data, 300)[-1]
    assert naive.model == "Naive forecast"
    assert naive.msfe == pytest.approx(model.msfe, rel=0.05)


def test_white_noise_msfe_is_noise_variance():
    data = _ar_panel(0.0, T=1000)
    rep = rolling_evaluation(ModelOrder(1, (0,)), NET, data, 500)
    assert rep.msfe == pytest.approx(1.0, rel=0.10)


def test_msfe_definitions():
    data = _ar_panel(0.5, T=200)
    rep = rolling_evaluation(ModelOrder(1, (0,)), NET, data, 150)
    e = ((rep.point - rep.realized) ** 2).ravel()
    assert rep.msfe == pytest.approx(e.mean())
    assert rep.msfe_se == pytest.approx(e.std(ddof=1) / np.sqrt(e.size))


def test_naive_on_constant_series():
    data = SeriesData.from_arrays(np.full((2, 10), 3.0))
    assert not (naive_forecast(data, np.arange(1, 10)) - 3.0).any()


def test_ar_baseline_equals_local_gnar_without_network():
    data = _ar_panel(0.6, T=300)
    ar = fit_ar_baseline(data, 1)
    res = fit(ModelOrder(1, (0,), (), "local"), NET, data, covariances=False)
    np.testing.assert_allclose(ar.coef[:, 0], res.gamma_ols, atol=1e-10)


def test_var_parameter_count_and_balance():
    data = _ar_panel(0.3, N=12, T=200)
    assert fit_var_baseline(data, 2).n_params == 288
    y_obs = data.y_obs.copy()
    y_obs[0, :10] = False
    with pytest.raises(UnsupportedDataError):
        fit_var_baseline(SeriesData(data.y, y_obs, data.x, data.x_obs, data.nodes), 2)


def test_comparators_skip_unbalanced_nodes():
    data = _ar_panel(0.3, N=5, T=200)
    y_obs = data.y_obs.copy()
    y_obs[4, :20] = False
    data = SeriesData(data.y, y_obs, data.x, data.x_obs, data.nodes)
    reports = comparator_reports(data, 150)
    assert reports[0].model == "VAR" and len(reports[0].nodes) == 4
    assert [r.model for r in reports[1:]] == ["AR", "Naive forecast"]


def test_forecast_decays_for_stationary_model():
    params = benchmark_params()
    order = ModelOrder(1, (1,), (), "local")
    p0 = ParameterVector(order, params.alphas, params.betas)
    data = simulate(order, p0, NET, 50, rng=4)
    out = iterate_forecast(order, p0.to_gamma(), NET, data, None, 40)
    norms = np.abs(out).max(axis=0)
    assert np.all(np.diff(norms) <= 1e-12)
    assert norms[-1] < 0.05 * norms[0]


@settings(max_examples=25)
@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 1000))
def test_scenario_forecasts_are_affine(a, b, seed):
    rng = np.random.default_rng(seed)
    data = simulate_benchmark(60, rng)
    res = fit(BENCHMARK_ORDER, NET, data, covariances=False)
    p1, p2 = rng.standard_normal((2, 1, 5, 6))
    f = lambda x: forecast_scenario(res, NET, data, x, 6)
    lhs = f(a * p1 + b * p2)
    rhs = a * f(p1) + b * f(p2) - (a + b - 1) * f(np.zeros_like(p1))
    np.testing.assert_allclose(lhs, rhs, atol=1e-8)


def test_zero_path_on_exogenous_free_model():
    order = ModelOrder(1, (1,), (), "local")
    data = simulate(order, ParameterVector(order, np.full((1, 5), 0.3), (np.array([0.2]),)), NET, 40, rng=5)
    res = fit(order, NET, data, covariances=False)
    np.testing.assert_array_equal(forecast_scenario(res, NET, data, np.zeros((0, 5, 6)), 6),
                                  iterate_forecast(order, res.gamma, NET, data, None, 6))


def test_linear_paths():
    easing = linear_path(67.9, 0.0, 6)
    tightening = linear_path(67.9, 100.0, 6)
    assert easing[-1] == 0.0 and tightening[-1] == 100.0
    np.testing.assert_allclose(np.diff(easing), -67.9 / 6)
    np.testing.assert_allclose(tightening[0], 67.9 + 32.1 / 6)


def test_scenario_regressors_and_differencing():
    sc = ScenarioPath("easing", {"stringency": {"UK": linear_path(67.9, 0.0, 6).tolist()}})
    x = sc.future_regressors(["stringency"], ["UK", "US"], 6, [[67.9, 40.0]], [True])
    np.testing.assert_allclose(x[0, 0], -67.9 / 6)
    np.testing.assert_array_equal(x[0, 1], 0.0)
    levels = sc.future_regressors(["stringency"], ["UK", "US"], 6, [[67.9, 40.0]], [False])
    np.testing.assert_array_equal(levels[0, 1], 40.0)
    with pytest.raises(ValidationError):
        sc.future_regressors(["stringency"], ["UK", "US"], 7, [[67.9, 40.0]], [True])
    with pytest.raises(ValidationError):
        sc.future_regressors(["other"], ["UK", "US"], 6, [[1.0, 1.0]], [True])
    assert ScenarioPath.from_dict(sc.to_dict()).to_dict() == sc.to_dict()


def test_short_scenario_rejected():
    data = simulate_benchmark(40, np.random.default_rng(6))
    res = fit(BENCHMARK_ORDER, NET, data, covariances=False)
    with pytest.raises(ValidationError):
        forecast_scenario(res, NET, data, np.zeros((1, 5, 3)), 6)


def test_output_files(tmp_path):
    data = simulate_benchmark(60, np.random.default_rng(7))
    rep = rolling_evaluation(BENCHMARK_ORDER, NET, data, 50)
    rep.to_csv(tmp_path / "f.csv")
    lines = (tmp_path / "f.csv").read_text().splitlines()
    assert lines[0] == "node,date,point,lo95,hi95,realized"
    assert len(lines) == 1 + 5 * 10
    write_msfe_table(tmp_path / "m.csv", [rep] + comparator_reports(data, 50))
    rows = (tmp_path / "m.csv").read_text().splitlines()
    assert rows[0] == "model,order,parameters,msfe,se"
    assert len(rows) == 5
    write_forecast_csv(tmp_path / "g.csv", ("a",), rep.times[:1], np.ones((1, 1)))
    assert (tmp_path / "g.csv").read_text().splitlines()[1].endswith(",1,,,")
