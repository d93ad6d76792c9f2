"""Reusable simulation experiments (model-selection consistency, estimator
calibration, bootstrap coverage, forecast comparisons).

These back the ``simstudy`` command, the scripts in ``scripts/`` and the
acceptance tests.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .design import ModelOrder, ParameterVector, SeriesData
from .estimator import fit
from .forecaster import comparator_reports, rolling_evaluation, evaluate_predictor
from .network import Network, five_net, from_edges
from .selector import SearchSpace, select_global, select_stagewise
from .stochastic import RngSpec, bootstrap_intervals, simulate

BENCHMARK_ORDER = ModelOrder(1, (1,), (1,), "local")


def benchmark_params() -> ParameterVector:
    """Local-alpha GNARX(1,[1],1) on the five-node network.

    alpha = (0.4, 0.2, 0.4, 0.2, 0.2), beta_{1,1} = 0.5 and regressor
    coefficients 0.4 (lag 0) and 0.2 (lag 1).
    """
    return ParameterVector(
        BENCHMARK_ORDER,
        np.array([[0.4, 0.2, 0.4, 0.2, 0.2]]),
        (np.array([0.5]),),
        (np.array([0.4, 0.2]),),
    )


def simulate_benchmark(T: int, rng, burn_in: int = 50) -> SeriesData:
    return simulate(BENCHMARK_ORDER, benchmark_params(), five_net(), T, rng=rng, burn_in=burn_in)


def _map(fn, items, threads):
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


@dataclass
class SelectionStudy:
    T: int
    method: str
    counts: Counter
    n: int

    def share(self, order: ModelOrder = BENCHMARK_ORDER) -> float:
        return self.counts[order] / self.n


def selection_study(T: int, n_reps: int, seed: int = 0, method: str = "global", space: SearchSpace | None = None,
                    threads: int = 1, penalty: str = "cells") -> SelectionStudy:
    """How often each order wins the BIC search on simulated benchmark data."""
    net = five_net()
    if space is None:
        space = (SearchSpace(p_max=3, s_max=3, p_prime_max=3, alpha="local") if method == "global"
                 else SearchSpace(p_max=12, s_max=None, p_prime_max=3, alpha="local"))
    root = RngSpec(seed)
    select = select_global if method == "global" else select_stagewise

    def one(rep):
        data = simulate_benchmark(T, root.generator(T, rep))
        return select(space, data, net, penalty=penalty).winner.order

    winners = _map(one, range(n_reps), threads)
    return SelectionStudy(T, method, Counter(winners), n_reps)


def estimator_study(T: int, n_reps: int, seed: int = 0, threads: int = 1):
    """FGLS estimates and asymptotic SEs over replicated benchmark series.

    Returns ``(estimates, ses)``, each of shape (n_reps, M).
    """
    net = five_net()
    root = RngSpec(seed)

    def one(rep):
        data = simulate_benchmark(T, root.generator(T, rep))
        res = fit(BENCHMARK_ORDER, net, data)
        return res.gamma, res.se_asymptotic

    out = _map(one, range(n_reps), threads)
    return np.array([o[0] for o in out]), np.array([o[1] for o in out])


def bootstrap_coverage_study(n_outer: int, B: int, T: int = 200, alpha: float = 0.05, seed: int = 0,
                             threads: int = 1) -> float:
    """Share of realised ``Y_{T+1}`` values inside the one-step bootstrap interval."""
    net = five_net()
    root = RngSpec(seed)

    def one(rep):
        full = simulate_benchmark(T + 1, root.generator(rep))
        data = full.head(T)
        rep_ = bootstrap_intervals(BENCHMARK_ORDER, net, data, full.x[:, :, T:T + 1], h=1, B=B, alpha=alpha,
                                   seed=seed * 1_000_003 + rep)
        y = full.y[:, T]
        return np.mean((rep_.lower[:, 0] <= y) & (y <= rep_.upper[:, 0]))

    return float(np.mean(_map(one, range(n_outer), threads)))


def sparse_network(N: int, out_degree: int = 2, rng=None) -> Network:
    """Directed ring plus random chords: node ``i`` links to ``i+1`` and ``out_degree-1`` others."""
    rng = np.random.default_rng(rng)
    nodes = tuple(f"n{i + 1:02d}" for i in range(N))
    edges = []
    for i in range(N):
        targets = {(i + 1) % N}
        others = [j for j in range(N) if j != i and j not in targets]
        targets |= set(rng.choice(others, size=out_degree - 1, replace=False).tolist())
        edges += [(nodes[i], nodes[j], 1.0) for j in sorted(targets)]
    return from_edges(nodes, edges)


@dataclass
class ComparisonResult:
    gnar: float
    var: float
    truth: float
    selected: ModelOrder


def forecast_comparison(seed: int, N: int = 12, T: int = 240, split: int = 120) -> ComparisonResult:
    """Out-of-sample MSFE of a BIC-selected GNAR, VAR(2) and the true model on synthetic data."""
    rng = RngSpec(seed)
    net = sparse_network(N, rng=rng.generator(0))
    order = ModelOrder(1, (1,), (), "local")
    alphas = rng.generator(1).uniform(0.2, 0.5, size=(1, N))
    params = ParameterVector(order, alphas, (np.array([0.35]),), ())
    data = simulate(order, params, net, T, rng=rng.generator(2))
    space = SearchSpace(p_max=3, s_max=2, p_prime_max=0, alpha="local")
    chosen = select_stagewise(space, data.head(split), net).winner.order
    gnar = rolling_evaluation(chosen, net, data, split)
    var = comparator_reports(data, split, var_p=2)[0]
    gamma = params.to_gamma()
    truth = evaluate_predictor(
        "truth", lambda d, t: np.einsum("tim,m->it", _design(order, net, d, t), gamma), data, split)
    return ComparisonResult(gnar.msfe, var.msfe, truth.msfe, chosen)


def _design(order, net, data, targets):
    from .design import LagFeatures

    return LagFeatures(data, net, np.asarray(targets)).design(order)


def write_demo_inputs(directory, T: int = 160, seed: int = 0) -> dict:
    """Write a complete synthetic input set for the command-line tools.

    Files: benchmark panel, regressor panel, edge list, quarterly growth
    series bridged from node ``1`` and three scenario paths.  Returns the
    configuration (relative paths) that is also saved as ``config.json``.
    """
    import json
    from pathlib import Path

    from .midas import QuarterStamp, QuarterlySeries, save_quarterly_csv
    from .network import save_edges_csv
    from .panel import save_panel_csv
    from .forecaster import linear_path
    from .stochastic import series_panels

    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    rng = RngSpec(seed)
    data = simulate_benchmark(T, rng.generator(0))
    y, (x,) = series_panels(data)
    save_panel_csv(y, d / "panel.csv")
    save_panel_csv(x, d / "regressor.csv")
    save_edges_csv(five_net(), d / "edges.csv")

    first = QuarterStamp.of(y.times[0])
    if y.times[0] != first.month_at_lag(2):
        first = first.shift(1)
    n_q = (y.times[-1].ordinal - first.month_at_lag(2).ordinal) // 3 + 1
    quarters = tuple(first.shift(k) for k in range(n_q))
    col = {t: k for k, t in enumerate(y.times)}
    growth = np.array([0.5 * y.values[0, col[q.month_at_lag(2)]] for q in quarters])
    growth = growth + 0.1 * rng.generator(1).standard_normal(n_q)
    save_quarterly_csv(QuarterlySeries(quarters, growth), d / "gdp.csv")

    last = float(x.values[0, -1])
    names = []
    for label, target in (("tightening", last + 2.0), ("constant", last), ("easing", last - 2.0)):
        path = {"label": label, "paths": {"regressor": {"1": linear_path(last, target, 6).tolist()}}}
        (d / f"scenario_{label}.json").write_text(json.dumps(path, indent=2) + "\n")
        names.append(f"scenario_{label}.json")

    split = y.times[T // 2 - 1]
    config = {
        "panel": "panel.csv",
        "exog": [{"name": "regressor", "path": "regressor.csv"}],
        "network": {"kind": "edges", "path": "edges.csv"},
        "order": BENCHMARK_ORDER.to_dict(),
        "search": {"method": "stagewise", "p_max": 4, "p_prime_max": 2, "alpha": "local"},
        "split": str(split),
        "scenarios": names,
        "horizon": 6,
        "B": 100,
        "alpha": 0.05,
        "seed": seed,
        "quarterly": "gdp.csv",
        "midas": {"node": "1", "quarters": [str(QuarterStamp.of(y.times[-1]).shift(1))]},
        "simstudy": {"kind": "selection", "T": 64, "n_reps": 4},
    }
    (d / "config.json").write_text(json.dumps(config, indent=2) + "\n")
    return config
