"""Point forecasts, rolling evaluation, scenario paths and comparator models."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .design import LagFeatures, ModelOrder, SeriesData, count_parameters
from .errors import (
    DimensionError,
    InsufficientDataError,
    UnsupportedDataError,
    ValidationError,
)
from .estimator import FitResult, fit
from .network import Network
from .panel import CalendarStamp, format_float


def _predict_at(order: ModelOrder, gamma, net: Network, data: SeriesData, targets) -> np.ndarray:
    """One-step predictions for the given target indices, shape (N, n)."""
    feats = LagFeatures(data, net, np.asarray(targets))
    return np.einsum("tim,m->it", feats.design(order), gamma)


def _future(future_x, H: int, N: int, steps: int) -> np.ndarray:
    x = np.asarray(future_x, dtype=float)
    if H == 0:
        return np.zeros((0, N, steps))
    return x.reshape(H, N, -1)


def iterate_forecast(order: ModelOrder, gamma, net: Network, data: SeriesData, future_x=None,
                     steps: int = 1, shocks=None) -> np.ndarray:
    """Iterated forecasts for ``T .. T+steps-1`` feeding predictions back as history.

    ``future_x`` has shape (H, N, steps).  When ``shocks`` (N x steps) are
    given they are added at each step, which turns the forecast into a
    simulated continuation of the series.
    """
    if data.T < order.p_star:
        raise InsufficientDataError(f"need at least {order.p_star} observations to forecast, have {data.T}")
    N, T = data.N, data.T
    if future_x is None:
        if data.H:
            raise ValidationError("future exogenous values are required for a model with regressors")
        future_x = np.zeros((0, N, steps))
    future_x = _future(future_x, data.H, N, steps)
    if future_x.shape[2] < steps:
        raise DimensionError(f"exogenous path covers {future_x.shape[2]} steps, need {steps}")
    ext = data.extend(np.zeros((N, steps)), future_x[:, :, :steps], np.zeros((N, steps), bool))
    out = np.empty((N, steps))
    for s in range(steps):
        t = T + s
        y_hat = _predict_at(order, gamma, net, ext, [t])[:, 0]
        if shocks is not None:
            y_hat = y_hat + shocks[:, s]
        out[:, s] = y_hat
        ext.y[:, t] = y_hat
        ext.y_obs[:, t] = True
    return out


def forecast_one_step(res: FitResult, net: Network, data: SeriesData, x_next=None) -> np.ndarray:
    """``Y_{T+1}`` given data through ``T`` and the regressors at ``T+1``."""
    fx = None if x_next is None else _future(x_next, data.H, data.N, 1)
    return iterate_forecast(res.order, res.gamma, net, data, fx, 1)[:, 0]


@dataclass(eq=False)
class ForecastReport:
    """One-step forecasts against realised values.

    MSFE pools the squared errors of every observed node-month; its SE is
    the sample sd of those squared errors over the square root of their count.
    """

    model: str
    nodes: tuple[str, ...]
    times: tuple[CalendarStamp, ...]
    point: np.ndarray
    realized: np.ndarray
    realized_mask: np.ndarray
    n_params: int | None = None
    order_label: str = "-"
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    @property
    def squared_errors(self) -> np.ndarray:
        return ((self.point - self.realized) ** 2)[self.realized_mask]

    @property
    def msfe(self) -> float:
        e = self.squared_errors
        return float(e.mean()) if e.size else float("nan")

    @property
    def msfe_se(self) -> float:
        e = self.squared_errors
        return float(e.std(ddof=1) / np.sqrt(e.size)) if e.size > 1 else float("nan")

    def to_csv(self, path) -> None:
        write_forecast_csv(path, self.nodes, self.times, self.point, self.realized, self.realized_mask,
                           self.lower, self.upper)


def write_forecast_csv(path, nodes, times, point, realized=None, realized_mask=None, lower=None, upper=None):
    """Rows ``node,date,point,lo95,hi95,realized``; empty cells where unavailable."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", "date", "point", "lo95", "hi95", "realized"])
        for i, node in enumerate(nodes):
            for t, stamp in enumerate(times):
                real = ""
                if realized is not None and (realized_mask is None or realized_mask[i, t]):
                    real = format_float(realized[i, t])
                w.writerow([
                    node,
                    str(stamp),
                    format_float(point[i, t]),
                    "" if lower is None else format_float(lower[i, t]),
                    "" if upper is None else format_float(upper[i, t]),
                    real,
                ])


def _window_times(data: SeriesData, targets) -> tuple:
    if not data.times:
        return tuple(CalendarStamp(2000, 1).shift(int(t)) for t in targets)
    return tuple(data.times[int(t)] for t in targets)


def _report(model, data, targets, point, n_params=None, order_label="-") -> ForecastReport:
    targets = np.asarray(targets)
    return ForecastReport(
        model=model,
        nodes=data.nodes,
        times=_window_times(data, targets),
        point=point,
        realized=data.y[:, targets],
        realized_mask=data.y_obs[:, targets],
        n_params=n_params,
        order_label=order_label,
    )


def rolling_evaluation(order: ModelOrder, net: Network, data: SeriesData, split: int, end: int | None = None,
                       refit: bool = False, mode: str = "out_of_sample", label: str | None = None) -> ForecastReport:
    """Rolling one-step forecasts over targets ``split .. end-1``.

    ``mode="out_of_sample"`` estimates on data before ``split``;
    ``mode="in_sample"`` estimates on the whole series and still forecasts
    each month from earlier observations only.  With ``refit`` the model is
    re-estimated before every forecast (out-of-sample mode only).
    """
    end = data.T if end is None else end
    if not order.p_star <= split < end <= data.T:
        raise ValidationError(f"empty or invalid evaluation window {split}..{end} for T={data.T}")
    targets = np.arange(split, end)
    if mode == "in_sample":
        res = fit(order, net, data, covariances=False)
        point = _predict_at(order, res.gamma, net, data, targets)
    elif mode == "out_of_sample":
        if refit:
            point = np.empty((data.N, len(targets)))
            for k, t in enumerate(targets):
                res = fit(order, net, data.head(int(t)), covariances=False)
                point[:, k] = _predict_at(order, res.gamma, net, data, [t])[:, 0]
        else:
            res = fit(order, net, data.head(split), covariances=False)
            point = _predict_at(order, res.gamma, net, data, targets)
    else:
        raise ValidationError(f"unknown evaluation mode {mode!r}")
    name = label or f"{order.alpha}-alpha {order.label()}"
    return _report(name, data, targets, point, count_parameters(order, data.N), order.label())


# comparators -----------------------------------------------------------------


@dataclass(eq=False)
class VarBaseline:
    """Reduced-form VAR(p) estimated equation by equation."""

    p: int
    coef: np.ndarray
    intercept: np.ndarray | None

    @property
    def n_params(self) -> int:
        return self.coef.size + (0 if self.intercept is None else self.intercept.size)

    def predict(self, data: SeriesData, targets) -> np.ndarray:
        targets = np.asarray(targets)
        Z = np.vstack([data.y[:, targets - k] for k in range(1, self.p + 1)])
        out = self.coef @ Z
        if self.intercept is not None:
            out = out + self.intercept[:, None]
        return out


def fit_var_baseline(data: SeriesData, p: int, intercept: bool = False) -> VarBaseline:
    if not data.y_obs.all():
        raise UnsupportedDataError("VAR comparator requires a balanced panel without missing values")
    if data.T <= p + data.N * p:
        raise InsufficientDataError("too few observations for the VAR comparator")
    targets = np.arange(p, data.T)
    Z = np.vstack([data.y[:, targets - k] for k in range(1, p + 1)])
    if intercept:
        Z = np.vstack([Z, np.ones(len(targets))])
    Y = data.y[:, targets]
    coef, *_ = np.linalg.lstsq(Z.T, Y.T, rcond=None)
    coef = coef.T
    if intercept:
        return VarBaseline(p, coef[:, :-1], coef[:, -1])
    return VarBaseline(p, coef, None)


@dataclass(eq=False)
class ArBaseline:
    """Separate AR(p) per node, no intercept."""

    p: int
    coef: np.ndarray  # (N, p)

    @property
    def n_params(self) -> int:
        return self.coef.size

    def predict(self, data: SeriesData, targets) -> np.ndarray:
        targets = np.asarray(targets)
        out = np.zeros((data.N, len(targets)))
        for k in range(1, self.p + 1):
            out += self.coef[:, k - 1:k] * data.y[:, targets - k]
        return out


def fit_ar_baseline(data: SeriesData, p: int = 1) -> ArBaseline:
    coef = np.zeros((data.N, p))
    targets = np.arange(p, data.T)
    for i in range(data.N):
        X = np.column_stack([data.y[i, targets - k] for k in range(1, p + 1)])
        ok = data.y_obs[i, targets]
        if ok.sum() <= p:
            raise InsufficientDataError(f"node {data.nodes[i]!r} has too few observations for AR({p})")
        coef[i], *_ = np.linalg.lstsq(X[ok], data.y[i, targets][ok], rcond=None)
    return ArBaseline(p, coef)


def naive_forecast(data: SeriesData, targets) -> np.ndarray:
    targets = np.asarray(targets)
    return data.y[:, targets - 1]


def evaluate_predictor(name: str, predict: Callable, data: SeriesData, split: int, end: int | None = None,
                       n_params: int | None = None, order_label: str = "-") -> ForecastReport:
    end = data.T if end is None else end
    if not 1 <= split < end:
        raise ValidationError("empty evaluation window")
    targets = np.arange(split, end)
    return _report(name, data, targets, predict(data, targets), n_params, order_label)


def comparator_reports(data: SeriesData, split: int, end: int | None = None, var_p: int = 2,
                       ar_p: int = 1, var_intercept: bool = False, balanced_nodes=None) -> list[ForecastReport]:
    """VAR, AR and naive comparators evaluated on the same window.

    The VAR is estimated on ``balanced_nodes`` only (defaults to nodes with
    complete histories).
    """
    reports = []
    if balanced_nodes is None:
        balanced_nodes = [i for i in range(data.N) if data.y_obs[i].all()]
    if balanced_nodes:
        idx = list(balanced_nodes)
        sub = SeriesData(data.y[idx], data.y_obs[idx], data.x[:, idx], data.x_obs[:, idx],
                         tuple(data.nodes[i] for i in idx), data.times)
        var = fit_var_baseline(sub.head(split), var_p, var_intercept)
        reports.append(evaluate_predictor("VAR", var.predict, sub, split, end, var.n_params, str(var_p)))
    train = data.head(split)
    ar = fit_ar_baseline(train, ar_p)
    reports.append(evaluate_predictor("AR", ar.predict, data, split, end, ar.n_params, str(ar_p)))
    reports.append(evaluate_predictor("Naive forecast", naive_forecast, data, split, end, None, "-"))
    return reports


def write_msfe_table(path, reports: Sequence[ForecastReport]) -> None:
    """``model,order,parameters,msfe,se`` rows in the order given."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["model", "order", "parameters", "msfe", "se"])
        for r in reports:
            w.writerow([r.model, r.order_label, "-" if r.n_params is None else r.n_params,
                        format_float(r.msfe), format_float(r.msfe_se)])


# scenarios -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ScenarioPath:
    """Future levels of exogenous regressors for selected nodes.

    ``paths[regressor][node]`` is the sequence of levels for the forecast
    months.  Nodes (or regressors) not listed keep their last level.
    """

    label: str
    paths: Mapping[str, Mapping[str, Sequence[float]]] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for reg, by_node in self.paths.items():
            clean[reg] = {}
            lengths = set()
            for node, vals in by_node.items():
                arr = np.asarray(vals, dtype=float).reshape(-1)
                if not np.all(np.isfinite(arr)):
                    raise ValidationError(f"scenario {self.label!r}: non-finite value for {reg}/{node}")
                clean[reg][node] = arr
                lengths.add(arr.size)
            if len(lengths) > 1:
                raise ValidationError(f"scenario {self.label!r}: paths for {reg!r} differ in length")
        object.__setattr__(self, "paths", clean)

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioPath":
        return cls(d.get("label", "scenario"), d.get("paths", {}))

    @classmethod
    def load(cls, path) -> "ScenarioPath":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return {"label": self.label,
                "paths": {r: {n: v.tolist() for n, v in by.items()} for r, by in self.paths.items()}}

    def future_regressors(self, names: Sequence[str], nodes: Sequence[str], horizon: int, last_levels,
                          differenced: Sequence[bool]) -> np.ndarray:
        """Regressor values the model consumes over the horizon, shape (H, N, horizon).

        ``last_levels`` (H x N) holds each regressor's final in-sample level.
        Differenced regressors are differenced against that level.
        """
        H, N = len(names), len(nodes)
        last = np.asarray(last_levels, dtype=float).reshape(H, N)
        unknown = set(self.paths) - set(names)
        if unknown:
            raise ValidationError(f"scenario {self.label!r} names unknown regressors {sorted(unknown)}")
        out = np.empty((H, N, horizon))
        for h, name in enumerate(names):
            levels = np.repeat(last[h][:, None], horizon, axis=1)
            for node, vals in self.paths.get(name, {}).items():
                if node not in nodes:
                    raise ValidationError(f"scenario {self.label!r} names unknown node {node!r}")
                if vals.size < horizon:
                    raise ValidationError(
                        f"scenario {self.label!r} covers {vals.size} months for {name}/{node}, need {horizon}")
                levels[list(nodes).index(node)] = vals[:horizon]
            if differenced[h]:
                out[h] = np.diff(np.concatenate([last[h][:, None], levels], axis=1), axis=1)
            else:
                out[h] = levels
        return out


def linear_path(start: float, end: float, months: int) -> np.ndarray:
    """Linear move from ``start`` (the last observed level) reaching ``end`` after ``months`` steps."""
    return start + (end - start) * np.arange(1, months + 1) / months


def forecast_scenario(res: FitResult, net: Network, data: SeriesData, future_x, horizon: int = 6) -> np.ndarray:
    """Iterated point forecasts (N x horizon) under a given regressor path."""
    future_x = _future(future_x, data.H, data.N, horizon)
    if future_x.shape[2] < horizon:
        raise ValidationError(f"scenario covers {future_x.shape[2]} months, horizon is {horizon}")
    return iterate_forecast(res.order, res.gamma, net, data, future_x, horizon)
