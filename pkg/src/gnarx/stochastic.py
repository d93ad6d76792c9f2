"""Seeded GNARX simulation and forward-bootstrap prediction intervals."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .design import ModelOrder, ParameterVector, SeriesData, assemble_coefficients
from .errors import DivergenceError, NumericalError, SingularityError, ValidationError
from .estimator import FitResult, fit
from .forecaster import iterate_forecast
from .network import Network
from .panel import CalendarStamp, Panel, month_range

DIVERGENCE_LIMIT = 1e100


@dataclass(frozen=True)
class RngSpec:
    """Root seed plus per-replicate stream index.

    Streams are derived with :class:`numpy.random.SeedSequence` spawn keys,
    so replicate ``b`` draws the same numbers whether replicates run
    serially or in parallel.
    """

    seed: int = 0

    def generator(self, *stream: int) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=tuple(stream))))


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngSpec):
        return rng.generator()
    return np.random.default_rng(rng)


def exogenous_contribution(lambdas, x: np.ndarray) -> np.ndarray:
    """``sum_h sum_j lambda_{h,j} X_{h,t-j}`` for every t (values before t=0 taken as zero)."""
    H, N, T = x.shape
    out = np.zeros((N, T))
    for h in range(H):
        for j, lam in enumerate(lambdas[h]):
            if j == 0:
                out += lam * x[h]
            else:
                out[:, j:] += lam * x[h][:, :-j]
    return out


def recurse(phis, y_init: np.ndarray, drive: np.ndarray) -> np.ndarray:
    """Run ``Y_t = sum_k phi_k Y_{t-k} + drive_t`` forward from the columns of ``y_init``.

    ``drive`` has shape (N, n) and its first ``y_init.shape[1]`` columns are
    ignored.
    """
    N, n = drive.shape
    p0 = y_init.shape[1]
    y = np.empty((N, n))
    y[:, :p0] = y_init
    p = len(phis)
    stacked = np.hstack(phis)
    for t in range(p0, n):
        window = y[:, t - p:t][:, ::-1].reshape(-1, order="F") if t >= p else None
        if window is None:
            acc = drive[:, t].copy()
            for k in range(1, min(p, t) + 1):
                acc += phis[k - 1] @ y[:, t - k]
        else:
            acc = stacked @ window + drive[:, t]
        if not np.all(np.abs(acc) < DIVERGENCE_LIMIT):
            raise DivergenceError(f"simulation diverged at step {t}", step=t)
        y[:, t] = acc
    return y


def _noise(noise, rng: np.random.Generator, shape) -> np.ndarray:
    if noise is None:
        return rng.standard_normal(shape)
    if callable(noise):
        return np.asarray(noise(rng, shape), dtype=float)
    sd = np.asarray(noise, dtype=float)
    if sd.ndim == 0:
        return sd * rng.standard_normal(shape)
    return sd.reshape(-1, 1) * rng.standard_normal(shape)


def simulate(order: ModelOrder, params: ParameterVector, net: Network, T: int, exog=None,
             noise: float | np.ndarray | Callable | None = None, rng=None, burn_in: int = 50,
             start: CalendarStamp = CalendarStamp(2000, 1)) -> SeriesData:
    """Simulate ``T`` observations of a GNARX process.

    Parameters
    ----------
    exog : array (H, N, T) or (H, N, T + burn_in), optional
        Regressor values.  When only ``T`` columns are given the burn-in
        period is driven with zero regressors.  When omitted, regressors are
        drawn i.i.d. standard normal.
    noise : None, float, array of per-node sds, or callable ``(rng, shape)``
        Innovation distribution; standard normal by default.
    burn_in : int
        Leading steps discarded, starting from a zero history.
    """
    rng = _as_rng(rng)
    N = net.N
    n = T + burn_in
    if exog is None or order.H == 0:
        x = rng.standard_normal((order.H, N, n))
    else:
        x = np.asarray(exog, dtype=float).reshape(order.H, N, -1)
        if x.shape[2] == T:
            x = np.concatenate([np.zeros((order.H, N, burn_in)), x], axis=2)
        elif x.shape[2] != n:
            raise ValidationError(f"exogenous series length {x.shape[2]} matches neither T nor T + burn_in")
    u = _noise(noise, rng, (N, n))
    phis, _ = assemble_coefficients(order, params, net)
    drive = exogenous_contribution(params.lambdas, x) + u
    y = recurse(phis, np.zeros((N, 0)), drive)
    return SeriesData.from_arrays(
        y[:, burn_in:], x[:, :, burn_in:], nodes=net.nodes, times=month_range(start, T)
    )


def series_panels(data: SeriesData) -> tuple[Panel, list[Panel]]:
    """Target panel and one panel per exogenous regressor."""
    times = data.times or month_range(CalendarStamp(2000, 1), data.T)
    y = Panel(data.nodes, times, data.y, data.y_obs)
    xs = [Panel(data.nodes, times, data.x[h], data.x_obs[h]) for h in range(data.H)]
    return y, xs


@dataclass(eq=False)
class IntervalReport:
    """Bootstrap prediction intervals per node (rows) and horizon (columns)."""

    nodes: tuple[str, ...]
    times: tuple[CalendarStamp, ...]
    point: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    alpha: float
    B: int
    dropped: int
    errors: np.ndarray | None = None

    @property
    def replicate_paths(self) -> np.ndarray:
        """Point forecast plus each bootstrap error, shape (B, N, h)."""
        return self.point[None] + self.errors

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower


def bootstrap_intervals(order: ModelOrder, net: Network, data: SeriesData, future_x=None, h: int = 1,
                        B: int = 1000, alpha: float = 0.05, seed: int = 0, threads: int = 1,
                        fitted: FitResult | None = None, max_drop: float = 0.10) -> IntervalReport:
    """Forward-bootstrap prediction intervals for horizons ``1..h``.

    Each replicate resamples whole residual vectors, restarts the fitted
    process from a random contiguous block of the observed series, re-drives
    it with the observed regressors, re-estimates the model, and compares
    the re-estimated model's forecast with a continuation simulated from the
    original estimates.  Intervals add the empirical error quantiles to the
    original point forecast.
    """
    if B < 1:
        raise ValidationError("B must be at least 1")
    if not 0 < alpha < 1:
        raise ValidationError("alpha must lie in (0, 1)")
    res = fitted if fitted is not None else fit(order, net, data, covariances=False)
    p_star = order.p_star
    T = data.T
    phis, _ = assemble_coefficients(order, res.params, net)
    exo = exogenous_contribution(res.params.lambdas, data.x)
    resid = res.residuals  # N x (T - start)
    n_res = resid.shape[1]
    point = iterate_forecast(order, res.gamma, net, data, future_x, h)
    root = RngSpec(seed)

    def replicate(b: int):
        rng = root.generator(b)
        picks = rng.integers(0, n_res, size=T - p_star)
        future = resid[:, rng.integers(0, n_res, size=h)]
        k = int(rng.integers(0, T - p_star + 1))
        drive = exo.copy()
        drive[:, p_star:] += resid[:, picks]
        y_star = recurse(phis, data.y[:, k:k + p_star], drive)
        boot = SeriesData(y_star, None, data.x, data.x_obs, data.nodes, data.times)
        try:
            refit = fit(order, net, boot, start=res.start, covariances=False)
        except SingularityError:
            return None
        predicted = iterate_forecast(order, refit.gamma, net, data, future_x, h)
        simulated = iterate_forecast(order, res.gamma, net, data, future_x, h, shocks=future)
        return simulated - predicted

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            outs = list(pool.map(replicate, range(B)))
    else:
        outs = [replicate(b) for b in range(B)]
    kept = [e for e in outs if e is not None]
    dropped = B - len(kept)
    if dropped > max_drop * B:
        raise NumericalError(f"{dropped} of {B} bootstrap refits were singular")
    errors = np.array(kept)
    lo = point + np.quantile(errors, alpha / 2, axis=0)
    hi = point + np.quantile(errors, 1 - alpha / 2, axis=0)
    times = ()
    if data.times:
        times = tuple(data.times[-1].shift(s) for s in range(1, h + 1))
    return IntervalReport(data.nodes, times, point, lo, hi, alpha, len(kept), dropped, errors)
