"""Mixed-frequency bridge from monthly index forecasts to quarterly growth.

A quarter's regressor is built from monthly values counted backwards from
the quarter's last month: lag 0 is the last month, lag 2 the first.  The
default single-lag model uses lag 2 only (July for Q3).
"""

from __future__ import annotations

import csv
import re
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    ConfigurationError,
    DataFormatError,
    InsufficientDataError,
    LookupFailure,
    ParseError,
    SingularityError,
    ValidationError,
)
from .panel import CalendarStamp, Panel, format_float

_QUARTER_RE = re.compile(r"^\s*(\d{4})-Q([1-4])\s*$")


@dataclass(frozen=True, order=True)
class QuarterStamp:
    year: int
    quarter: int

    def __post_init__(self):
        if not 1 <= self.quarter <= 4:
            raise ValidationError(f"quarter out of range: {self.quarter}")

    @classmethod
    def parse(cls, text: str) -> "QuarterStamp":
        m = _QUARTER_RE.match(text)
        if m is None:
            raise ParseError(f"cannot parse quarter {text!r}, expected YYYY-Qn")
        return cls(int(m.group(1)), int(m.group(2)))

    @classmethod
    def of(cls, month: CalendarStamp) -> "QuarterStamp":
        return cls(month.year, month.quarter)

    @property
    def ordinal(self) -> int:
        return self.year * 4 + self.quarter - 1

    def shift(self, quarters: int) -> "QuarterStamp":
        k = self.ordinal + quarters
        return QuarterStamp(k // 4, k % 4 + 1)

    @property
    def last_month(self) -> CalendarStamp:
        return CalendarStamp(self.year, 3 * self.quarter)

    def month_at_lag(self, lag: int) -> CalendarStamp:
        return self.last_month.shift(-lag)

    def __str__(self):
        return f"{self.year:04d}-Q{self.quarter}"


@dataclass(frozen=True)
class QuarterlySeries:
    quarters: tuple[QuarterStamp, ...]
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).reshape(-1)
        object.__setattr__(self, "quarters", tuple(self.quarters))
        object.__setattr__(self, "values", values)
        if len(self.quarters) != values.size:
            raise ValidationError("quarters and values differ in length")
        for a, b in zip(self.quarters, self.quarters[1:]):
            if b.ordinal != a.ordinal + 1:
                raise ValidationError(f"quarters not consecutive: {a} then {b}")
        if not np.all(np.isfinite(values)):
            raise ValidationError("quarterly values must be finite")

    def __len__(self):
        return len(self.quarters)


def load_quarterly_csv(path) -> QuarterlySeries:
    """Read a ``quarter,growth`` file."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["quarter", "growth"]:
        raise DataFormatError(f"{path}: expected header 'quarter,growth'")
    quarters, values = [], []
    for i, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise DataFormatError(f"{path}: row {i} has {len(row)} fields, expected 2")
        try:
            q = QuarterStamp.parse(row[0])
        except ParseError as exc:
            raise ParseError(f"{path}: row {i}: {exc}") from None
        try:
            v = float(row[1])
        except ValueError:
            raise ParseError(f"{path}: row {i}: non-numeric growth {row[1]!r}") from None
        quarters.append(q)
        values.append(v)
    if len(set(quarters)) != len(quarters):
        raise DataFormatError(f"{path}: duplicated quarter")
    return QuarterlySeries(tuple(quarters), np.array(values))


def save_quarterly_csv(series: QuarterlySeries, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["quarter", "growth"])
        for q, v in zip(series.quarters, series.values):
            w.writerow([str(q), format_float(v)])


def almon_weights(theta: Sequence[float], K: int) -> np.ndarray:
    """Exponential Almon weights ``exp(t1 k + t2 k^2)`` for k = 0..K-1, normalised to sum to one."""
    if K < 1:
        raise ConfigurationError("K must be positive")
    t1, t2 = (float(v) for v in theta)
    k = np.arange(K, dtype=float)
    z = t1 * k + t2 * k ** 2
    w = np.exp(z - z.max())
    return w / w.sum()


@dataclass(frozen=True)
class MidasSpec:
    """How monthly values map onto a quarter.

    ``mode="single-lag"`` uses the month at ``lag_index`` (months back from the
    quarter's last month; 2 is the first month).  ``mode="almon"`` uses an
    Almon-weighted sum over lags ``0..K-1``.
    """

    mode: str = "single-lag"
    lag_index: int = 2
    K: int = 3
    theta: tuple[float, float] = (0.0, 0.0)
    intercept: bool = True

    def __post_init__(self):
        if self.mode not in ("single-lag", "almon"):
            raise ConfigurationError(f"unknown MIDAS mode {self.mode!r}")
        if self.K < 1:
            raise ConfigurationError("K must be positive")
        if not 0 <= self.lag_index < self.K:
            raise ConfigurationError(f"lag_index must lie in 0..{self.K - 1}")
        if len(self.theta) != 2:
            raise ConfigurationError("theta needs two values")
        object.__setattr__(self, "theta", tuple(float(v) for v in self.theta))

    def weights(self) -> np.ndarray:
        if self.mode == "almon":
            return almon_weights(self.theta, self.K)
        w = np.zeros(self.K)
        w[self.lag_index] = 1.0
        return w

    def lags(self) -> list[int]:
        """Monthly lags the regressor depends on."""
        return [k for k, w in enumerate(self.weights()) if w != 0.0]

    def to_dict(self) -> dict:
        return {"mode": self.mode, "lag_index": self.lag_index, "K": self.K, "theta": list(self.theta),
                "intercept": self.intercept}

    @classmethod
    def from_dict(cls, d: dict) -> "MidasSpec":
        d = dict(d)
        if "theta" in d:
            d["theta"] = tuple(d["theta"])
        return cls(**d)


def _monthly_lookup(monthly, node=None) -> dict[CalendarStamp, float]:
    if isinstance(monthly, Panel):
        if node is None:
            if monthly.N != 1:
                raise LookupFailure("panel has several nodes; name one")
            i = 0
        else:
            i = monthly.node_index(node)
        return {t: float(monthly.values[i, k]) for k, t in enumerate(monthly.times) if monthly.observed[i, k]}
    return {t: float(v) for t, v in dict(monthly).items() if np.isfinite(v)}


def quarter_regressor(lookup: dict[CalendarStamp, float], quarter: QuarterStamp, spec: MidasSpec) -> float | None:
    """Weighted monthly value for one quarter, or None when a needed month is missing."""
    w = spec.weights()
    total = 0.0
    for k in spec.lags():
        month = quarter.month_at_lag(k)
        if month not in lookup:
            return None
        total += w[k] * lookup[month]
    return total


@dataclass(frozen=True)
class MidasRows:
    quarters: tuple[QuarterStamp, ...]
    x: np.ndarray
    y: np.ndarray


def align_midas(monthly, quarterly: QuarterlySeries, spec: MidasSpec = MidasSpec(), node=None) -> MidasRows:
    """Pair each quarter's growth with its monthly regressor.

    ``monthly`` is a :class:`Panel` (pick a column with ``node``) or a mapping
    from month to value.  Quarters lacking a required month are dropped
    with a warning.
    """
    lookup = _monthly_lookup(monthly, node)
    qs, xs, ys = [], [], []
    dropped = []
    for q, y in zip(quarterly.quarters, quarterly.values):
        x = quarter_regressor(lookup, q, spec)
        if x is None:
            dropped.append(str(q))
            continue
        qs.append(q)
        xs.append(x)
        ys.append(y)
    if dropped:
        warnings.warn(f"dropped quarters without monthly data: {', '.join(dropped)}", RuntimeWarning, stacklevel=2)
    return MidasRows(tuple(qs), np.array(xs), np.array(ys))


@dataclass(frozen=True)
class MidasFit:
    spec: MidasSpec
    slope: float
    intercept: float
    resid_sd: float
    slope_se: float
    residuals: np.ndarray

    def predict(self, x):
        return self.intercept + self.slope * np.asarray(x, dtype=float)

    def to_dict(self) -> dict:
        return {"spec": self.spec.to_dict(), "slope": self.slope, "intercept": self.intercept,
                "resid_sd": self.resid_sd, "slope_se": self.slope_se, "n": int(self.residuals.size)}


def fit_midas(rows: MidasRows, spec: MidasSpec = MidasSpec()) -> MidasFit:
    """Least-squares bridge regression of quarterly growth on the aligned regressor."""
    x, y = np.asarray(rows.x, dtype=float), np.asarray(rows.y, dtype=float)
    n = x.size
    if n < 3:
        raise InsufficientDataError(f"bridge regression needs at least 3 quarters, have {n}")
    if spec.intercept:
        xc = x - x.mean()
        sxx = float(xc @ xc)
        if sxx <= 1e-12 * max(1.0, float(x @ x)):
            raise SingularityError("MIDAS regressor has zero variance", columns=[1])
        slope = float(xc @ (y - y.mean())) / sxx
        intercept = float(y.mean() - slope * x.mean())
        dof = n - 2
    else:
        sxx = float(x @ x)
        if sxx == 0.0:
            raise SingularityError("MIDAS regressor is identically zero", columns=[0])
        slope = float(x @ y) / sxx
        intercept = 0.0
        dof = n - 1
    resid = y - intercept - slope * x
    s2 = float(resid @ resid) / dof
    return MidasFit(spec, slope, intercept, float(np.std(resid, ddof=1)), float(np.sqrt(s2 / sxx)), resid)


@dataclass(frozen=True)
class MonthlyForecast:
    """Point path and bootstrap replicate paths of one monthly series."""

    times: tuple[CalendarStamp, ...]
    point: np.ndarray
    replicates: np.ndarray

    def __post_init__(self):
        point = np.asarray(self.point, dtype=float).reshape(-1)
        reps = np.asarray(self.replicates, dtype=float)
        reps = reps.reshape(-1, point.size) if reps.size else reps.reshape(0, point.size)
        object.__setattr__(self, "times", tuple(self.times))
        object.__setattr__(self, "point", point)
        object.__setattr__(self, "replicates", reps)
        if len(self.times) != point.size:
            raise ValidationError("forecast times and point path differ in length")

    @classmethod
    def from_intervals(cls, report, node) -> "MonthlyForecast":
        i = report.nodes.index(node) if isinstance(node, str) else int(node)
        return cls(report.times, report.point[i], report.replicate_paths[:, i, :])


@dataclass(frozen=True)
class GdpProjection:
    scenario: str
    quarters: tuple[QuarterStamp, ...]
    point: np.ndarray
    lower: np.ndarray
    upper: np.ndarray


def project_gdp(fit: MidasFit, history, forecast: MonthlyForecast, quarters: Sequence[QuarterStamp],
                seed: int = 0, scenario: str = "", alpha: float = 0.05, node=None) -> GdpProjection:
    """Map monthly forecast replicates through the bridge regression.

    Months found in ``history`` use the observed value in every replicate.
    Each replicate adds a normal residual draw with the fitted residual sd;
    the draws are seeded by quarter, so scenarios that agree on a quarter's
    months produce identical projections for it.
    """
    if forecast.replicates.shape[0] == 0:
        raise ValidationError("no forecast replicates to project")
    from .stochastic import RngSpec

    observed = _monthly_lookup(history, node) if history is not None else {}
    col = {t: k for k, t in enumerate(forecast.times)}
    B = forecast.replicates.shape[0]
    w = fit.spec.weights()
    points, lows, highs = [], [], []
    for q in quarters:
        xp = 0.0
        xb = np.zeros(B)
        for k in fit.spec.lags():
            month = q.month_at_lag(k)
            if month in observed:
                xp += w[k] * observed[month]
                xb += w[k] * observed[month]
            elif month in col:
                xp += w[k] * forecast.point[col[month]]
                xb += w[k] * forecast.replicates[:, col[month]]
            else:
                raise LookupFailure(f"month {month} needed for {q} is neither observed nor forecast")
        draws = RngSpec(seed).generator(q.ordinal).standard_normal(B) * fit.resid_sd
        sims = fit.predict(xb) + draws
        points.append(float(fit.predict(xp)))
        lows.append(float(np.quantile(sims, alpha / 2)))
        highs.append(float(np.quantile(sims, 1 - alpha / 2)))
    return GdpProjection(scenario, tuple(quarters), np.array(points), np.array(lows), np.array(highs))


def write_projection_csv(projections: Sequence[GdpProjection], path) -> None:
    """Rows ``quarter,scenario,point,lo95,hi95``, grouped by quarter."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["quarter", "scenario", "point", "lo95", "hi95"])
        if not projections:
            return
        for k, q in enumerate(projections[0].quarters):
            for pr in projections:
                w.writerow([str(q), pr.scenario, format_float(pr.point[k]), format_float(pr.lower[k]),
                            format_float(pr.upper[k])])
