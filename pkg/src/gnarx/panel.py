"""Monthly node-by-time panels with an explicit observation mask."""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    DataFormatError,
    DegenerateScaleError,
    DimensionError,
    LookupFailure,
    ParseError,
    ValidationError,
)

_DATE_RE = re.compile(r"^\s*(\d{4})-(\d{1,2})\s*$")


@dataclass(frozen=True, order=True)
class CalendarStamp:
    year: int
    month: int

    def __post_init__(self):
        if not 1 <= self.month <= 12:
            raise ValidationError(f"month out of range: {self.month}")

    @classmethod
    def parse(cls, text: str) -> "CalendarStamp":
        m = _DATE_RE.match(text)
        if m is None:
            raise ParseError(f"cannot parse date {text!r}, expected YYYY-MM")
        year, month = int(m.group(1)), int(m.group(2))
        if not 1 <= month <= 12:
            raise ParseError(f"month out of range in date {text!r}")
        return cls(year, month)

    @property
    def ordinal(self) -> int:
        return self.year * 12 + (self.month - 1)

    @classmethod
    def from_ordinal(cls, k: int) -> "CalendarStamp":
        return cls(k // 12, k % 12 + 1)

    def shift(self, months: int) -> "CalendarStamp":
        return CalendarStamp.from_ordinal(self.ordinal + months)

    @property
    def quarter(self) -> int:
        return (self.month - 1) // 3 + 1

    def __str__(self):
        return f"{self.year:04d}-{self.month:02d}"


def month_range(start: CalendarStamp, n: int) -> tuple[CalendarStamp, ...]:
    return tuple(start.shift(k) for k in range(n))


def format_float(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True, eq=False)
class Panel:
    """N x T matrix of monthly observations.

    ``values`` holds NaN wherever ``observed`` is False; the mask is the
    authoritative record of missingness and all numerical code reads it
    rather than testing for NaN.
    """

    nodes: tuple[str, ...]
    times: tuple[CalendarStamp, ...]
    values: np.ndarray
    observed: np.ndarray = field(default=None)

    def __post_init__(self):
        nodes = tuple(str(n) for n in self.nodes)
        times = tuple(self.times)
        values = np.array(self.values, dtype=float, copy=True)
        if values.ndim != 2:
            raise DimensionError("panel values must be a 2-d array")
        if self.observed is None:
            observed = np.isfinite(values)
        else:
            observed = np.array(self.observed, dtype=bool, copy=True)
        n, t = len(nodes), len(times)
        if n < 1 or t < 1:
            raise DimensionError("panel needs at least one node and one time point")
        if values.shape != (n, t) or observed.shape != (n, t):
            raise DimensionError(
                f"values/observed shape {values.shape}/{observed.shape} "
                f"does not match ({n}, {t})"
            )
        if len(set(nodes)) != n:
            raise DataFormatError("duplicated node names")
        for a, b in zip(times, times[1:]):
            if b.ordinal - a.ordinal != 1:
                raise DataFormatError(f"times not consecutive months at {a} -> {b}")
        if not np.all(np.isfinite(values[observed])):
            raise ValidationError("non-finite value in an observed cell")
        values[~observed] = np.nan
        values.setflags(write=False)
        observed.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "observed", observed)

    @property
    def N(self) -> int:
        return len(self.nodes)

    @property
    def T(self) -> int:
        return len(self.times)

    @property
    def filled(self) -> np.ndarray:
        """Values with unobserved cells replaced by zero."""
        return np.where(self.observed, self.values, 0.0)

    def node_index(self, node: str) -> int:
        try:
            return self.nodes.index(node)
        except ValueError:
            raise LookupFailure(f"unknown node {node!r}") from None

    def time_index(self, stamp: CalendarStamp) -> int:
        k = stamp.ordinal - self.times[0].ordinal
        if not 0 <= k < self.T:
            raise LookupFailure(f"{stamp} outside panel range {self.times[0]}..{self.times[-1]}")
        return k

    def window(self, start: CalendarStamp | None = None, end: CalendarStamp | None = None) -> "Panel":
        """Sub-panel covering ``start..end`` inclusive."""
        i0 = 0 if start is None else max(0, start.ordinal - self.times[0].ordinal)
        i1 = self.T if end is None else min(self.T, end.ordinal - self.times[0].ordinal + 1)
        if i1 <= i0:
            raise DimensionError(f"empty window {start}..{end}")
        return Panel(self.nodes, self.times[i0:i1], self.values[:, i0:i1], self.observed[:, i0:i1])

    def reindex(self, times: Sequence[CalendarStamp]) -> "Panel":
        """Place this panel on another monthly index; new cells are unobserved."""
        times = tuple(times)
        vals = np.full((self.N, len(times)), np.nan)
        obs = np.zeros((self.N, len(times)), dtype=bool)
        offset = self.times[0].ordinal
        for k, stamp in enumerate(times):
            j = stamp.ordinal - offset
            if 0 <= j < self.T:
                vals[:, k] = self.values[:, j]
                obs[:, k] = self.observed[:, j]
        return Panel(self.nodes, times, vals, obs)

    def select(self, nodes: Sequence[str]) -> "Panel":
        idx = [self.node_index(n) for n in nodes]
        return Panel(tuple(nodes), self.times, self.values[idx], self.observed[idx])

    def with_values(self, values: np.ndarray, observed: np.ndarray | None = None) -> "Panel":
        return Panel(self.nodes, self.times, values, self.observed if observed is None else observed)


def _parse_cell(text: str, row: int, col: str) -> float:
    text = text.strip()
    if text == "" or text.upper() == "NA":
        return np.nan
    try:
        x = float(text)
    except ValueError:
        raise ParseError(f"non-numeric cell {text!r} at row {row}, column {col!r}") from None
    if not np.isfinite(x):
        raise ParseError(f"non-finite cell {text!r} at row {row}, column {col!r}")
    return x


def load_panel_csv(path, columns: Mapping[str, str] | Sequence[str] | None = None) -> Panel:
    """Read a wide CSV with header ``date,<node1>,<node2>,...``.

    Parameters
    ----------
    path : path-like
    columns : mapping or sequence, optional
        Either a list of header names to keep (in that order), or a mapping
        from header name to node identifier.  By default every column is
        kept under its header name.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if len(header) < 2 or header[0].lower() != "date":
            raise DataFormatError(f"{path}: header must start with 'date' followed by node names")
        body = [r for r in reader if any(c.strip() for c in r)]

    names = header[1:]
    stamps, cells = [], []
    for lineno, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise DataFormatError(f"{path}: row {lineno} has {len(row)} cells, expected {len(header)}")
        try:
            stamps.append(CalendarStamp.parse(row[0]))
        except ParseError as exc:
            raise ParseError(f"{path}: row {lineno}: {exc}") from None
        cells.append([_parse_cell(c, lineno, names[k]) for k, c in enumerate(row[1:])])
    if not stamps:
        raise DataFormatError(f"{path}: no data rows")
    if len(set(stamps)) != len(stamps):
        dup = next(s for s in stamps if stamps.count(s) > 1)
        raise DataFormatError(f"{path}: duplicated timestamp {dup}")
    order = np.argsort([s.ordinal for s in stamps], kind="stable")
    stamps = [stamps[k] for k in order]
    mat = np.array(cells, dtype=float)[order].T

    start = stamps[0]
    times = month_range(start, stamps[-1].ordinal - start.ordinal + 1)
    full = np.full((len(names), len(times)), np.nan)
    for k, s in enumerate(stamps):
        full[:, s.ordinal - start.ordinal] = mat[:, k]
    panel = Panel(tuple(names), times, full, np.isfinite(full))

    if columns is not None:
        if isinstance(columns, Mapping):
            sub = panel.select(list(columns))
            panel = Panel(tuple(columns[c] for c in columns), sub.times, sub.values, sub.observed)
        else:
            panel = panel.select(list(columns))
    return panel


def save_panel_csv(panel: Panel, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", *panel.nodes])
        for t, stamp in enumerate(panel.times):
            w.writerow(
                [str(stamp)]
                + [format_float(panel.values[i, t]) if panel.observed[i, t] else "" for i in range(panel.N)]
            )


def difference(panel: Panel) -> Panel:
    """First differences; the result is indexed by the later month of each pair."""
    if panel.T < 2:
        raise DimensionError("differencing needs at least two time points")
    v = panel.filled
    out = v[:, 1:] - v[:, :-1]
    obs = panel.observed[:, 1:] & panel.observed[:, :-1]
    return Panel(panel.nodes, panel.times[1:], out, obs)


@dataclass(frozen=True)
class Scaling:
    mean: np.ndarray
    sd: np.ndarray

    def invert(self, panel: Panel) -> Panel:
        v = panel.filled * self.sd[:, None] + self.mean[:, None]
        return panel.with_values(v)


def standardize(panel: Panel) -> tuple[Panel, Scaling]:
    """Per-node zero mean, unit sample sd over observed cells."""
    means = np.empty(panel.N)
    sds = np.empty(panel.N)
    for i in range(panel.N):
        x = panel.values[i, panel.observed[i]]
        if x.size < 2:
            raise DegenerateScaleError(f"node {panel.nodes[i]!r} has fewer than two observations")
        sd = x.std(ddof=1)
        if not sd > 0:
            raise DegenerateScaleError(f"node {panel.nodes[i]!r} has zero variance")
        means[i], sds[i] = x.mean(), sd
    out = (panel.filled - means[:, None]) / sds[:, None]
    return panel.with_values(out), Scaling(means, sds)


def zero_fill_before(panel: Panel, cutoff: CalendarStamp) -> Panel:
    """Set every cell strictly before ``cutoff`` to an observed zero."""
    k = cutoff.ordinal - panel.times[0].ordinal
    k = min(max(k, 0), panel.T)
    v = panel.values.copy()
    obs = panel.observed.copy()
    v[:, :k] = 0.0
    obs[:, :k] = True
    return panel.with_values(v, obs)
