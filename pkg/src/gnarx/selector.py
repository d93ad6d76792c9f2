"""Model-order selection by BIC (or held-out MSFE).

All candidates in one search are estimated on a common sample that starts
after the largest lag any candidate can use, so their criteria are
computed from the same observations.
"""

from __future__ import annotations

import csv
import itertools
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .design import LagFeatures, ModelOrder, SeriesData, count_parameters
from .errors import ConfigurationError, InsufficientDataError, NumericalError, SingularityError
from .estimator import FitResult, fit
from .network import Network
from .panel import format_float

LOG_DET_FLOOR = np.log(1e-300)


def bic(res: FitResult, order: ModelOrder | None = None, N: int | None = None, penalty: str = "cells") -> float:
    """``T' log det Sigma + M log n`` with Sigma the final residual covariance.

    ``penalty="cells"`` takes ``n`` as the number of observed target cells
    (``N T'`` for a complete panel); ``penalty="time"`` uses ``n = T'``.
    """
    order = res.order if order is None else order
    N = res.N if N is None else N
    T = res.effective_T
    if penalty == "cells":
        n = max(int(res.residual_mask.sum()), 1)
    elif penalty == "time":
        n = T
    else:
        raise ConfigurationError(f"unknown BIC penalty {penalty!r}")
    sign, logdet = np.linalg.slogdet(res.sigma_resid)
    if sign <= 0 or logdet < LOG_DET_FLOOR:
        warnings.warn("residual covariance is (near) singular; determinant floored at 1e-300", RuntimeWarning,
                      stacklevel=2)
        logdet = LOG_DET_FLOOR
    return float(T * logdet + count_parameters(order, N) * np.log(n))


@dataclass(frozen=True)
class SearchSpace:
    p_max: int = 12
    s_max: int | None = None
    p_prime_max: int = 3
    alpha: str = "global"
    p_min: int = 1

    def __post_init__(self):
        if self.p_max < 1 or self.p_min < 1 or self.p_min > self.p_max:
            raise ConfigurationError("need 1 <= p_min <= p_max")
        if self.p_prime_max < 0 or (self.s_max is not None and self.s_max < 0):
            raise ConfigurationError("order limits must be nonnegative")
        if self.alpha not in ("global", "local"):
            raise ConfigurationError(f"unknown alpha mode {self.alpha!r}")

    def stage_limit(self, net: Network) -> int:
        top = net.max_stage
        return top if self.s_max is None else min(self.s_max, top)

    def max_lag(self, H: int) -> int:
        return max(self.p_max, self.p_prime_max if H else 0)

    def size(self, H: int, net: Network) -> int:
        ns = self.stage_limit(net) + 1
        return sum(ns ** p for p in range(self.p_min, self.p_max + 1)) * (self.p_prime_max + 1) ** H

    def enumerate(self, H: int, net: Network):
        ns = self.stage_limit(net)
        for p in range(self.p_min, self.p_max + 1):
            for s in itertools.product(range(ns + 1), repeat=p):
                for pp in itertools.product(range(self.p_prime_max + 1), repeat=H):
                    yield ModelOrder(p, s, pp, self.alpha)

    def to_dict(self) -> dict:
        return {"p_max": self.p_max, "s_max": self.s_max, "p_prime_max": self.p_prime_max,
                "alpha": self.alpha, "p_min": self.p_min}


@dataclass(frozen=True)
class TraceEntry:
    order: ModelOrder
    bic: float
    msfe: float | None
    n_params: int

    def rank_key(self, criterion: str = "bic"):
        value = self.bic if criterion == "bic" else self.msfe
        return (value, self.n_params, self.order.sort_key())


@dataclass
class SelectionTrace:
    entries: list[TraceEntry] = field(default_factory=list)
    criterion: str = "bic"

    @property
    def winner(self) -> TraceEntry:
        ok = [e for e in self.entries if np.isfinite(e.bic if self.criterion == "bic" else e.msfe)]
        if not ok:
            raise NumericalError("no candidate could be estimated")
        return min(ok, key=lambda e: e.rank_key(self.criterion))

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["order", "bic", "msfe"])
            for e in self.entries:
                w.writerow([e.order.key(), format_float(e.bic),
                            "" if e.msfe is None else format_float(e.msfe)])


class _Evaluator:
    """Fits candidates on a shared sample, caching results per order."""

    def __init__(self, data: SeriesData, net: Network, start: int, criterion: str, fit_end: int | None,
                 threads: int, penalty: str = "cells"):
        if data.T <= start:
            raise InsufficientDataError(f"search needs more than {start} time points, have {data.T}")
        self.data, self.net, self.criterion, self.threads = data, net, criterion, threads
        self.penalty = penalty
        stop = data.T if criterion == "bic" else fit_end
        if criterion == "msfe":
            if fit_end is None or not start < fit_end < data.T:
                raise ConfigurationError("MSFE selection needs start < fit_end < T")
            self.eval_feats = LagFeatures(data, net, np.arange(fit_end, data.T))
        elif criterion != "bic":
            raise ConfigurationError(f"unknown criterion {criterion!r}")
        self.feats = LagFeatures(data, net, np.arange(start, stop))
        self.cache: dict[ModelOrder, TraceEntry] = {}
        self.visited: list[ModelOrder] = []

    def _one(self, order: ModelOrder) -> TraceEntry:
        M = count_parameters(order, self.data.N)
        try:
            res = fit(order, self.net, self.data, features=self.feats, covariances=False)
        except (SingularityError, InsufficientDataError):
            return TraceEntry(order, float("inf"), None if self.criterion == "bic" else float("inf"), M)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            b = bic(res, penalty=self.penalty)
        msfe = None
        if self.criterion == "msfe":
            D = self.eval_feats.design(order)
            pred = np.einsum("tim,m->ti", D, res.gamma)
            err = (pred - self.eval_feats.y)[self.eval_feats.mask]
            msfe = float(np.mean(err ** 2))
        return TraceEntry(order, b, msfe, M)

    def __call__(self, orders) -> list[TraceEntry]:
        todo = [o for o in dict.fromkeys(orders) if o not in self.cache]
        if self.threads > 1 and len(todo) > 1:
            with ThreadPoolExecutor(self.threads) as pool:
                done = list(pool.map(self._one, todo))
        else:
            done = [self._one(o) for o in todo]
        for o, e in zip(todo, done):
            self.cache[o] = e
            self.visited.append(o)
        return [self.cache[o] for o in orders]

    def trace(self) -> SelectionTrace:
        return SelectionTrace([self.cache[o] for o in self.visited], self.criterion)


def _best(entries, criterion):
    return min(entries, key=lambda e: e.rank_key(criterion))


def select_stagewise(space: SearchSpace, data: SeriesData, net: Network, criterion: str = "bic",
                     fit_end: int | None = None, threads: int = 1, prune: bool = True,
                     penalty: str = "cells") -> SelectionTrace:
    """Choose ``p`` with no network or lagged regressor terms, then the rest by coordinate descent.

    Stage two sweeps over ``s_1 .. s_p`` and ``p'_1 .. p'_H`` in turn, setting
    each component to its best value with the others fixed, and repeats
    until a full sweep changes nothing.  With ``prune`` the converged model
    is then compared with the one that drops its last lag; a lower criterion
    shortens ``p`` and the sweeps resume.
    """
    H = data.H
    s_lim = space.stage_limit(net)
    ev = _Evaluator(data, net, space.max_lag(H), criterion, fit_end, threads, penalty)
    stage1 = [ModelOrder(p, (0,) * p, (0,) * H, space.alpha) for p in range(space.p_min, space.p_max + 1)]
    p = _best(ev(stage1), criterion).order.p

    s, pp = [0] * p, [0] * H
    while True:
        _descend(ev, space, s, pp, s_lim, criterion)
        p = len(s)
        if not prune or p <= space.p_min:
            break
        current = ModelOrder(p, tuple(s), tuple(pp), space.alpha)
        shorter = ModelOrder(p - 1, tuple(s[:-1]), tuple(pp), space.alpha)
        if _best(ev([current, shorter]), criterion).order != shorter:
            break
        s.pop()
    return ev.trace()


def _descend(ev, space, s, pp, s_lim, criterion) -> None:
    p = len(s)
    components = [("s", j) for j in range(p)] + [("pp", h) for h in range(len(pp))]
    changed = True
    while changed:
        changed = False
        for kind, j in components:
            limit = s_lim if kind == "s" else space.p_prime_max
            cands = []
            for v in range(limit + 1):
                s2, pp2 = list(s), list(pp)
                (s2 if kind == "s" else pp2)[j] = v
                cands.append(ModelOrder(p, tuple(s2), tuple(pp2), space.alpha))
            best = _best(ev(cands), criterion).order
            new = best.s[j] if kind == "s" else best.p_prime[j]
            cur = s[j] if kind == "s" else pp[j]
            if new != cur:
                (s if kind == "s" else pp)[j] = new
                changed = True


def select_global(space: SearchSpace, data: SeriesData, net: Network, criterion: str = "bic",
                  fit_end: int | None = None, threads: int = 1, max_candidates: int = 10 ** 6,
                  penalty: str = "cells") -> SelectionTrace:
    """Exhaustive search over every order in ``space``."""
    H = data.H
    n = space.size(H, net)
    if n == 0:
        raise ConfigurationError("empty search space")
    if n > max_candidates:
        raise ConfigurationError(f"search space has {n} candidates (limit {max_candidates}); use stagewise search")
    ev = _Evaluator(data, net, space.max_lag(H), criterion, fit_end, threads, penalty)
    ev(list(space.enumerate(H, net)))
    return ev.trace()
