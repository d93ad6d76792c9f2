"""GNARX model orders, parameter layout, the restricted VARX mapping and regression data.

Parameters are stacked as ``gamma = (gamma_1, ..., gamma_p, lambda_1, ..., lambda_H)``
where ``gamma_k = (alpha_{1,k}, ..., alpha_{N,k}, beta_{k,1}, ..., beta_{k,s_k})``
(a single ``alpha_k`` in the global-alpha model) and
``lambda_h = (lambda_{h,0}, ..., lambda_{h,p'_h})``.

The unrestricted coefficient matrix is ``B = [phi_1, ..., phi_p, Lambda_{1,0}, ...,
Lambda_{1,p'_1}, Lambda_{2,0}, ...]`` with ``vec`` taken column-major, so that
``vec(B) = R @ gamma``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionError, InsufficientDataError, ValidationError
from .network import Network
from .panel import CalendarStamp, Panel


@dataclass(frozen=True)
class ModelOrder:
    p: int
    s: tuple[int, ...]
    p_prime: tuple[int, ...] = ()
    alpha: str = "global"

    def __post_init__(self):
        object.__setattr__(self, "s", tuple(int(v) for v in self.s))
        object.__setattr__(self, "p_prime", tuple(int(v) for v in self.p_prime))
        if self.p < 1:
            raise ValidationError("autoregressive order p must be >= 1")
        if len(self.s) != self.p:
            raise ValidationError(f"stage vector has length {len(self.s)}, expected p={self.p}")
        if any(v < 0 for v in self.s) or any(v < 0 for v in self.p_prime):
            raise ValidationError("stages and exogenous lags must be nonnegative")
        if self.alpha not in ("global", "local"):
            raise ValidationError(f"alpha mode must be 'global' or 'local', got {self.alpha!r}")

    @property
    def H(self) -> int:
        return len(self.p_prime)

    @property
    def p_star(self) -> int:
        return max((self.p, *self.p_prime))

    @property
    def local(self) -> bool:
        return self.alpha == "local"

    def n_alpha(self, N: int) -> int:
        return N if self.local else 1

    def label(self) -> str:
        s = ",".join(str(v) for v in self.s)
        extra = "".join(f",{v}" for v in self.p_prime)
        return f"{'GNARX' if self.H else 'GNAR'}({self.p},[{s}]{extra})"

    def key(self) -> str:
        """Compact form used in selection traces, e.g. ``1;[1];[1];local``."""
        return f"{self.p};[{','.join(map(str, self.s))}];[{','.join(map(str, self.p_prime))}];{self.alpha}"

    def to_dict(self) -> dict:
        return {"p": self.p, "s": list(self.s), "p_prime": list(self.p_prime), "alpha": self.alpha}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "ModelOrder":
        try:
            return cls(int(d["p"]), tuple(d["s"]), tuple(d.get("p_prime", ())), d.get("alpha", "global"))
        except KeyError as exc:
            raise ValidationError(f"model order missing field {exc.args[0]!r}") from None

    @classmethod
    def from_json(cls, text: str) -> "ModelOrder":
        return cls.from_dict(json.loads(text))

    def sort_key(self):
        return (self.p, self.s, self.p_prime)


def count_parameters(order: ModelOrder, N: int) -> int:
    return order.p * order.n_alpha(N) + sum(order.s) + sum(v + 1 for v in order.p_prime)


def param_names(order: ModelOrder, nodes: Sequence[str]) -> list[str]:
    names = []
    for k in range(1, order.p + 1):
        if order.local:
            names += [f"alpha[{n},{k}]" for n in nodes]
        else:
            names.append(f"alpha[{k}]")
        names += [f"beta[{k},{r}]" for r in range(1, order.s[k - 1] + 1)]
    for h, pp in enumerate(order.p_prime, start=1):
        names += [f"lambda[{h},{j}]" for j in range(pp + 1)]
    return names


@dataclass(frozen=True, eq=False)
class ParameterVector:
    """Structured view of ``gamma``.

    ``alphas`` has shape ``(p, N)`` for local alpha and ``(p,)`` for global
    alpha; ``betas[k-1]`` has length ``s_k``; ``lambdas[h-1]`` has length
    ``p'_h + 1`` (lag 0 first).
    """

    order: ModelOrder
    alphas: np.ndarray
    betas: tuple[np.ndarray, ...]
    lambdas: tuple[np.ndarray, ...] = field(default=())

    def __post_init__(self):
        o = self.order
        alphas = np.asarray(self.alphas, dtype=float)
        betas = tuple(np.asarray(b, dtype=float).reshape(-1) for b in self.betas)
        lambdas = tuple(np.asarray(v, dtype=float).reshape(-1) for v in self.lambdas)
        if alphas.shape[0] != o.p or (o.local and alphas.ndim != 2) or (not o.local and alphas.ndim != 1):
            raise ValidationError(f"alpha array of shape {alphas.shape} inconsistent with {o.label()} ({o.alpha})")
        if tuple(len(b) for b in betas) != o.s:
            raise ValidationError("beta lengths do not match stage vector")
        if tuple(len(v) - 1 for v in lambdas) != o.p_prime:
            raise ValidationError("lambda lengths do not match exogenous lags")
        for a in (alphas, *betas, *lambdas):
            if not np.all(np.isfinite(a)):
                raise ValidationError("non-finite parameter")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "lambdas", lambdas)

    def node_alphas(self, N: int) -> np.ndarray:
        """Alphas broadcast to shape ``(p, N)``."""
        if self.order.local:
            return self.alphas
        return np.repeat(self.alphas[:, None], N, axis=1)

    def to_gamma(self) -> np.ndarray:
        parts = []
        for k in range(self.order.p):
            parts.append(np.atleast_1d(self.alphas[k]))
            parts.append(self.betas[k])
        parts.extend(self.lambdas)
        return np.concatenate(parts) if parts else np.zeros(0)

    @classmethod
    def from_gamma(cls, order: ModelOrder, gamma, N: int) -> "ParameterVector":
        gamma = np.asarray(gamma, dtype=float)
        if gamma.shape != (count_parameters(order, N),):
            raise DimensionError(f"gamma has shape {gamma.shape}, expected ({count_parameters(order, N)},)")
        na = order.n_alpha(N)
        alphas, betas, pos = [], [], 0
        for k in range(order.p):
            alphas.append(gamma[pos:pos + na])
            pos += na
            betas.append(gamma[pos:pos + order.s[k]])
            pos += order.s[k]
        lambdas = []
        for pp in order.p_prime:
            lambdas.append(gamma[pos:pos + pp + 1])
            pos += pp + 1
        a = np.array(alphas) if order.local else np.array([v[0] for v in alphas])
        return cls(order, a, tuple(betas), tuple(lambdas))

    @classmethod
    def zeros(cls, order: ModelOrder, N: int) -> "ParameterVector":
        return cls.from_gamma(order, np.zeros(count_parameters(order, N)), N)


def _check_stages(order: ModelOrder, net: Network):
    top = max(order.s)
    if top > net.max_stage:
        raise DimensionError(
            f"stage {top} requested but the network has neighbourhoods up to stage {net.max_stage} only"
        )


def assemble_coefficients(order: ModelOrder, params: ParameterVector, net: Network):
    """VARX coefficient matrices implied by the GNARX parameters.

    Returns
    -------
    phis : list of (N, N) arrays, ``phi_1 .. phi_p``
    lambdas : list over regressors of lists of (N, N) arrays ``Lambda_{h,0} .. Lambda_{h,p'_h}``
    """
    _check_stages(order, net)
    N = net.N
    alphas = params.node_alphas(N)
    phis = []
    for k in range(order.p):
        phi = np.diag(alphas[k]).astype(float)
        for r in range(1, order.s[k] + 1):
            phi = phi + params.betas[k][r - 1] * net.stage_matrix(r)
        phis.append(phi)
    eye = np.eye(N)
    lambdas = [[lam * eye for lam in lams] for lams in params.lambdas]
    return phis, lambdas


def stack_coefficients(phis, lambdas) -> np.ndarray:
    """``B = [phi_1, ..., phi_p, Lambda_{1,0}, ...]`` as an N x K matrix."""
    blocks = list(phis) + [m for lams in lambdas for m in lams]
    return np.hstack(blocks)


def build_model_matrix(order: ModelOrder, net: Network) -> np.ndarray:
    """The P x M restriction matrix with ``vec(B) = R @ gamma``."""
    _check_stages(order, net)
    N = net.N
    N2 = N * N
    nblocks = order.p + sum(v + 1 for v in order.p_prime)
    M = count_parameters(order, N)
    R = np.zeros((N2 * nblocks, M))
    vec_eye = np.eye(N).reshape(-1, order="F")
    diag_pos = np.arange(N) * (N + 1)
    col = 0
    for k in range(order.p):
        rows = slice(k * N2, (k + 1) * N2)
        if order.local:
            R[k * N2 + diag_pos, col + np.arange(N)] = 1.0
            col += N
        else:
            R[rows, col] = vec_eye
            col += 1
        for r in range(1, order.s[k] + 1):
            R[rows, col] = net.stage_matrix(r).reshape(-1, order="F")
            col += 1
    block = order.p
    for pp in order.p_prime:
        for _ in range(pp + 1):
            R[block * N2:(block + 1) * N2, col] = vec_eye
            block += 1
            col += 1
    return R


@dataclass(frozen=True)
class StationarityReport:
    status: str
    margins: np.ndarray

    @property
    def stationary(self) -> bool:
        return self.status == "stationary_sufficient"


def check_stationarity(order: ModelOrder, params: ParameterVector, N: int | None = None) -> StationarityReport:
    """Sufficient stationarity check: per node, sum of |alpha| and |beta| below one."""
    if N is None:
        N = params.alphas.shape[1] if order.local else 1
    alphas = np.abs(params.node_alphas(N))
    beta_total = sum(float(np.abs(b).sum()) for b in params.betas)
    margins = 1.0 - (alphas.sum(axis=0) + beta_total)
    status = "stationary_sufficient" if np.all(margins > 0) else "not_guaranteed"
    return StationarityReport(status, margins)


@dataclass(frozen=True, eq=False)
class SeriesData:
    """Numerical arrays behind a target panel and its exogenous regressors.

    ``y`` is N x T with zeros in unobserved cells; ``x`` is H x N x T.
    """

    y: np.ndarray
    y_obs: np.ndarray
    x: np.ndarray
    x_obs: np.ndarray
    nodes: tuple[str, ...] = ()
    times: tuple[CalendarStamp, ...] = ()

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        N, T = y.shape
        y_obs = np.ones((N, T), bool) if self.y_obs is None else np.asarray(self.y_obs, bool)
        x = np.zeros((0, N, T)) if self.x is None else np.asarray(self.x, dtype=float).reshape(-1, N, T)
        x_obs = np.ones(x.shape, bool) if self.x_obs is None else np.asarray(self.x_obs, bool).reshape(x.shape)
        object.__setattr__(self, "y", np.where(y_obs, y, 0.0))
        object.__setattr__(self, "y_obs", y_obs)
        object.__setattr__(self, "x", np.where(x_obs, x, 0.0))
        object.__setattr__(self, "x_obs", x_obs)
        if not self.nodes:
            object.__setattr__(self, "nodes", tuple(str(k) for k in range(N)))

    @property
    def N(self) -> int:
        return self.y.shape[0]

    @property
    def T(self) -> int:
        return self.y.shape[1]

    @property
    def H(self) -> int:
        return self.x.shape[0]

    @classmethod
    def from_arrays(cls, y, x=None, y_obs=None, x_obs=None, nodes=(), times=()) -> "SeriesData":
        return cls(y, y_obs, x, x_obs, tuple(nodes), tuple(times))

    @classmethod
    def from_panels(cls, panel: Panel, exog: Sequence[Panel] = ()) -> "SeriesData":
        xs, xo = [], []
        for ex in exog:
            if ex.nodes != panel.nodes:
                ex = ex.select(panel.nodes)
            if ex.times != panel.times:
                ex = ex.reindex(panel.times)
            xs.append(ex.filled)
            xo.append(ex.observed)
        x = np.array(xs).reshape(len(xs), panel.N, panel.T)
        x_obs = np.array(xo, dtype=bool).reshape(x.shape)
        return cls(panel.filled, panel.observed, x, x_obs, panel.nodes, panel.times)

    def head(self, T: int) -> "SeriesData":
        """First ``T`` time points."""
        return SeriesData(self.y[:, :T], self.y_obs[:, :T], self.x[:, :, :T], self.x_obs[:, :, :T],
                          self.nodes, self.times[:T])

    def extend(self, y_new, x_new=None, y_obs_new=None) -> "SeriesData":
        """Append columns (N x h targets, H x N x h regressors)."""
        y_new = np.asarray(y_new, dtype=float).reshape(self.N, -1)
        h = y_new.shape[1]
        if x_new is None:
            x_new = np.zeros((self.H, self.N, h))
        x_new = np.asarray(x_new, dtype=float).reshape(self.H, self.N, h)
        y_obs_new = np.ones((self.N, h), bool) if y_obs_new is None else np.asarray(y_obs_new, bool)
        times = self.times
        if times:
            times = times + tuple(times[-1].shift(k) for k in range(1, h + 1))
        return SeriesData(
            np.concatenate([self.y, y_new], axis=1),
            np.concatenate([self.y_obs, y_obs_new], axis=1),
            np.concatenate([self.x, x_new], axis=2),
            np.concatenate([self.x_obs, np.ones(x_new.shape, bool)], axis=2),
            self.nodes,
            times,
        )


class LagFeatures:
    """Lagged regressors for a fixed set of target time indices.

    Features are computed lazily and cached, so a single instance can serve
    every candidate order in a model search over a common estimation sample.
    Network regressors renormalise the stage weights at each lag over the
    neighbours observed at that time; a node with no observed neighbours in
    a stage gets a zero regressor.
    """

    def __init__(self, data: SeriesData, net: Network, targets):
        if net.N != data.N:
            raise DimensionError(f"network has {net.N} nodes, data has {data.N}")
        self.data = data
        self.net = net
        self.targets = np.asarray(targets, dtype=int)
        self._cache: dict = {}

    @property
    def y(self) -> np.ndarray:
        """Targets, shape (n_targets, N)."""
        return self.data.y[:, self.targets].T

    @property
    def mask(self) -> np.ndarray:
        return self.data.y_obs[:, self.targets].T

    def own(self, k: int) -> np.ndarray:
        key = ("own", k)
        if key not in self._cache:
            self._cache[key] = self.data.y[:, self.targets - k].T
        return self._cache[key]

    def network(self, k: int, r: int) -> np.ndarray:
        key = ("net", k, r)
        if key not in self._cache:
            W = self.net.stage_matrix(r)
            lag = self.targets - k
            yl = self.data.y[:, lag]
            ol = self.data.y_obs[:, lag].astype(float)
            num = W @ yl
            missing = W @ (1.0 - ol)
            if np.any(missing > 0):
                den = W @ ol
                ratio = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
                num = np.where(missing > 0, ratio, num)
            self._cache[key] = num.T
        return self._cache[key]

    def exog(self, h: int, j: int) -> np.ndarray:
        key = ("x", h, j)
        if key not in self._cache:
            self._cache[key] = self.data.x[h][:, self.targets - j].T
        return self._cache[key]

    def design(self, order: ModelOrder) -> np.ndarray:
        """Design tensor of shape (n_targets, N, M)."""
        if order.H != self.data.H:
            raise DimensionError(f"order has {order.H} exogenous regressors, data has {self.data.H}")
        _check_stages(order, self.net)
        N = self.data.N
        M = count_parameters(order, N)
        D = np.zeros((len(self.targets), N, M))
        nodes = np.arange(N)
        col = 0
        for k in range(1, order.p + 1):
            if order.local:
                D[:, nodes, col + nodes] = self.own(k)
                col += N
            else:
                D[:, :, col] = self.own(k)
                col += 1
            for r in range(1, order.s[k - 1] + 1):
                D[:, :, col] = self.network(k, r)
                col += 1
        for h, pp in enumerate(order.p_prime):
            for j in range(pp + 1):
                D[:, :, col] = self.exog(h, j)
                col += 1
        return D


def lag_features(data: SeriesData, net: Network, start: int, stop: int | None = None) -> LagFeatures:
    stop = data.T if stop is None else stop
    return LagFeatures(data, net, np.arange(start, stop))


@dataclass(frozen=True, eq=False)
class RegressionData:
    """``Y = B Z + U`` in the matrix layout, plus the missingness-aware design.

    ``Y`` is N x T', ``Z`` is K x T' (unobserved cells entered as zero),
    ``mask`` flags observed targets and ``design`` is the T' x N x M tensor
    of GNARX regressors actually used for estimation.
    """

    order: ModelOrder
    Y: np.ndarray
    Z: np.ndarray
    mask: np.ndarray
    design: np.ndarray
    start: int

    @property
    def effective_T(self) -> int:
        return self.Y.shape[1]


def build_z(order: ModelOrder, data: SeriesData, targets) -> np.ndarray:
    """Stacked regressor columns: Y_{t-1..t-p}, then X_{h,t..t-p'_h} for each h."""
    targets = np.asarray(targets)
    rows = [data.y[:, targets - k] for k in range(1, order.p + 1)]
    for h, pp in enumerate(order.p_prime):
        rows += [data.x[h][:, targets - j] for j in range(pp + 1)]
    return np.vstack(rows)


def build_regression_data(order: ModelOrder, data: SeriesData, net: Network, start: int | None = None) -> RegressionData:
    """Assemble estimation arrays for targets ``start .. T-1`` (0-based, default ``p*``)."""
    p_star = order.p_star
    start = p_star if start is None else start
    if start < p_star:
        raise DimensionError(f"estimation start {start} precedes the maximum lag {p_star}")
    if data.T <= start:
        raise InsufficientDataError(f"need more than {start} time points, have {data.T}")
    feats = lag_features(data, net, start)
    D = feats.design(order)
    Z = build_z(order, data, feats.targets)
    return RegressionData(order, feats.y.T.copy(), Z, feats.mask.T.copy(), D, start)


def design_from_matrices(Z: np.ndarray, R: np.ndarray, N: int) -> np.ndarray:
    """Per-time design blocks ``(z_t^T kron I_N) R`` as a (T', N, M) tensor."""
    K = Z.shape[0]
    R3 = R.reshape(K, N, R.shape[1])
    return np.einsum("kt,kim->tim", Z, R3)
