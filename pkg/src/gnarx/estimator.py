"""Restricted least squares for GNARX models.

Everything works on the design tensor ``D`` of shape (T', N, M) whose slice
``D[t]`` equals ``(z_t^T kron I_N) R`` for fully observed data.  Normal
equations are accumulated over time slices after whitening each slice by
the inverse Cholesky factor of the innovation covariance, so no N T' sized
Kronecker product is ever formed.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, stats

from .design import (
    LagFeatures,
    ModelOrder,
    ParameterVector,
    SeriesData,
    count_parameters,
    design_from_matrices,
    lag_features,
    param_names,
)
from .errors import DimensionError, InsufficientDataError, SingularityError
from .network import Network

COND_LIMIT = 1e12


def _deficient_columns(A: np.ndarray) -> list[int]:
    zero = np.flatnonzero(np.all(A == 0, axis=0))
    if zero.size:
        return zero.tolist()
    _, r, piv = linalg.qr(A, pivoting=True, mode="economic")
    d = np.abs(np.diag(r))
    tol = d[0] * max(A.shape) * np.finfo(float).eps * 1e3 if d.size else 0.0
    rank = int(np.sum(d > tol))
    return sorted(piv[rank:].tolist())


def _solve_normal(A: np.ndarray, b: np.ndarray):
    """Cholesky solve of ``A x = b``; returns ``(x, factor)``."""
    try:
        fac = linalg.cho_factor(A, lower=True, check_finite=False)
    except linalg.LinAlgError:
        cols = _deficient_columns(A)
        raise SingularityError(f"normal matrix is singular; deficient columns {cols}", cols) from None
    d = np.diag(fac[0])
    if d.size and (d.min() <= 0 or (d.max() / d.min()) ** 2 > 1e14):
        cols = _deficient_columns(A)
        raise SingularityError(f"normal matrix is numerically singular; deficient columns {cols}", cols)
    return linalg.cho_solve(fac, b, check_finite=False), fac


def _masked(D: np.ndarray, y: np.ndarray, mask: np.ndarray | None):
    if mask is None or mask.all():
        return D, y
    m = mask.astype(float)
    return D * m[:, :, None], y * m


def regularized_covariance(sigma: np.ndarray) -> np.ndarray:
    """Add a small ridge when ``sigma`` is ill-conditioned."""
    sigma = 0.5 * (sigma + sigma.T)
    N = sigma.shape[0]
    tr = float(np.trace(sigma))
    if tr <= 0:
        return np.eye(N)
    if np.linalg.cond(sigma) > COND_LIMIT:
        sigma = sigma + 1e-8 * tr / N * np.eye(N)
    return sigma


def whitener(sigma: np.ndarray) -> np.ndarray:
    """``C`` with ``C.T @ C = inv(sigma)`` (after regularisation)."""
    L = linalg.cholesky(regularized_covariance(sigma), lower=True)
    return linalg.solve_triangular(L, np.eye(L.shape[0]), lower=True)


def _whiten(D, y, C):
    if C is None:
        return D, y
    return np.einsum("ij,tjm->tim", C, D), y @ C.T


def gls_design(D: np.ndarray, y: np.ndarray, mask=None, sigma: np.ndarray | None = None):
    """Weighted least squares on a design tensor.

    Returns ``(gamma, residuals, normal_matrix)``; residuals are zero in
    unobserved target cells.
    """
    D0, y0 = _masked(D, y, mask)
    C = None if sigma is None else whitener(sigma)
    Dw, yw = _whiten(D0, y0, C)
    M = D.shape[2]
    X = Dw.reshape(-1, M)
    v = yw.reshape(-1)
    A = X.T @ X
    gamma, _ = _solve_normal(A, X.T @ v)
    resid = y0 - np.einsum("tim,m->ti", D0, gamma)
    return gamma, resid, A


def estimate_sigma_u(residuals: np.ndarray, effective_T: int) -> np.ndarray:
    """``T'^{-1} U U^T`` for residuals laid out N x T'."""
    U = np.asarray(residuals, dtype=float)
    return U @ U.T / effective_T


def _matrix_design(Y, Z, R, masks):
    Y = np.asarray(Y, dtype=float)
    N = Y.shape[0]
    if R.shape[0] != Z.shape[0] * N:
        raise DimensionError(f"R has {R.shape[0]} rows, expected {Z.shape[0] * N}")
    D = design_from_matrices(Z, R, N)
    mask = None if masks is None else np.asarray(masks, bool).T
    return D, Y.T, mask


def fit_ols(Y, Z, R, masks=None):
    """Restricted OLS from the matrix form ``Y = B Z + U`` with ``vec(B) = R gamma``.

    Returns ``(gamma, residuals)`` with residuals laid out N x T'.
    """
    D, y, mask = _matrix_design(Y, Z, R, masks)
    gamma, resid, _ = gls_design(D, y, mask)
    return gamma, resid.T


def fit_fgls(Y, Z, R, sigma_u, masks=None):
    """Restricted GLS with weight ``inv(sigma_u)``, returns ``(gamma, residuals)``."""
    D, y, mask = _matrix_design(Y, Z, R, masks)
    gamma, resid, _ = gls_design(D, y, mask, sigma_u)
    return gamma, resid.T


def asymptotic_covariance(Z, R, sigma_u, effective_T=None, masks=None) -> np.ndarray:
    """``[R^T (Z Z^T kron inv(sigma_u)) R]^{-1}``.

    This is ``T'^{-1} [R^T {(T'^{-1} Z Z^T) kron inv(sigma_u)} R]^{-1}`` written
    without the cancelling factors; ``effective_T`` is accepted for symmetry
    with the matrix-form signature.
    """
    N = sigma_u.shape[0]
    D = design_from_matrices(Z, R, N)
    mask = None if masks is None else np.asarray(masks, bool).T
    return asymptotic_covariance_design(D, mask, sigma_u)


def asymptotic_covariance_design(D, mask, sigma_u) -> np.ndarray:
    D0, _ = _masked(D, np.zeros(D.shape[:2]), mask)
    Dw, _ = _whiten(D0, np.zeros(D.shape[:2]), whitener(sigma_u))
    X = Dw.reshape(-1, D.shape[2])
    A = X.T @ X
    try:
        return linalg.inv(A)
    except linalg.LinAlgError:
        cols = _deficient_columns(A)
        raise SingularityError(f"information matrix is singular; deficient columns {cols}", cols) from None


def hc2_covariance_design(D, resid, mask=None, sigma_u=None):
    """HC2 sandwich covariance for the (optionally whitened) stacked regression.

    Rows whose leverage is numerically one are dropped from the meat with a
    warning.  Returns ``(cov, n_excluded)``.
    """
    D0, r0 = _masked(D, resid, mask)
    C = None if sigma_u is None else whitener(sigma_u)
    Dw, rw = _whiten(D0, r0, C)
    M = D.shape[2]
    X = Dw.reshape(-1, M)
    u = rw.reshape(-1)
    bread = linalg.inv(X.T @ X)
    h = np.einsum("km,mn,kn->k", X, bread, X)
    bad = h >= 1.0 - 1e-10
    n_bad = int(bad.sum())
    if n_bad:
        warnings.warn(f"{n_bad} rows with leverage 1 excluded from HC2 covariance", RuntimeWarning, stacklevel=2)
    scale = np.zeros_like(u)
    scale[~bad] = u[~bad] ** 2 / (1.0 - h[~bad])
    meat = (X * scale[:, None]).T @ X
    return bread @ meat @ bread, n_bad


def hc2_standard_errors(Z, R, residuals, masks=None, sigma_u=None, gamma=None):
    """HC2 standard errors and two-sided normal p-values (if ``gamma`` is given)."""
    residuals = np.asarray(residuals, dtype=float)
    N = residuals.shape[0]
    D = design_from_matrices(Z, R, N)
    mask = None if masks is None else np.asarray(masks, bool).T
    cov, _ = hc2_covariance_design(D, residuals.T, mask, sigma_u)
    se = np.sqrt(np.diag(cov))
    pv = None if gamma is None else p_values(gamma, se)
    return se, pv


def p_values(gamma, se) -> np.ndarray:
    z = np.divide(np.abs(gamma), se, out=np.full(len(se), np.inf), where=se > 0)
    return 2.0 * stats.norm.sf(z)


@dataclass(eq=False)
class FitResult:
    """Outcome of the OLS -> covariance -> FGLS sequence.

    ``sigma_u`` is the covariance of the first-stage OLS residuals that
    weights the FGLS step; ``residuals`` (N x T') are from the final FGLS
    fit, zero where the target is unobserved.
    """

    order: ModelOrder
    nodes: tuple[str, ...]
    gamma: np.ndarray
    gamma_ols: np.ndarray
    sigma_u: np.ndarray
    residuals: np.ndarray
    residual_mask: np.ndarray
    effective_T: int
    start: int
    se_asymptotic: np.ndarray | None = None
    se_hc2: np.ndarray | None = None
    cov_asymptotic: np.ndarray | None = None
    hc2_excluded: int = 0
    names: list[str] = field(default_factory=list)

    @property
    def N(self) -> int:
        return len(self.nodes)

    @property
    def M(self) -> int:
        return len(self.gamma)

    @property
    def params(self) -> ParameterVector:
        return ParameterVector.from_gamma(self.order, self.gamma, self.N)

    @property
    def sigma_resid(self) -> np.ndarray:
        return estimate_sigma_u(self.residuals, self.effective_T)

    @property
    def n_obs(self) -> int:
        return int(self.residual_mask.sum())

    @property
    def p_values(self) -> np.ndarray | None:
        if self.se_hc2 is None:
            return None
        return p_values(self.gamma, self.se_hc2)

    @property
    def loglik_proxy(self) -> float:
        """Gaussian log-likelihood evaluated at the residual covariance."""
        sign, logdet = np.linalg.slogdet(self.sigma_resid)
        if sign <= 0:
            return float("inf")
        N, T = self.N, self.effective_T
        return float(-0.5 * T * (N * np.log(2 * np.pi) + logdet + N))

    def to_dict(self) -> dict:
        rows = []
        pv = self.p_values
        for k, name in enumerate(self.names):
            rows.append({
                "name": name,
                "estimate": float(self.gamma[k]),
                "se_asymptotic": None if self.se_asymptotic is None else float(self.se_asymptotic[k]),
                "se_hc2": None if self.se_hc2 is None else float(self.se_hc2[k]),
                "p_value": None if pv is None else float(pv[k]),
            })
        return {
            "order": self.order.to_dict(),
            "label": self.order.label(),
            "nodes": list(self.nodes),
            "effective_T": self.effective_T,
            "n_params": self.M,
            "parameters": rows,
            "sigma_u": self.sigma_u.tolist(),
        }


def fit(order: ModelOrder, net: Network, data: SeriesData, start: int | None = None,
        features: LagFeatures | None = None, covariances: bool = True) -> FitResult:
    """Estimate a GNARX model by one feasible GLS step.

    Parameters
    ----------
    order : ModelOrder
    net : Network
    data : SeriesData
    start : int, optional
        First target time index (0-based).  Defaults to ``order.p_star``;
        a later start lets several orders share one estimation sample.
    features : LagFeatures, optional
        Precomputed lag features for the same targets (used by model search).
    covariances : bool
        Skip standard errors when False.
    """
    if features is None:
        start = order.p_star if start is None else start
        if start < order.p_star:
            raise DimensionError(f"estimation start {start} precedes the maximum lag {order.p_star}")
        if data.T <= start:
            raise InsufficientDataError(f"need more than {start} time points for {order.label()}, have {data.T}")
        features = lag_features(data, net, start)
    else:
        start = int(features.targets[0])
    D = features.design(order)
    y, mask = features.y, features.mask
    if mask.sum() < count_parameters(order, data.N):
        raise InsufficientDataError(f"{mask.sum()} observed targets cannot identify {count_parameters(order, data.N)} parameters")
    T_eff = D.shape[0]

    g_ols, r_ols, _ = gls_design(D, y, mask)
    sigma = estimate_sigma_u(r_ols.T, T_eff)
    g, resid, _ = gls_design(D, y, mask, sigma)

    res = FitResult(
        order=order,
        nodes=data.nodes,
        gamma=g,
        gamma_ols=g_ols,
        sigma_u=sigma,
        residuals=resid.T,
        residual_mask=mask.T,
        effective_T=T_eff,
        start=start,
        names=param_names(order, data.nodes),
    )
    if covariances:
        cov = asymptotic_covariance_design(D, mask, sigma)
        res.cov_asymptotic = cov
        res.se_asymptotic = np.sqrt(np.diag(cov))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            hc2, n_bad = hc2_covariance_design(D, resid, mask, sigma)
        for w in caught:
            warnings.warn(w.message, w.category, stacklevel=2)
        res.se_hc2 = np.sqrt(np.diag(hc2))
        res.hc2_excluded = n_bad
    return res


def fitted_values(res: FitResult, net: Network, data: SeriesData) -> np.ndarray:
    """In-sample one-step predictions (N x T') using the fitted parameters."""
    feats = lag_features(data, net, res.start)
    return np.einsum("tim,m->it", feats.design(res.order), res.gamma)
