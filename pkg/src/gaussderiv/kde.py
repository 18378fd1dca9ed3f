"""Gaussian-kernel V-statistics and bandwidth-selection criteria.

The building block is the scalar functional ``eta_{r,s}(x; B, Sigma)``: the
order-``2r+2s`` derivative of the centred Gaussian density contracted with
``r`` copies of ``vec(I)`` and ``s`` copies of ``vec(B)``.  It admits two
evaluations: the *direct* one materializes the ``d**(2r+2s)`` derivative
vector, while the *bridge* rewrites it as the density times a mixed
quadratic-form moment with shifted parameters, which costs only small dense
linear algebra per point.

Pairwise sums ``sum_{i,j} eta(X_i - X_j; ...)`` are what the bandwidth
criteria spend their time on.  The cumulant path decouples every pairwise
quadratic form ``delta' W delta`` into per-point Gram quantities, so the
double sum streams over ``i`` with O(n d) memory per matrix power and never
holds an ``n^2`` array.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .caps import DEFAULT_VECTOR_CAP, checked_length
from .hermite import (
    _check_symmetric,
    as_gaussian,
    gaussian_derivative,
    gaussian_derivative_batch,
)
from .kron import kron_seq
from .quadform import nu_joint, nu_single

ETA_METHODS = ("direct", "nu_bridge")
VSTAT_METHODS = ("direct", "cumulant")
CRITERIA = ("CV", "PI", "SCV")

_PAIR_CHUNK = 256


def validate_sample(data) -> np.ndarray:
    """Check an ``(n, d)`` sample matrix: finite entries, at least one row."""
    data = np.asarray(data, dtype=float)
    if data.ndim == 1:
        data = data[:, None]
    if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
        raise ValueError(f"expected an (n, d) sample matrix, got shape {data.shape}")
    if not np.all(np.isfinite(data)):
        raise ValueError("sample matrix contains non-finite entries")
    return data


def _contraction_vector(d: int, b_mat: np.ndarray | None, r: int, s: int) -> np.ndarray:
    factors = [np.eye(d).reshape(-1)] * r
    if s:
        factors += [b_mat.T.reshape(-1)] * s
    return kron_seq(factors)


def eta(
    x,
    b_mat,
    sigma,
    r: int,
    s: int = 0,
    method: str = "nu_bridge",
    *,
    cap: int = DEFAULT_VECTOR_CAP,
) -> float:
    """Contracted derivative functional at a single point.

    ``b_mat`` is ignored when ``s = 0`` (the pure-trace functional).
    """
    if r < 0 or s < 0:
        raise ValueError(f"need r, s >= 0, got ({r}, {s})")
    params = as_gaussian(sigma)
    d = params.dim
    x = np.asarray(x, dtype=float).reshape(-1)
    b_mat = np.eye(d) if b_mat is None else _check_symmetric(b_mat, "B")
    if method == "direct":
        order = 2 * (r + s)
        checked_length(d, order, cap)
        w = _contraction_vector(d, b_mat, r, s)
        return float(w @ gaussian_derivative(x, params, order, method="direct", cap=cap))
    if method == "nu_bridge":
        phi = float(params.density(x + params.mean))  # centred density at x
        mu_shift = params.inv @ x
        if s == 0:
            nu = nu_single(np.eye(d), mu_shift, -params.inv, r)
        else:
            nu = nu_joint(np.eye(d), b_mat, mu_shift, -params.inv, r, s)
        return phi * nu
    raise ValueError(f"unknown method {method!r}; expected one of {ETA_METHODS}")


def _mp_matrix_sum(f1: np.ndarray, f2: np.ndarray, a: int, b: int) -> np.ndarray:
    """Sum of products over all interleavings of ``a`` copies of f1, ``b`` of f2."""
    d = f1.shape[0]
    total = np.zeros((d, d))

    def rec(prefix: np.ndarray, a_left: int, b_left: int) -> None:
        nonlocal total
        if a_left == 0 and b_left == 0:
            total += prefix
            return
        if a_left:
            rec(prefix @ f1, a_left - 1, b_left)
        if b_left:
            rec(prefix @ f2, a_left, b_left - 1)

    rec(np.eye(d), a, b)
    return total


class _PairwiseEtaSum:
    """Streaming evaluator of ``sum_{i,j} eta_{r,s}(X_i - X_j; B, Sigma)``.

    Every pairwise cumulant is affine in one quadratic form
    ``delta' W_{a,b} delta`` with a precomputable symmetric matrix, and each
    quadratic form splits into per-point Gram terms, so a row of the double
    sum costs one ``(n, d)`` matrix-vector product per matrix.

    The inner moment recursion runs on whole rows at once; summation order is
    ``i`` ascending with ``j`` handled by NumPy reductions, which is
    deterministic for fixed shapes.
    """

    def __init__(self, data: np.ndarray, b_mat: np.ndarray | None, sigma, r: int, s: int):
        params = as_gaussian(sigma)
        d = params.dim
        data = validate_sample(data)
        if data.shape[1] != d:
            raise ValueError(f"data has {data.shape[1]} columns, covariance is {d}x{d}")
        self.params = params
        self.data = data
        self.r, self.s = r, s
        b_mat = np.eye(d) if b_mat is None else _check_symmetric(b_mat, "B")
        inv = params.inv
        f1 = -inv
        f2 = -(b_mat @ inv)
        # kappa_{a,b} per pair = const[a,b] + delta' W[a,b] delta
        self.const: dict[tuple[int, int], float] = {}
        mats: dict[tuple[int, int], np.ndarray] = {}
        for a in range(r + 1):
            for b in range(s + 1):
                if a + b == 0:
                    continue
                coeff = 2.0 ** (a + b - 1) * math.factorial(a) * math.factorial(b)
                g = _mp_matrix_sum(f1, f2, a, b)
                self.const[a, b] = coeff * float(np.trace(g)) / (a + b)
                w = -coeff * (inv @ g)
                mats[a, b] = (w + w.T) / 2.0
        mats["phi"] = inv
        # Gram precomputation: one (n, d) product and one (n,) diagonal per matrix.
        self.keys = list(mats.keys())
        self.yw = {k: data @ mats[k] for k in self.keys}
        self.diag = {k: np.einsum("nd,nd->n", self.yw[k], data) for k in self.keys}
        self.norm = math.exp(-0.5 * (d * math.log(2.0 * math.pi) + params.log_det))

    def row_values(self, i: int) -> np.ndarray:
        """``eta`` against every ``j`` for one fixed ``i``."""
        data = self.data
        r, s = self.r, self.s
        q = {}
        for k in self.keys:
            cross = data @ self.yw[k][i]
            q[k] = self.diag[k][i] + self.diag[k] - 2.0 * cross
        phi_row = self.norm * np.exp(-0.5 * q["phi"])
        n = data.shape[0]
        nus: dict[tuple[int, int], np.ndarray] = {(0, 0): np.ones(n)}
        kappas = {k: self.const[k] + q[k] for k in self.const}
        for a in range(1, r + 1):
            nus[a, 0] = sum(
                math.comb(a - 1, i2) * kappas[a - i2, 0] * nus[i2, 0] for i2 in range(a)
            )
        for b in range(1, s + 1):
            for a in range(r + 1):
                nus[a, b] = sum(
                    math.comb(a, i2) * math.comb(b - 1, j2) * kappas[a - i2, b - j2] * nus[i2, j2]
                    for i2 in range(a + 1)
                    for j2 in range(b)
                )
        return phi_row * nus[r, s]

    def total(self, include_diag: bool = True) -> float:
        acc = 0.0
        for i in range(self.data.shape[0]):
            row = self.row_values(i)
            acc += float(row.sum())
            if not include_diag:
                acc -= float(row[i])
        return acc


def _pair_sum_direct(
    data: np.ndarray,
    b_mat: np.ndarray | None,
    sigma,
    r: int,
    s: int,
    include_diag: bool = True,
    *,
    cap: int = DEFAULT_VECTOR_CAP,
    chunk: int = _PAIR_CHUNK,
) -> float:
    """Reference pairwise sum evaluating the full derivative vector per pair."""
    params = as_gaussian(sigma)
    d = params.dim
    data = validate_sample(data)
    order = 2 * (r + s)
    checked_length(d, order, cap)
    b_mat = np.eye(d) if b_mat is None else _check_symmetric(b_mat, "B")
    w = _contraction_vector(d, b_mat, r, s)
    n = data.shape[0]
    acc = 0.0
    for i in range(n):
        diffs = data[i] - data
        row_acc = 0.0
        for lo in range(0, n, chunk):
            block = diffs[lo : lo + chunk]
            derivs = gaussian_derivative_batch(block, params, order, cap=cap)
            vals = derivs @ w
            if not include_diag and lo <= i < lo + block.shape[0]:
                vals = np.delete(vals, i - lo)
            row_acc += float(vals.sum())
        acc += row_acc
    return acc


def vstat_q(
    data,
    sigma,
    r: int,
    method: str = "cumulant",
    *,
    cap: int = DEFAULT_VECTOR_CAP,
) -> float:
    """Degree-two V-statistic ``n^{-2} sum_{i,j} eta_r(X_i - X_j; Sigma)``."""
    data = validate_sample(data)
    n = data.shape[0]
    if method == "direct":
        total = _pair_sum_direct(data, None, sigma, r, 0, cap=cap)
    elif method == "cumulant":
        total = _PairwiseEtaSum(data, None, sigma, r, 0).total()
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {VSTAT_METHODS}")
    return total / n**2


def psi_hat(
    data,
    g_mat,
    s: int,
    *,
    cap: int = DEFAULT_VECTOR_CAP,
    chunk: int = _PAIR_CHUNK,
) -> np.ndarray:
    """Averaged order-``s`` derivative vector over all ordered sample pairs."""
    if s % 2 != 0:
        raise ValueError(f"the derivative order must be even, got {s}")
    params = as_gaussian(g_mat)
    data = validate_sample(data)
    d = params.dim
    checked_length(d, s, cap)
    n = data.shape[0]
    acc = np.zeros(d**s)
    for i in range(n):
        diffs = data[i] - data
        for lo in range(0, n, chunk):
            acc += gaussian_derivative_batch(diffs[lo : lo + chunk], params, s, cap=cap).sum(axis=0)
    return acc / n**2


def _leading_term(d: int, r: int, h_mat: np.ndarray, n: int) -> float:
    h_params = as_gaussian(h_mat)
    det_root = math.exp(-0.5 * h_params.log_det)
    nu = nu_single(h_params.inv, np.zeros(d), np.eye(d), r)
    return 2.0 ** (-(d + r)) * math.pi ** (-d / 2.0) * det_root * nu / n


def cv_criterion(data, h_mat, r: int) -> float:
    """Cross-validation criterion: paired sums at doubled and plain bandwidth."""
    data = validate_sample(data)
    n = data.shape[0]
    if n < 2:
        raise ValueError("cross-validation needs at least two observations")
    h_mat = np.asarray(h_mat, dtype=float)
    term1 = _PairwiseEtaSum(data, None, 2.0 * h_mat, r, 0).total() / n**2
    term2 = _PairwiseEtaSum(data, None, h_mat, r, 0).total(include_diag=False)
    term2 *= 2.0 / (n * (n - 1))
    return (-1.0) ** r * (term1 - term2)


def pi_criterion(data, h_mat, g_mat, r: int) -> float:
    """Plug-in criterion: exact leading term plus the pilot double sum."""
    data = validate_sample(data)
    n, d = data.shape
    h_mat = _check_symmetric(h_mat, "H")
    pair = _PairwiseEtaSum(data, h_mat, g_mat, r, 2).total() / n**2
    return _leading_term(d, r, h_mat, n) + (-1.0) ** r / 4.0 * pair


def scv_criterion(data, h_mat, g_mat, r: int) -> float:
    """Smoothed cross-validation: leading term plus three shifted-scale sums."""
    data = validate_sample(data)
    n, d = data.shape
    h_mat = _check_symmetric(h_mat, "H")
    g_mat = _check_symmetric(g_mat, "G")
    sums = (
        _PairwiseEtaSum(data, None, 2.0 * h_mat + 2.0 * g_mat, r, 0).total()
        - 2.0 * _PairwiseEtaSum(data, None, h_mat + 2.0 * g_mat, r, 0).total()
        + _PairwiseEtaSum(data, None, 2.0 * g_mat, r, 0).total()
    )
    return _leading_term(d, r, h_mat, n) + (-1.0) ** r * sums / n**2


def normal_scale_bandwidth(data) -> np.ndarray:
    """Normal-reference bandwidth matrix scaled from the sample covariance."""
    data = validate_sample(data)
    n, d = data.shape
    if n < 2:
        raise ValueError("need at least two observations for a scale estimate")
    cov = np.atleast_2d(np.cov(data, rowvar=False))
    return (4.0 / ((d + 2) * n)) ** (2.0 / (d + 4)) * cov


def _theta_to_h(theta: np.ndarray, d: int) -> np.ndarray:
    lower = np.zeros((d, d))
    lower[np.diag_indices(d)] = np.exp(theta[:d])
    if d > 1:
        lower[np.tril_indices(d, -1)] = theta[d:]
    return lower @ lower.T


def _h_to_theta(h_mat: np.ndarray) -> np.ndarray:
    lower = np.linalg.cholesky(h_mat)
    d = h_mat.shape[0]
    theta = np.concatenate([np.log(np.diag(lower)), lower[np.tril_indices(d, -1)]])
    return theta


@dataclass(frozen=True)
class BandwidthSelection:
    """Result of a criterion minimization over SPD bandwidth matrices."""

    h_mat: np.ndarray = field(compare=False)
    criterion: str = "CV"
    r: int = 0
    value: float = math.nan
    converged: bool = False
    iterations: int = 0
    evaluations: int = 0
    final_simplex_spread: float = math.nan
    message: str = ""


def select_bandwidth(
    data,
    r: int,
    criterion: str = "CV",
    g_mat=None,
    init=None,
    *,
    max_iter: int | None = None,
    xatol: float = 1e-4,
    fatol: float = 1e-8,
) -> BandwidthSelection:
    """Minimize a bandwidth criterion by simplex search on Cholesky-log factors.

    The search space is the ``d (d + 1) / 2`` free entries of the Cholesky
    factor with logged diagonal, so every iterate is SPD by construction.
    Deterministic given ``init`` (default: the normal-scale matrix); on
    failure to converge the best visited point is still returned, flagged in
    ``converged``/``message``.
    """
    data = validate_sample(data)
    n, d = data.shape
    if n < 2:
        raise ValueError("bandwidth selection needs at least two observations")
    if criterion not in CRITERIA:
        raise ValueError(f"unknown criterion {criterion!r}; expected one of {CRITERIA}")
    if criterion in ("PI", "SCV"):
        g_mat = normal_scale_bandwidth(data) if g_mat is None else _check_symmetric(g_mat, "G")
    h0 = normal_scale_bandwidth(data) if init is None else _check_symmetric(init, "init")
    theta0 = _h_to_theta(h0)

    def objective(theta: np.ndarray) -> float:
        h_mat = _theta_to_h(theta, d)
        try:
            if criterion == "CV":
                return cv_criterion(data, h_mat, r)
            if criterion == "PI":
                return pi_criterion(data, h_mat, g_mat, r)
            return scv_criterion(data, h_mat, g_mat, r)
        except (ValueError, FloatingPointError, np.linalg.LinAlgError):
            return 1e300

    result = optimize.minimize(
        objective,
        theta0,
        method="Nelder-Mead",
        options={
            "xatol": xatol,
            "fatol": fatol,
            "maxiter": max_iter if max_iter is not None else 400 * theta0.size,
        },
    )
    best_theta, best_value = result.x, float(result.fun)
    f0 = objective(theta0)
    if f0 < best_value:
        best_theta, best_value = theta0, f0
    spread = float(np.max(np.abs(result.final_simplex[0] - result.final_simplex[0][0])))
    return BandwidthSelection(
        h_mat=_theta_to_h(best_theta, d),
        criterion=criterion,
        r=r,
        value=best_value,
        converged=bool(result.success),
        iterations=int(result.nit),
        evaluations=int(result.nfev),
        final_simplex_spread=spread,
        message=str(result.message),
    )
