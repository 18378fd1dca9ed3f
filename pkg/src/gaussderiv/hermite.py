"""Vector Hermite polynomials and Gaussian density derivatives.

The order-``r`` derivative of a centred Gaussian density factorizes into the
density times a polynomial vector of length ``d**r``.  Three routes to that
vector are implemented and must agree:

* ``direct`` -- evaluate the defining polynomial sum and symmetrize;
* ``full_recursive`` -- raise the order one step at a time on the full
  ``d**k`` vectors;
* ``unique`` -- recurse only on the ``C(r+d-1, r)`` distinct coordinates and
  scatter them into the full layout at the end.

The scale matrix of the polynomial only has to be symmetric and invertible,
not positive definite; several callers deliberately pass negated inverses of
covariances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .caps import DEFAULT_VECTOR_CAP, checked_length
from .indexing import UniqueOrdering, unique_count, unique_ordering
from .kron import kron2, kron2_batch
from .symvec import symv_recursive

_SYM_TOL = 1e-12


def _check_symmetric(mat: np.ndarray, name: str) -> np.ndarray:
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{name} must be square, got shape {mat.shape}")
    scale = max(1.0, float(np.abs(mat).max()))
    if np.abs(mat - mat.T).max() > _SYM_TOL * scale:
        raise ValueError(f"{name} is not symmetric within {_SYM_TOL}")
    return (mat + mat.T) / 2.0


@dataclass(frozen=True)
class GaussianParams:
    """Mean and SPD covariance with cached factorization quantities."""

    mean: np.ndarray = field(compare=False)
    cov: np.ndarray = field(compare=False)
    chol: np.ndarray = field(repr=False, compare=False)
    inv: np.ndarray = field(repr=False, compare=False)
    log_det: float = 0.0

    @classmethod
    def from_moments(cls, mean, cov) -> "GaussianParams":
        cov = _check_symmetric(cov, "covariance")
        mean = np.asarray(mean, dtype=float).reshape(-1)
        if mean.shape[0] != cov.shape[0]:
            raise ValueError(
                f"mean has length {mean.shape[0]} but covariance is {cov.shape[0]}x{cov.shape[1]}"
            )
        try:
            chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise ValueError("covariance is not positive definite") from exc
        inv = linalg.cho_solve((chol, True), np.eye(cov.shape[0]))
        log_det = 2.0 * float(np.sum(np.log(np.diag(chol))))
        return cls(mean=mean, cov=cov, chol=chol, inv=inv, log_det=log_det)

    @property
    def dim(self) -> int:
        return self.cov.shape[0]

    def log_density(self, x: np.ndarray) -> np.ndarray:
        """Log density at ``x`` (last axis is the coordinate axis)."""
        x = np.asarray(x, dtype=float)
        delta = x - self.mean
        z = linalg.solve_triangular(self.chol, delta.reshape(-1, self.dim).T, lower=True)
        quad = np.sum(z * z, axis=0).reshape(delta.shape[:-1])
        return -0.5 * (self.dim * math.log(2.0 * math.pi) + self.log_det + quad)

    def density(self, x: np.ndarray) -> np.ndarray:
        return np.exp(self.log_density(x))


def as_gaussian(sigma, mean=None) -> GaussianParams:
    """Wrap a covariance (and optional mean) into :class:`GaussianParams`."""
    if isinstance(sigma, GaussianParams):
        return sigma
    sigma = np.asarray(sigma, dtype=float)
    if mean is None:
        mean = np.zeros(sigma.shape[0])
    return GaussianParams.from_moments(mean, sigma)


@dataclass(frozen=True)
class ScaleMatrix:
    """Symmetric invertible scale of the polynomial; may be indefinite."""

    matrix: np.ndarray = field(compare=False)
    inv: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def from_matrix(cls, mat) -> "ScaleMatrix":
        mat = _check_symmetric(mat, "scale matrix")
        try:
            inv = np.linalg.inv(mat)
        except np.linalg.LinAlgError as exc:
            raise ValueError("scale matrix is singular") from exc
        if not np.all(np.isfinite(inv)):
            raise ValueError("scale matrix is numerically singular")
        return cls(matrix=mat, inv=inv)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _as_scale(theta) -> ScaleMatrix:
    if isinstance(theta, ScaleMatrix):
        return theta
    if isinstance(theta, GaussianParams):
        return ScaleMatrix(matrix=theta.cov, inv=theta.inv)
    return ScaleMatrix.from_matrix(theta)


def _poly_term_coeff(r: int, j: int, sign: float) -> float:
    return sign**j / (math.factorial(j) * math.factorial(r - 2 * j) * 2**j)


def hermite_poly_sum(x: np.ndarray, theta_vec: np.ndarray, r: int, sign: float) -> np.ndarray:
    """The unsymmetrized polynomial sum over paired-slot contributions."""
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    xpows = [np.ones(1)]
    for _ in range(r):
        xpows.append(kron2(xpows[-1], x))
    out = np.zeros(d**r)
    vpow = np.ones(1)
    for j in range(r // 2 + 1):
        if j > 0:
            vpow = kron2(vpow, theta_vec)
        out += _poly_term_coeff(r, j, sign) * kron2(xpows[r - 2 * j], vpow)
    return out


def hermite_direct(x, theta, r: int, *, cap: int = DEFAULT_VECTOR_CAP) -> np.ndarray:
    """Order-``r`` polynomial vector at ``x`` by the defining sum."""
    scale = _as_scale(theta)
    x = np.asarray(x, dtype=float).reshape(-1)
    d = scale.dim
    checked_length(d, r, cap)
    if r == 0:
        return np.ones(1)
    inner = hermite_poly_sum(x, scale.matrix.T.reshape(-1), r, sign=-1.0)
    return math.factorial(r) * symv_recursive(inner, d, r, cap=cap)


def scaled_hermite_recursive(x, theta, r: int, *, cap: int = DEFAULT_VECTOR_CAP) -> np.ndarray:
    """Inverse-scaled polynomial vector by the order-raising recurrence.

    Returns the ``r``-fold inverse Kronecker power applied to the order-``r``
    polynomial; orders 0 and 1 seed the recursion as ``1`` and ``inv @ x``.
    """
    scale = _as_scale(theta)
    x = np.asarray(x, dtype=float).reshape(-1)
    d = scale.dim
    checked_length(d, r, cap)
    if r == 0:
        return np.ones(1)
    v = scale.inv @ x
    vec_inv = scale.inv.T.reshape(-1)
    prev2 = np.ones(1)
    prev = v.copy()
    if r == 1:
        return prev
    for k in range(2, r + 1):
        grown = kron2(v, prev) - (k - 1) * kron2(vec_inv, prev2)
        prev2 = prev
        prev = symv_recursive(grown, d, k, cap=cap)
    return prev


@dataclass(frozen=True)
class UniqueHermite:
    """The distinct polynomial coordinates of one order, in canonical order."""

    order: int
    values: np.ndarray = field(repr=False, compare=False)


def hermite_unique_step(
    prev: UniqueHermite, prev2: UniqueHermite, z: np.ndarray, v_mat: np.ndarray
) -> UniqueHermite:
    """One order-raising step on unique coordinates.

    ``z`` must be the inverse scale applied to the evaluation point and
    ``v_mat`` the inverse scale itself.  The output is assembled in canonical
    order by blocks: coordinate ``j`` is raised on the trailing block of
    classes whose first ``j - 1`` counts vanish (for those, the sum over
    lowered classes starts at ``j``), and the final coordinate closes the
    last slot.  Classes with a zero count contribute nothing for that term,
    so no lookup below the base order is ever needed.
    """
    z = np.asarray(z, dtype=float).reshape(-1)
    d = z.shape[0]
    r = prev.order
    if prev2.order != r - 1:
        raise ValueError(f"order mismatch: prev has order {r}, prev2 has order {prev2.order}")
    ord_r = unique_ordering(d, r)
    ord_prev = unique_ordering(d, r - 1)
    n_out = unique_count(d, r + 1)
    out = np.empty(n_out)
    pos = 0
    n_r = len(ord_r)
    for j in range(1, d):
        start = n_r - unique_count(d - j + 1, r)
        for t in range(start, n_r):
            m = ord_r.multi_indices[t]
            val = z[j - 1] * prev.values[t]
            for k in range(j, d + 1):
                mk = m[k - 1]
                if mk:
                    lowered = m[: k - 1] + (mk - 1,) + m[k:]
                    val -= v_mat[j - 1, k - 1] * mk * prev2.values[ord_prev.position(lowered)]
            out[pos] = val
            pos += 1
    out[pos] = z[d - 1] * prev.values[-1] - v_mat[d - 1, d - 1] * r * prev2.values[-1]
    if pos + 1 != n_out:
        raise AssertionError("block schedule did not fill the output exactly")
    return UniqueHermite(order=r + 1, values=out)


def hermite_unique(x, theta, r: int) -> UniqueHermite:
    """Unique coordinates of the inverse-scaled order-``r`` polynomial."""
    scale = _as_scale(theta)
    x = np.asarray(x, dtype=float).reshape(-1)
    z = scale.inv @ x
    if r == 0:
        return UniqueHermite(order=0, values=np.ones(1))
    prev2 = UniqueHermite(order=0, values=np.ones(1))
    prev = UniqueHermite(order=1, values=z.copy())
    for _ in range(2, r + 1):
        prev, prev2 = hermite_unique_step(prev, prev2, z, scale.inv), prev
    return prev


def expand_unique(
    u: UniqueHermite, ordering: UniqueOrdering, *, cap: int = DEFAULT_VECTOR_CAP
) -> np.ndarray:
    """Scatter unique coordinates into the full ``d**r`` layout."""
    checked_length(ordering.d, ordering.r, cap)
    if ordering.r != u.order:
        raise ValueError(f"ordering has order {ordering.r}, values have order {u.order}")
    if len(u.values) != len(ordering):
        raise ValueError("unique vector length does not match the ordering")
    return np.asarray(u.values, dtype=float)[ordering.expansion]


DERIVATIVE_METHODS = ("direct", "full_recursive", "unique")


def gaussian_derivative(
    x,
    sigma,
    r: int,
    method: str = "unique",
    *,
    cap: int = DEFAULT_VECTOR_CAP,
) -> np.ndarray:
    """Order-``r`` derivative vector of the centred Gaussian density at ``x``.

    ``sigma`` may be a covariance matrix or :class:`GaussianParams`; the mean
    is ignored (the density is centred).  All three methods return the same
    vector up to floating rounding.
    """
    params = as_gaussian(sigma)
    x = np.asarray(x, dtype=float).reshape(-1)
    d = params.dim
    checked_length(d, r, cap)
    centred = GaussianParams(
        mean=np.zeros(d), cov=params.cov, chol=params.chol, inv=params.inv, log_det=params.log_det
    )
    phi = float(centred.density(x))
    scale = ScaleMatrix(matrix=params.cov, inv=params.inv)
    if method == "direct":
        from .kron import apply_kron_power

        u = apply_kron_power(params.inv, hermite_direct(x, scale, r, cap=cap), r)
    elif method == "full_recursive":
        u = scaled_hermite_recursive(x, scale, r, cap=cap)
    elif method == "unique":
        u = expand_unique(hermite_unique(x, scale, r), unique_ordering(d, r), cap=cap)
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {DERIVATIVE_METHODS}")
    return (-1.0) ** r * phi * u


def hermite_poly_sum_batch(xb: np.ndarray, theta_vec: np.ndarray, r: int, sign: float) -> np.ndarray:
    """Row-wise :func:`hermite_poly_sum` for a batch shaped ``(m, d)``."""
    xb = np.asarray(xb, dtype=float)
    m, d = xb.shape
    out = np.zeros((m, d**r))
    xpow = {0: np.ones((m, 1))}
    acc = np.ones((m, 1))
    for k in range(1, r + 1):
        acc = kron2_batch(acc, xb)
        xpow[k] = acc
    vpow = np.ones(1)
    for j in range(r // 2 + 1):
        if j > 0:
            vpow = kron2(vpow, theta_vec)
        xp = xpow[r - 2 * j]
        term = np.einsum("mp,c->mcp", xp, vpow).reshape(m, -1)
        out += _poly_term_coeff(r, j, sign) * term
    return out


def gaussian_derivative_batch(
    xb: np.ndarray,
    sigma,
    r: int,
    *,
    cap: int = DEFAULT_VECTOR_CAP,
) -> np.ndarray:
    """Direct-method derivative vectors for a batch of points, ``(m, d**r)``."""
    from .kron import apply_kron_power_batch

    params = as_gaussian(sigma)
    d = params.dim
    checked_length(d, r, cap)
    xb = np.asarray(xb, dtype=float).reshape(-1, d)
    centred = GaussianParams(
        mean=np.zeros(d), cov=params.cov, chol=params.chol, inv=params.inv, log_det=params.log_det
    )
    phi = centred.density(xb)
    if r == 0:
        return phi[:, None].copy()
    inner = hermite_poly_sum_batch(xb, params.cov.T.reshape(-1), r, sign=-1.0)
    herm = math.factorial(r) * symv_recursive(inner, d, r, cap=cap)
    u = apply_kron_power_batch(params.inv, herm, r)
    return (-1.0) ** r * phi[:, None] * u


__all__ = [
    "GaussianParams",
    "ScaleMatrix",
    "UniqueHermite",
    "as_gaussian",
    "hermite_direct",
    "scaled_hermite_recursive",
    "hermite_unique",
    "hermite_unique_step",
    "expand_unique",
    "gaussian_derivative",
    "gaussian_derivative_batch",
    "DERIVATIVE_METHODS",
]
