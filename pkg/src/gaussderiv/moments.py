"""Raw vector moments of a multivariate normal distribution.

The order-``r`` moment vector stacks every product moment
``E[X_{i_1} ... X_{i_r}]`` in the package's coordinate layout.  Two routes:
the explicit symmetrized polynomial sum in ``(mean, cov)``, and evaluating
the Hermite polynomial at the mean with the negated covariance as scale.  The
identity behind the second route holds even though the negated covariance is
negative definite, so ``cov`` here only has to be symmetric.
"""

from __future__ import annotations

import math

import numpy as np

from .caps import DEFAULT_VECTOR_CAP, checked_length
from .hermite import ScaleMatrix, _check_symmetric, hermite_direct, hermite_poly_sum
from .indexing import linear_index
from .symvec import symv_recursive

MOMENT_METHODS = ("explicit", "hermite")


def moment_vector(
    mu,
    sigma,
    r: int,
    method: str = "explicit",
    *,
    cap: int = DEFAULT_VECTOR_CAP,
) -> np.ndarray:
    """All order-``r`` product moments of ``N(mu, sigma)`` as one vector."""
    sigma = _check_symmetric(sigma, "covariance")
    mu = np.asarray(mu, dtype=float).reshape(-1)
    d = sigma.shape[0]
    if mu.shape[0] != d:
        raise ValueError(f"mean has length {mu.shape[0]}, covariance is {d}x{d}")
    checked_length(d, r, cap)
    if method == "explicit":
        if r == 0:
            return np.ones(1)
        inner = hermite_poly_sum(mu, sigma.T.reshape(-1), r, sign=1.0)
        return math.factorial(r) * symv_recursive(inner, d, r, cap=cap)
    if method == "hermite":
        return hermite_direct(mu, ScaleMatrix.from_matrix(-sigma), r, cap=cap)
    raise ValueError(f"unknown method {method!r}; expected one of {MOMENT_METHODS}")


def scalar_moment(mu, sigma, tup, *, cap: int = DEFAULT_VECTOR_CAP) -> float:
    """Single product moment ``E[X_{i_1} ... X_{i_r}]`` for a tuple of coordinates."""
    sigma = np.asarray(sigma, dtype=float)
    d = sigma.shape[0]
    vec = moment_vector(mu, sigma, len(tup), cap=cap)
    return float(vec[linear_index(tup, d) - 1])
