"""Moments and cumulants of quadratic forms in Gaussian vectors.

For ``X ~ N(mu, sigma)`` and symmetric ``A``, ``B``, this module computes the
mixed moments ``E[(X'AX)^r (X'BX)^s]`` two ways: contracting the order-
``2r+2s`` vector moment (exact but exponential in ``r+s``), and the
moment-cumulant recursion seeded by closed-form cumulants.

The joint cumulant is the multiset-permutation trace sum; the textbook
closed form of Mathai & Provost (1992, Corollary 3.3.1) collapses those
traces into powers, which is valid only when ``A @ sigma`` and ``B @ sigma``
commute.  That formula is kept here (:func:`mathai_provost_formula`) purely
so the disagreement can be demonstrated.

The ``sigma`` slot is only required to be symmetric: the density-derivative
bridge in :mod:`gaussderiv.kde` calls these functions with negated inverse
covariances, which are negative definite.  Probabilistic interpretations, of
course, need a genuine SPD covariance.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .caps import DEFAULT_VECTOR_CAP, CapExceededError
from .hermite import _check_symmetric
from .kron import kron_seq
from .moments import moment_vector

DEFAULT_JOINT_ORDER_BUDGET = 12

NU_METHODS = ("vector_moment", "cumulant_recursive")


def multiset_perms(r: int, s: int) -> list[tuple[int, ...]]:
    """All sequences of ``r`` ones and ``s`` twos, lexicographic."""
    if r < 0 or s < 0 or r + s < 1:
        raise ValueError(f"need r, s >= 0 with r + s >= 1, got ({r}, {s})")
    total = r + s
    out = []
    for ones in itertools.combinations(range(total), r):
        seq = [2] * total
        for pos in ones:
            seq[pos] = 1
        out.append(tuple(seq))
    return out


def _prepare(a_mat, mu, sigma):
    a_mat = _check_symmetric(a_mat, "A")
    sigma = _check_symmetric(sigma, "sigma")
    mu = np.asarray(mu, dtype=float).reshape(-1)
    d = sigma.shape[0]
    if a_mat.shape[0] != d or mu.shape[0] != d:
        raise ValueError("A, mu and sigma must share one dimension")
    return a_mat, mu, sigma


def kappa_single(a_mat, mu, sigma, r: int) -> float:
    """Order-``r`` cumulant of ``X'AX``: trace power plus mean correction."""
    if r < 1:
        raise ValueError(f"cumulants start at order 1, got {r}")
    a_mat, mu, sigma = _prepare(a_mat, mu, sigma)
    f = a_mat @ sigma
    f_pow = np.linalg.matrix_power(f, r)
    f_prev = np.linalg.matrix_power(f, r - 1)
    return 2.0 ** (r - 1) * math.factorial(r - 1) * (
        float(np.trace(f_pow)) + r * float(mu @ f_prev @ a_mat @ mu)
    )


def _check_budget(r: int, s: int, budget: int) -> None:
    if r + s > budget:
        raise CapExceededError(
            f"joint order {r}+{s} exceeds the combinatorial budget {budget}",
            requested=r + s,
            cap=budget,
        )


def kappa_joint(
    a_mat, b_mat, mu, sigma, r: int, s: int, *, budget: int = DEFAULT_JOINT_ORDER_BUDGET
) -> float:
    """Joint cumulant of ``(X'AX, X'BX)`` of order ``(r, s)``.

    Sums traces over all interleavings of ``r`` copies of ``A @ sigma`` and
    ``s`` copies of ``B @ sigma``; shared prefixes of the interleavings reuse
    their partial matrix products.
    """
    if r < 0 or s < 0 or r + s < 1:
        raise ValueError(f"need r, s >= 0 with r + s >= 1, got ({r}, {s})")
    _check_budget(r, s, budget)
    a_mat, mu, sigma = _prepare(a_mat, mu, sigma)
    b_mat = _check_symmetric(b_mat, "B")
    d = sigma.shape[0]
    f1 = a_mat @ sigma
    f2 = b_mat @ sigma
    tail = np.eye(d) / (r + s) + np.linalg.solve(sigma, np.outer(mu, mu))

    def rec(prefix: np.ndarray, a_left: int, b_left: int) -> float:
        if a_left == 0 and b_left == 0:
            return float(np.trace(prefix @ tail))
        total = 0.0
        if a_left:
            total += rec(prefix @ f1, a_left - 1, b_left)
        if b_left:
            total += rec(prefix @ f2, a_left, b_left - 1)
        return total

    return 2.0 ** (r + s - 1) * math.factorial(r) * math.factorial(s) * rec(np.eye(d), r, s)


def kappa_joint_commuting(a_mat, b_mat, mu, sigma, r: int, s: int, *, tol: float = 1e-10) -> float:
    """Collapsed joint cumulant, valid only for commuting ``A sigma``, ``B sigma``."""
    if r < 0 or s < 0 or r + s < 1:
        raise ValueError(f"need r, s >= 0 with r + s >= 1, got ({r}, {s})")
    a_mat, mu, sigma = _prepare(a_mat, mu, sigma)
    b_mat = _check_symmetric(b_mat, "B")
    f1 = a_mat @ sigma
    f2 = b_mat @ sigma
    if r >= 1 and s >= 1:
        comm = f1 @ f2 - f2 @ f1
        scale = max(1.0, float(np.abs(f1 @ f2).max()))
        if np.abs(comm).max() > tol * scale:
            raise ValueError(
                "A @ sigma and B @ sigma do not commute; the collapsed formula does not apply"
            )
    prod = np.linalg.matrix_power(f1, r) @ np.linalg.matrix_power(f2, s)
    mean_term = (r + s) * float(np.trace(prod @ np.linalg.solve(sigma, np.outer(mu, mu))))
    return 2.0 ** (r + s - 1) * math.factorial(r + s - 1) * (float(np.trace(prod)) + mean_term)


def mathai_provost_formula(a_mat, b_mat, mu, sigma, r: int, s: int) -> float:
    """Literal Mathai-Provost joint cumulant; wrong for non-commuting factors."""
    if r < 1 or s < 1:
        raise ValueError(f"the published formula assumes r, s >= 1, got ({r}, {s})")
    a_mat, mu, sigma = _prepare(a_mat, mu, sigma)
    b_mat = _check_symmetric(b_mat, "B")
    f1 = a_mat @ sigma
    f2 = b_mat @ sigma
    m_out = np.linalg.solve(sigma, np.outer(mu, mu))
    f1r = np.linalg.matrix_power(f1, r)
    f2s = np.linalg.matrix_power(f2, s)
    lead = 2.0 ** (r + s - 1) * math.factorial(r + s - 1) * float(np.trace(f1r @ f2s))
    mean_part = (
        r
        * (r - 1)
        * float(np.trace(np.linalg.matrix_power(f1, r - 1) @ f2s @ f1 @ m_out))
        + s
        * (s - 1)
        * float(np.trace(np.linalg.matrix_power(f2, s - 1) @ f1r @ f2 @ m_out))
        + 2 * r * s * float(np.trace(f1r @ f2s @ m_out))
    )
    return lead + 2.0 ** (r + s - 1) * math.factorial(r + s - 2) * mean_part


def nu_single(
    a_mat,
    mu,
    sigma,
    r: int,
    method: str = "cumulant_recursive",
    *,
    cap: int = DEFAULT_VECTOR_CAP,
    budget: int = DEFAULT_JOINT_ORDER_BUDGET,
) -> float:
    """``E[(X'AX)^r]`` by vector-moment contraction or the cumulant recursion."""
    if r < 0:
        raise ValueError(f"need r >= 0, got {r}")
    a_mat, mu, sigma = _prepare(a_mat, mu, sigma)
    if r == 0:
        return 1.0
    if method == "vector_moment":
        vec_a = a_mat.T.reshape(-1)
        w = kron_seq([vec_a] * r)
        return float(w @ moment_vector(mu, sigma, 2 * r, cap=cap))
    if method == "cumulant_recursive":
        _check_budget(r, 0, budget)
        kappas = {t: kappa_single(a_mat, mu, sigma, t) for t in range(1, r + 1)}
        nus = [1.0]
        for t in range(1, r + 1):
            nus.append(
                sum(math.comb(t - 1, i) * kappas[t - i] * nus[i] for i in range(t))
            )
        return nus[r]
    raise ValueError(f"unknown method {method!r}; expected one of {NU_METHODS}")


def nu_joint(
    a_mat,
    b_mat,
    mu,
    sigma,
    r: int,
    s: int,
    method: str = "cumulant_recursive",
    *,
    cap: int = DEFAULT_VECTOR_CAP,
    budget: int = DEFAULT_JOINT_ORDER_BUDGET,
) -> float:
    """``E[(X'AX)^r (X'BX)^s]``.

    The recursion runs on a memoized table: the pure-power column comes from
    the single-form recursion, mixed cells from the double sum over lowered
    orders, and the roles of ``A`` and ``B`` swap when ``r`` is 0.
    """
    if r < 0 or s < 0:
        raise ValueError(f"need r, s >= 0, got ({r}, {s})")
    a_mat, mu, sigma = _prepare(a_mat, mu, sigma)
    b_mat = _check_symmetric(b_mat, "B")
    if r + s == 0:
        return 1.0
    if method == "vector_moment":
        vec_a = a_mat.T.reshape(-1)
        vec_b = b_mat.T.reshape(-1)
        w = kron_seq([vec_a] * r + [vec_b] * s)
        return float(w @ moment_vector(mu, sigma, 2 * (r + s), cap=cap))
    if method != "cumulant_recursive":
        raise ValueError(f"unknown method {method!r}; expected one of {NU_METHODS}")
    _check_budget(r, s, budget)
    if s == 0:
        return nu_single(a_mat, mu, sigma, r, "cumulant_recursive", budget=budget)
    if r == 0:
        return nu_single(b_mat, mu, sigma, s, "cumulant_recursive", budget=budget)

    kappa_cache: dict[tuple[int, int], float] = {}

    def kappa(a: int, b: int) -> float:
        if (a, b) not in kappa_cache:
            if b == 0:
                kappa_cache[a, b] = kappa_single(a_mat, mu, sigma, a)
            elif a == 0:
                kappa_cache[a, b] = kappa_single(b_mat, mu, sigma, b)
            else:
                kappa_cache[a, b] = kappa_joint(a_mat, b_mat, mu, sigma, a, b, budget=budget)
        return kappa_cache[a, b]

    nus: dict[tuple[int, int], float] = {(0, 0): 1.0}

    def nu(a: int, b: int) -> float:
        if (a, b) not in nus:
            if b == 0:
                nus[a, b] = nu_single(a_mat, mu, sigma, a, "cumulant_recursive", budget=budget)
            else:
                nus[a, b] = sum(
                    math.comb(a, i) * math.comb(b - 1, j) * kappa(a - i, b - j) * nu(i, j)
                    for i in range(a + 1)
                    for j in range(b)
                )
        return nus[a, b]

    return nu(r, s)
