"""Independent reference implementations used as test oracles.

Everything here is deliberately written from first principles (own index
arithmetic, brute-force enumeration, closed forms, quadrature) so the tests
never compare the package against itself.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from numpy.polynomial import hermite_e


def brute_position(tup, d: int) -> int:
    """0-based linear position with the first tuple slot varying fastest."""
    return sum((tup[j] - 1) * d**j for j in range(len(tup)))


def brute_symmetrizer(d: int, r: int) -> np.ndarray:
    """Dense symmetrizer straight from the permutation-average definition."""
    n = d**r
    out = np.zeros((n, n))
    for t in itertools.product(range(1, d + 1), repeat=r):
        i = brute_position(t, d)
        for sigma in itertools.permutations(range(r)):
            u = tuple(t[sigma[k]] for k in range(r))
            out[i, brute_position(u, d)] += 1.0
    return out / math.factorial(r)


def brute_kron_seq(factors) -> np.ndarray:
    """First-factor-fastest product built coordinate by coordinate."""
    factors = [np.asarray(f, dtype=float) for f in factors]
    sizes = [f.size for f in factors]
    n = int(np.prod(sizes)) if sizes else 1
    out = np.empty(n)
    for i in range(n):
        rem, val = i, 1.0
        for f, size in zip(factors, sizes):
            val *= f[rem % size]
            rem //= size
        out[i] = val
    return out


def isserlis_moment(coords, sigma: np.ndarray) -> float:
    """Central normal product moment by recursive pairing enumeration."""
    coords = tuple(coords)
    if len(coords) == 0:
        return 1.0
    if len(coords) % 2 == 1:
        return 0.0
    first, rest = coords[0], coords[1:]
    total = 0.0
    for k in range(len(rest)):
        total += sigma[first, rest[k]] * isserlis_moment(rest[:k] + rest[k + 1 :], sigma)
    return total


def univariate_density_derivative(x: float, variance: float, r: int) -> float:
    """r-th derivative of the N(0, variance) density via probabilists' Hermite."""
    u = x / math.sqrt(variance)
    phi = math.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi)
    coeffs = np.zeros(r + 1)
    coeffs[r] = 1.0
    he_r = hermite_e.hermeval(u, coeffs)
    return (-1.0) ** r * variance ** (-(r + 1) / 2.0) * he_r * phi


def gaussian_density(x: np.ndarray, sigma: np.ndarray) -> float:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    d = x.size
    det = np.linalg.det(sigma)
    quad = float(x @ np.linalg.solve(sigma, x))
    return (2.0 * math.pi) ** (-d / 2.0) / math.sqrt(det) * math.exp(-0.5 * quad)


def finite_difference_coordinate(deriv_fn, x: np.ndarray, slot_coord: int, h: float = 1e-5):
    """Central difference of a vector-valued function along one coordinate."""
    e = np.zeros_like(x)
    e[slot_coord] = h
    return (deriv_fn(x + e) - deriv_fn(x - e)) / (2.0 * h)
