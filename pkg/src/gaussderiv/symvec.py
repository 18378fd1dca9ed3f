"""Symmetrize a ``d**r`` coordinate vector without forming the matrix.

``symv_direct`` averages each coordinate over all ``r!`` slot permutations of
its tuple; ``symv_recursive`` reaches the same fixed point with only
``r (r + 1) / 2 - 1`` slot-swap reorderings, which is what makes large
``(d, r)`` products feasible when the matrix itself is not.

Both functions accept stacked inputs (any leading batch axes); the coordinate
axis is the last one.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .caps import DEFAULT_VECTOR_CAP, CapExceededError, checked_length
from .indexing import swap_digits_index

DEFAULT_MAX_DIRECT_ORDER = 10


def _check_shape(v: np.ndarray, d: int, r: int, cap: int) -> np.ndarray:
    n = checked_length(d, r, cap)
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != n:
        raise ValueError(f"expected last axis of length {d}^{r} = {n}, got {v.shape[-1]}")
    return v


def transposition_reorder(v: np.ndarray, d: int, r: int, j: int, k: int) -> np.ndarray:
    """Swap tuple slots ``j`` and ``k`` (1-based) of every coordinate index.

    Pure index permutation: the output at the swapped position of ``i`` holds
    ``v[i]``.  Applying it twice returns the input.
    """
    if not 1 <= j <= k <= r:
        raise ValueError(f"need 1 <= j <= k <= r, got j={j}, k={k}, r={r}")
    v = _check_shape(v, d, r, DEFAULT_VECTOR_CAP)
    if j == k:
        return v.copy()
    return v[..., swap_digits_index(d, r, j, k)]


def symv_direct(
    v: np.ndarray,
    d: int,
    r: int,
    *,
    max_order: int = DEFAULT_MAX_DIRECT_ORDER,
    cap: int = DEFAULT_VECTOR_CAP,
) -> np.ndarray:
    """Symmetrize by enumerating all ``r!`` slot permutations of each index."""
    v = _check_shape(v, d, r, cap)
    if r <= 1:
        return v.copy()
    if r > max_order:
        raise CapExceededError(
            f"direct symmetrization enumerates {r}! permutations; order {r} "
            f"exceeds the budget ({max_order})",
            requested=r,
            cap=max_order,
        )
    n = v.shape[-1]
    base = np.arange(n, dtype=np.int64)
    digits = [(base // d**j0) % d for j0 in range(r)]
    powers = [d**j0 for j0 in range(r)]
    out = np.zeros_like(v)
    for sigma in itertools.permutations(range(r)):
        idx = sum(digits[sigma[j0]] * powers[j0] for j0 in range(r))
        out += v[..., idx]
    out /= math.factorial(r)
    return out


def symv_recursive(v: np.ndarray, d: int, r: int, *, cap: int = DEFAULT_VECTOR_CAP) -> np.ndarray:
    """Symmetrize through successive slot-swap averages.

    At stage ``k`` the running vector is replaced by the average of its
    reorderings swapping slot ``j`` into slot ``k`` for ``j = 1..k``; after
    stage ``r`` the vector is fully symmetric.  Each stage writes into a
    fresh accumulator (the swaps overlap, so in-place updates would corrupt
    the result), and the ``j`` loop runs in ascending order so floating
    rounding is reproducible.
    """
    v = _check_shape(v, d, r, cap)
    if r <= 1:
        return v.copy()
    w = v
    for k in range(2, r + 1):
        acc = np.zeros_like(w)
        for j in range(1, k + 1):
            if j == k:
                acc += w
            else:
                acc += w[..., swap_digits_index(d, r, j, k)]
        w = acc / k
    return w
