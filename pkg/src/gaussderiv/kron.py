"""Kronecker-product helpers in the package-wide coordinate convention.

Throughout the package, the coordinates of an ``r``-fold product of
``d``-vectors are indexed by tuples ``(i_1, ..., i_r)`` with the *first*
factor varying fastest: the tuple sits at (1-based) position
``1 + sum_j (i_j - 1) * d**(j-1)``.  NumPy's ``np.kron`` puts its *second*
argument in the fastest position, so the two-factor product here is
``np.kron(b, a)``.  All modules build their products through these helpers so
the layout stays consistent with the base-``d`` index arithmetic in
:mod:`gaussderiv.indexing`.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np


def kron2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of two 1-D factors with the first factor fastest."""
    return np.kron(b, a)


def kron_seq(factors: Sequence[np.ndarray]) -> np.ndarray:
    """Product of a sequence of 1-D factors, ``factors[0]`` fastest.

    Empty sequences give the scalar ``[1.0]`` (the empty product).
    """
    out = np.ones(1)
    for f in factors:
        out = np.kron(np.asarray(f, dtype=float), out)
    return out


def kron_pow(x: np.ndarray, k: int) -> np.ndarray:
    """``k``-fold product of ``x`` with itself; ``k = 0`` gives ``[1.0]``."""
    return kron_seq([x] * k)


def kron2_batch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise two-factor product for batches shaped ``(m, p)`` and ``(m, q)``.

    Row ``t`` of the result is ``kron2(a[t], b[t])`` (first factor fastest).
    """
    m, p = a.shape
    _, q = b.shape
    return np.einsum("mq,mp->mqp", b, a).reshape(m, p * q)


def kron_pow_batch(x: np.ndarray, k: int) -> np.ndarray:
    """Row-wise ``k``-fold self-product of a batch shaped ``(m, d)``."""
    m = x.shape[0]
    out = np.ones((m, 1))
    for _ in range(k):
        out = kron2_batch(out, x)
    return out


def apply_kron_power(mat: np.ndarray, v: np.ndarray, r: int) -> np.ndarray:
    """Apply the ``r``-fold Kronecker power of ``mat`` to a ``d**r`` vector.

    Works slot by slot on the tensor view, so the ``d**r x d**r`` matrix is
    never formed.  The result does not depend on the slot order because every
    slot receives the same matrix.
    """
    mat = np.asarray(mat, dtype=float)
    d = mat.shape[0]
    out = np.asarray(v, dtype=float)
    if r == 0:
        return out.copy()
    t = out.reshape((d,) * r)
    for axis in range(r):
        t = np.moveaxis(np.tensordot(mat, t, axes=([1], [axis])), 0, axis)
    return t.reshape(-1)


def apply_kron_power_batch(mat: np.ndarray, vb: np.ndarray, r: int) -> np.ndarray:
    """Batched :func:`apply_kron_power` over rows of ``vb`` shaped ``(m, d**r)``."""
    mat = np.asarray(mat, dtype=float)
    d = mat.shape[0]
    vb = np.asarray(vb, dtype=float)
    if r == 0:
        return vb.copy()
    m = vb.shape[0]
    t = vb.reshape((m,) + (d,) * r)
    for axis in range(1, r + 1):
        t = np.moveaxis(np.tensordot(mat, t, axes=([1], [axis])), 0, axis)
    return t.reshape(m, -1)
