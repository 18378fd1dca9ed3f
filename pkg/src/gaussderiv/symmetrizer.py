"""Symmetrizer matrices with exact integer representation.

The order-``r`` symmetrizer of ``R^{d^r}`` averages a coordinate vector over
all permutations of its ``r`` tensor slots.  Every entry is an integer
multiple of ``1/r!``, so the matrix is stored as int64 counts with the global
denominator ``r!``; the direct and recursive constructions must then agree
*exactly*, not merely to floating tolerance.

Two constructions are provided: :func:`symmetrizer_direct` sums elementary
matrices over the cheaper of the index/permutation loops, while
:func:`symmetrizer_recursive` builds the matrix by composing slot-swap
averaging matrices order by order.  Commutation matrices never exist as
matrices here; they are index permutations applied to sparse triplets.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .caps import (
    DEFAULT_MATRIX_CAP_BYTES,
    DEFAULT_VECTOR_CAP,
    CapExceededError,
    check_bytes,
    checked_length,
)
from .indexing import (
    _ordered_multiindices,
    linear_index,
    swap_digits_index,
    tuple_index,
    tuple_to_multiindex,
)

_INT64_MAX = np.iinfo(np.int64).max

# Bytes per COO triplet (row, col, value) during construction estimates.
_TRIPLET_BYTES = 24


@dataclass(frozen=True)
class CommutationMatrix:
    """The permutation sending ``vec(A)`` to ``vec(A^T)`` for ``p x q`` A.

    Stored purely as the index map ``perm``: applying the matrix to ``x`` is
    ``x[perm]``.
    """

    p: int
    q: int
    perm: np.ndarray = field(repr=False, compare=False)

    @property
    def side(self) -> int:
        return self.p * self.q

    def apply(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x)[..., self.perm]

    def to_sparse(self) -> sparse.csr_matrix:
        n = self.side
        return sparse.csr_matrix(
            (np.ones(n, dtype=np.int64), (np.arange(n), self.perm)), shape=(n, n)
        )


def commutation(p: int, q: int, *, cap: int = DEFAULT_VECTOR_CAP) -> CommutationMatrix:
    """Commutation permutation of block sizes ``(p, q)``."""
    if p < 1 or q < 1:
        raise ValueError(f"need p, q >= 1, got ({p}, {q})")
    n = p * q
    if n > cap:
        raise CapExceededError(f"commutation side {n} exceeds cap {cap}", requested=n, cap=cap)
    m = np.arange(n, dtype=np.int64)
    perm = m // q + (m % q) * p
    return CommutationMatrix(p=p, q=q, perm=perm)


@dataclass(frozen=True)
class SymmetrizerMatrix:
    """Sparse symmetrizer with integer counts and denominator ``r!``."""

    d: int
    r: int
    counts: sparse.csr_matrix = field(repr=False, compare=False)
    denominator: int = 1

    @property
    def side(self) -> int:
        return self.d**self.r

    def to_dense(self) -> np.ndarray:
        return self.counts.toarray() / self.denominator

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return (self.counts @ np.asarray(v, dtype=float)) / self.denominator

    def nnz_lower(self) -> int:
        coo = self.counts.tocoo()
        return int(np.count_nonzero(coo.row >= coo.col))

    def triplets(self) -> np.ndarray:
        """Nonzero entries as ``(row, col, count)`` rows, 1-based, sorted."""
        coo = self.counts.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return np.column_stack(
            [coo.row[order] + 1, coo.col[order] + 1, coo.data[order]]
        ).astype(np.int64)

    def export_triplets(self, stream) -> None:
        """Write the ``d r denominator`` header plus 1-based triplet lines."""
        stream.write(f"{self.d} {self.r} {self.denominator}\n")
        for row, col, count in self.triplets():
            stream.write(f"{row} {col} {count}\n")

    def equals_exact(self, other: "SymmetrizerMatrix") -> bool:
        if (self.d, self.r, self.denominator) != (other.d, other.r, other.denominator):
            return False
        a = self.counts.tocsr().sorted_indices()
        b = other.counts.tocsr().sorted_indices()
        return (
            a.shape == b.shape
            and np.array_equal(a.indptr, b.indptr)
            and np.array_equal(a.indices, b.indices)
            and np.array_equal(a.data, b.data)
        )


def nnz_lower(s: SymmetrizerMatrix) -> int:
    """Nonzeros on or below the diagonal."""
    return s.nnz_lower()


def estimate_nnz(d: int, r: int) -> int:
    """Exact nonzero count of the order-``r`` symmetrizer.

    Positions sharing a multiset of tuple entries form a fully dense block,
    so the count is the sum of squared class sizes.
    """
    rf = math.factorial(r)
    total = 0
    for m in _ordered_multiindices(d, r):
        u = rf
        for c in m:
            u //= math.factorial(c)
        total += u * u
    return total


def _check_factorial_scale(r: int) -> int:
    rf = math.factorial(r)
    if rf > _INT64_MAX:
        raise CapExceededError(
            f"order {r}: exact integer counts need {r}! which exceeds int64",
            requested=rf,
            cap=_INT64_MAX,
        )
    return rf


def _scalar_symmetrizer(d: int) -> SymmetrizerMatrix:
    return SymmetrizerMatrix(
        d=d, r=0, counts=sparse.identity(1, dtype=np.int64, format="csr"), denominator=1
    )


def _identity_counts(n: int) -> sparse.csr_matrix:
    return sparse.identity(n, dtype=np.int64, format="csr")


def _distinct_permutations(seq):
    # Lexicographic multiset permutations (next-permutation sweep).
    a = sorted(seq)
    n = len(a)
    while True:
        yield tuple(a)
        j = n - 2
        while j >= 0 and a[j] >= a[j + 1]:
            j -= 1
        if j < 0:
            return
        k = n - 1
        while a[j] >= a[k]:
            k -= 1
        a[j], a[k] = a[k], a[j]
        a[j + 1 :] = a[j + 1 :][::-1]


def symmetrizer_direct(
    d: int,
    r: int,
    *,
    cap: int = DEFAULT_VECTOR_CAP,
    cap_bytes: int = DEFAULT_MATRIX_CAP_BYTES,
) -> SymmetrizerMatrix:
    """Build the symmetrizer from its definition as a permutation average.

    Only one of the two defining loops is run: the linear-index loop when
    ``d**r < r!`` (each index contributes its distinct slot rearrangements,
    all carrying the same multiplicity), the permutation loop otherwise
    (each slot permutation contributes a vectorized index remap).
    """
    n = checked_length(d, r, cap)
    rf = _check_factorial_scale(r)
    if r == 0:
        return _scalar_symmetrizer(d)
    if r == 1:
        return SymmetrizerMatrix(d=d, r=1, counts=_identity_counts(d), denominator=1)

    check_bytes(estimate_nnz(d, r) * _TRIPLET_BYTES, cap_bytes, what="symmetrizer")

    if n < rf:
        rows: list[int] = []
        cols: list[int] = []
        data: list[int] = []
        for i in range(n):
            t = tuple_index(i + 1, d, r)
            mult = 1
            for c in tuple_to_multiindex(t, d):
                mult *= math.factorial(c)
            for arr in _distinct_permutations(t):
                rows.append(i)
                cols.append(linear_index(arr, d) - 1)
                data.append(mult)
        counts = sparse.coo_matrix(
            (np.array(data, dtype=np.int64), (np.array(rows), np.array(cols))),
            shape=(n, n),
        ).tocsr()
    else:
        check_bytes(rf * n * _TRIPLET_BYTES, cap_bytes, what="symmetrizer scratch")
        base = np.arange(n, dtype=np.int64)
        digits = [(base // d**j) % d for j in range(r)]
        powers = [d**j for j in range(r)]
        counts = sparse.csr_matrix((n, n), dtype=np.int64)
        block_rows: list[np.ndarray] = []
        block_cols: list[np.ndarray] = []
        pending = 0
        for sigma in itertools.permutations(range(r)):
            col = sum(digits[sigma[j]] * powers[j] for j in range(r))
            block_rows.append(base)
            block_cols.append(col)
            pending += n
            if pending >= 2**22:
                counts = counts + _coalesce(block_rows, block_cols, n)
                block_rows, block_cols, pending = [], [], 0
        if pending:
            counts = counts + _coalesce(block_rows, block_cols, n)
    counts.sum_duplicates()
    return SymmetrizerMatrix(d=d, r=r, counts=counts, denominator=rf)


def _coalesce(block_rows, block_cols, n) -> sparse.csr_matrix:
    rows = np.concatenate(block_rows)
    cols = np.concatenate(block_cols)
    return sparse.coo_matrix(
        (np.ones(rows.size, dtype=np.int64), (rows, cols)), shape=(n, n)
    ).tocsr()


@dataclass(frozen=True)
class TMatrix:
    """Slot-swap averaging matrix of order ``r``; ``numer`` holds ``r * T``."""

    d: int
    r: int
    numer: sparse.csr_matrix = field(repr=False, compare=False)

    @property
    def side(self) -> int:
        return self.d**self.r

    def to_dense(self) -> np.ndarray:
        return self.numer.toarray() / self.r

    def matvec(self, v: np.ndarray) -> np.ndarray:
        return (self.numer @ np.asarray(v, dtype=float)) / self.r


def _kron_identity_int(mat: sparse.spmatrix, d: int) -> sparse.coo_matrix:
    """``mat`` acting on the low slots, identity on one new top slot."""
    coo = mat.tocoo()
    s = mat.shape[0]
    offsets = np.arange(d, dtype=np.int64) * s
    rows = (coo.row[None, :] + offsets[:, None]).ravel()
    cols = (coo.col[None, :] + offsets[:, None]).ravel()
    data = np.broadcast_to(coo.data, (d, coo.data.size)).ravel()
    return sparse.coo_matrix((data, (rows, cols)), shape=(s * d, s * d))


def _t_step(numer_prev: sparse.spmatrix, d: int, i: int) -> sparse.csr_matrix:
    """From ``(i-1) * T_{i-1}`` to ``i * T_i`` by top-slot swap conjugation."""
    n = d**i
    swap = swap_digits_index(d, i, i - 1, i)
    grown = _kron_identity_int(numer_prev, d)
    rows = np.concatenate([swap[grown.row], np.arange(n, dtype=np.int64)])
    cols = np.concatenate([swap[grown.col], swap])
    data = np.concatenate([grown.data, np.ones(n, dtype=np.int64)])
    out = sparse.coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()
    out.sum_duplicates()
    return out


def t_matrix(
    d: int,
    r: int,
    *,
    cap: int = DEFAULT_VECTOR_CAP,
    cap_bytes: int = DEFAULT_MATRIX_CAP_BYTES,
) -> TMatrix:
    """Order-``r`` slot-swap averaging matrix, built recursively."""
    if r < 1:
        raise ValueError(f"need r >= 1, got {r}")
    checked_length(d, r, cap)
    numer = _identity_counts(d)
    for i in range(2, r + 1):
        check_bytes(numer.nnz * d * _TRIPLET_BYTES, cap_bytes, what="T-matrix")
        numer = _t_step(numer, d, i)
    return TMatrix(d=d, r=r, numer=numer)


def symmetrizer_recursive(
    d: int,
    r: int,
    *,
    cap: int = DEFAULT_VECTOR_CAP,
    cap_bytes: int = DEFAULT_MATRIX_CAP_BYTES,
) -> SymmetrizerMatrix:
    """Build the symmetrizer by the order-raising recursion.

    Invariants: after step ``i`` the accumulators hold ``i! * S_i`` and
    ``i * T_i`` with exact int64 entries, so the final matrix is entrywise
    identical to :func:`symmetrizer_direct`.
    """
    checked_length(d, r, cap)
    rf = _check_factorial_scale(r)
    if r == 0:
        return _scalar_symmetrizer(d)
    if r == 1:
        return SymmetrizerMatrix(d=d, r=1, counts=_identity_counts(d), denominator=1)
    check_bytes(estimate_nnz(d, r) * _TRIPLET_BYTES, cap_bytes, what="symmetrizer")

    scaled = _identity_counts(d)  # i! * S_i
    numer = _identity_counts(d)  # i * T_i
    for i in range(2, r + 1):
        numer = _t_step(numer, d, i)
        grown = _kron_identity_int(scaled, d).tocsr()
        scaled = grown @ numer
        scaled.sum_duplicates()
    return SymmetrizerMatrix(d=d, r=r, counts=scaled.tocsr(), denominator=rf)
