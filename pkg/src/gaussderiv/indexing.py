"""Base-``d`` index arithmetic for tensor coordinates.

An order-``r`` tensor coordinate is labelled by a tuple ``(i_1, ..., i_r)``
with entries in ``1..d``.  The bijection onto linear positions ``1..d**r`` is

    ``linear_index(t) = 1 + sum_j (t[j] - 1) * d**(j-1)``

so ``i_1`` is the fastest-varying digit.  Since mixed partial derivatives
commute, tuples that share the same multiset of entries label the same
partial derivative; those classes are the multi-indices ``m`` (``d``
nonnegative counts summing to ``r``), and :func:`unique_ordering` fixes the
canonical order in which the distinct classes first occur along the linear
positions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .caps import DEFAULT_MATRIX_CAP_BYTES, DEFAULT_VECTOR_CAP, check_bytes, checked_length


def linear_index(tup, d: int) -> int:
    """Map a tuple with entries in ``1..d`` to its 1-based linear position."""
    i = 0
    for j, t in enumerate(tup):
        if not 1 <= t <= d:
            raise ValueError(f"tuple entry {t} outside 1..{d}")
        i += (t - 1) * d**j
    return i + 1


def tuple_index(i: int, d: int, r: int) -> tuple[int, ...]:
    """Inverse of :func:`linear_index`: the digits of ``i - 1`` in base ``d``."""
    if not 1 <= i <= d**r:
        raise ValueError(f"index {i} outside 1..{d}^{r}")
    return tuple((i - 1) // d**j % d + 1 for j in range(r))


def perm_table(
    d: int,
    r: int,
    *,
    cap: int = DEFAULT_VECTOR_CAP,
    cap_bytes: int = DEFAULT_MATRIX_CAP_BYTES,
) -> np.ndarray:
    """All ``d**r`` tuples as a ``(d**r, r)`` int array, row ``i`` = tuple of ``i+1``.

    Built by the floor formula in one vectorized pass per digit, never by
    ``r`` nested loops.
    """
    n = checked_length(d, r, cap)
    check_bytes(n * max(r, 1) * 4, cap_bytes, what="permutation table")
    base = np.arange(n, dtype=np.int64)
    cols = [(base // d**j) % d + 1 for j in range(r)]
    if not cols:
        return np.empty((n, 0), dtype=np.int32)
    return np.stack(cols, axis=1).astype(np.int32)


def swap_digits_index(
    d: int, r: int, slot_a: int, slot_b: int, *, cap: int = DEFAULT_VECTOR_CAP
) -> np.ndarray:
    """Index map on 0-based linear positions that swaps two tuple slots.

    Slots are 1-based.  The map is an involution computed by digit
    arithmetic, O(1) per position, without materializing any tuple table.
    """
    n = checked_length(d, r, cap)
    if not (1 <= slot_a <= r and 1 <= slot_b <= r):
        raise ValueError(f"slots ({slot_a}, {slot_b}) outside 1..{r}")
    idx = np.arange(n, dtype=np.int64)
    if slot_a == slot_b:
        return idx
    pa, pb = d ** (slot_a - 1), d ** (slot_b - 1)
    a = (idx // pa) % d
    b = (idx // pb) % d
    return idx + (b - a) * pa + (a - b) * pb


def unique_count(d: int, r: int) -> int:
    """Number of multi-indices of order ``r`` in dimension ``d``: C(r+d-1, r)."""
    if d < 1 or r < 0:
        raise ValueError(f"need d >= 1 and r >= 0, got d={d}, r={r}")
    return math.comb(r + d - 1, r)


def tuple_to_multiindex(tup, d: int) -> tuple[int, ...]:
    """Count how many times each value ``1..d`` appears in the tuple."""
    counts = [0] * d
    for t in tup:
        if not 1 <= t <= d:
            raise ValueError(f"tuple entry {t} outside 1..{d}")
        counts[t - 1] += 1
    return tuple(counts)


def _ordered_multiindices(d: int, r: int) -> list[tuple[int, ...]]:
    # First-occurrence order satisfies: all of order r with m_1 >= 1 come
    # first (they are order r-1 indices plus e_1, in the same order), then the
    # m_1 = 0 block, which is the (d-1)-dimensional list prefixed with 0.
    if d == 1:
        return [(r,)]
    if r == 0:
        return [(0,) * d]
    first = [(m[0] + 1,) + m[1:] for m in _ordered_multiindices(d, r - 1)]
    rest = [(0,) + m for m in _ordered_multiindices(d - 1, r)]
    return first + rest


def _multiindex_key(m, r: int) -> int:
    # Injective encoding: each entry of value k contributes (r+1)**(k-1).
    return sum(c * (r + 1) ** k for k, c in enumerate(m))


@dataclass(frozen=True)
class UniqueOrdering:
    """Canonical ordering of the distinct multi-index classes of order ``r``.

    ``multi_indices[s]`` is the class in slot ``s`` (0-based), ordered by
    first occurrence along the linear positions.  ``expansion[k]`` gives, for
    0-based linear position ``k``, the slot holding that position's class, so
    scattering a unique-value vector ``u`` to the full ``d**r`` layout is just
    ``u[expansion]``.
    """

    d: int
    r: int
    multi_indices: tuple[tuple[int, ...], ...]
    expansion: np.ndarray = field(repr=False, compare=False)
    _slots: dict = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        self._slots.update({m: s for s, m in enumerate(self.multi_indices)})

    def __len__(self) -> int:
        return len(self.multi_indices)

    def position(self, m) -> int:
        """0-based slot of multi-index ``m``."""
        return self._slots[tuple(m)]


def _expansion_map(d: int, r: int, ordered: list[tuple[int, ...]]) -> np.ndarray:
    n = d**r
    keys = np.array([_multiindex_key(m, r) for m in ordered], dtype=np.int64)
    # Vectorized per-position key; falls back to python ints if the encoding
    # could overflow int64 (huge d with nontrivial r never passes the caps
    # in practice, but stay correct anyway).
    if (d - 1) * math.log2(r + 1 if r else 2) < 62:
        base = np.arange(n, dtype=np.int64)
        powers = (r + 1) ** np.arange(d, dtype=np.int64)
        enc = np.zeros(n, dtype=np.int64)
        for j in range(r):
            enc += powers[(base // d**j) % d]
    else:
        enc = np.array(
            [_multiindex_key(tuple_to_multiindex(tuple_index(i, d, r), d), r) for i in range(1, n + 1)],
            dtype=np.int64,
        )
    order = np.argsort(keys, kind="stable")
    pos = np.searchsorted(keys[order], enc)
    return order[pos].astype(np.int64)


@lru_cache(maxsize=None)
def _unique_ordering_cached(d: int, r: int, cap: int) -> UniqueOrdering:
    checked_length(d, r, cap)
    ordered = _ordered_multiindices(d, r)
    expansion = _expansion_map(d, r, ordered)
    expansion.setflags(write=False)
    return UniqueOrdering(d=d, r=r, multi_indices=tuple(ordered), expansion=expansion)


def unique_ordering(d: int, r: int, *, cap: int = DEFAULT_VECTOR_CAP) -> UniqueOrdering:
    """Ordered multi-index classes plus the full-position -> slot map.

    Results are cached per ``(d, r)`` and treated as immutable.
    """
    if d < 1 or r < 0:
        raise ValueError(f"need d >= 1 and r >= 0, got d={d}, r={r}")
    return _unique_ordering_cached(d, r, cap)
