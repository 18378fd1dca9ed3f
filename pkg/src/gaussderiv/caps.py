"""Size caps shared by every operation that allocates coordinate vectors or
sparse matrices.

A ``d``-variate object of tensor order ``r`` lives in ``d**r`` coordinates,
which explodes quickly; every entry point that would allocate such an object
checks against a cap first and raises :class:`CapExceededError` instead of
attempting a doomed allocation.
"""

from __future__ import annotations

DEFAULT_VECTOR_CAP = 2**26
"""Maximum length of a dense ``d**r`` coordinate vector."""

DEFAULT_MATRIX_CAP_BYTES = 2**30
"""Estimated byte budget for sparse matrix construction (storage + scratch)."""


class CapExceededError(Exception):
    """A computation was refused because its estimated size exceeds a cap."""

    def __init__(self, message: str, *, requested=None, cap=None):
        super().__init__(message)
        self.requested = requested
        self.cap = cap


def checked_length(d: int, r: int, cap: int = DEFAULT_VECTOR_CAP) -> int:
    """Return ``d**r`` after validating it against the vector cap."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if r < 0:
        raise ValueError(f"order must be >= 0, got {r}")
    n = d**r
    if n > cap:
        raise CapExceededError(
            f"vector of length {d}^{r} = {n} exceeds cap {cap}",
            requested=n,
            cap=cap,
        )
    return n


def check_bytes(estimate: int, cap: int = DEFAULT_MATRIX_CAP_BYTES, what: str = "matrix") -> None:
    """Refuse a construction whose estimated byte footprint exceeds the cap."""
    if estimate > cap:
        raise CapExceededError(
            f"estimated {what} footprint {estimate} bytes exceeds cap {cap}",
            requested=estimate,
            cap=cap,
        )
