"""Request/response models for the compute service.

Matrices travel as row-major lists of rows, vectors as flat lists.  Requests
carry plain data only; file handling belongs to clients (the bundled CLI
reads CSVs and ships their contents here).
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

Matrix = list[list[float]]
Vector = list[float]


class SymmetrizerRequest(BaseModel):
    d: int = Field(ge=1)
    r: int = Field(ge=0)
    method: Literal["direct", "recursive"] = "recursive"
    output: Literal["nnz", "triplets"] = "nnz"
    cap_bytes: Optional[int] = Field(default=None, ge=1)


class SymmetrizerResponse(BaseModel):
    d: int
    r: int
    side: int
    scale_denominator: int
    method: str
    nnz_lower: int
    triplets: Optional[list[list[int]]] = None


class SymvRequest(BaseModel):
    d: int = Field(ge=1)
    r: int = Field(ge=0)
    method: Literal["direct", "recursive"] = "recursive"
    v: Optional[Vector] = None
    seed: int = 0


class SymvResponse(BaseModel):
    d: int
    r: int
    method: str
    v_source: Literal["given", "seeded"]
    w: Vector


class DerivRequest(BaseModel):
    x: Vector
    sigma: Matrix
    r: int = Field(ge=0)
    method: Literal["direct", "full_recursive", "unique"] = "unique"


class DerivResponse(BaseModel):
    d: int
    r: int
    method: str
    values: Vector


class MomentsRequest(BaseModel):
    mu: Vector
    sigma: Matrix
    r: int = Field(ge=0)
    method: Literal["explicit", "hermite"] = "explicit"


class MomentsResponse(BaseModel):
    d: int
    r: int
    method: str
    values: Vector


class QuadformRequest(BaseModel):
    a_mat: Matrix
    b_mat: Optional[Matrix] = None
    mu: Vector
    sigma: Matrix
    r: int = Field(ge=0)
    s: int = Field(default=0, ge=0)
    method: Literal["vector_moment", "cumulant_recursive"] = "cumulant_recursive"
    check_mp: bool = False


class MpComparison(BaseModel):
    kappa_corrected: float
    kappa_mathai_provost: float
    rel_diff: float
    mismatch: bool


class QuadformResponse(BaseModel):
    d: int
    r: int
    s: int
    method: str
    nu: float
    kappa_joint: Optional[float] = None
    mp_comparison: Optional[MpComparison] = None


class VstatRequest(BaseModel):
    data: Matrix
    sigma: Optional[Matrix] = None
    r: int = Field(ge=0)
    method: Literal["direct", "cumulant"] = "cumulant"


class VstatResponse(BaseModel):
    n: int
    d: int
    r: int
    method: str
    value: float


class SelectBwRequest(BaseModel):
    data: Matrix
    r: int = Field(ge=0)
    criterion: Literal["CV", "PI", "SCV"] = "CV"
    g_mat: Optional[Matrix] = None
    init: Optional[Matrix] = None


class SelectBwResponse(BaseModel):
    criterion: str
    r: int
    h_mat: Matrix
    value: float
    converged: bool
    iterations: int
    evaluations: int
    final_simplex_spread: float
    message: str


class BenchRequest(BaseModel):
    suite: Literal[
        "acceptance", "symmetrizer", "symv", "deriv", "moments", "quadform", "vstat"
    ] = "acceptance"
    reps: int = Field(default=3, ge=1)
    seed: int = 0
    d_values: Optional[list[int]] = None
    r_values: Optional[list[int]] = None
    n_values: Optional[list[int]] = None
    cap_bytes: Optional[int] = Field(default=None, ge=1)


class BenchCell(BaseModel):
    scenario: str
    module: str
    d: int
    r: int
    s: Optional[int] = None
    n: Optional[int] = None
    method_a: str
    method_b: str
    reps: int
    mean_a_s: Optional[float] = None
    min_a_s: Optional[float] = None
    mean_b_s: Optional[float] = None
    min_b_s: Optional[float] = None
    ratio: Optional[float] = None
    agree: bool
    tol: float
    skipped: bool
    skip_reason: Optional[str] = None


class BenchResponse(BaseModel):
    suite: str
    reports: list[BenchCell]
    floors_passed: Optional[bool] = None


class SparsityRequest(BaseModel):
    d_values: list[int]
    r_values: list[int]
    cap_bytes: Optional[int] = Field(default=None, ge=1)


class SparsityRow(BaseModel):
    d: int
    r: int
    nnz_lower: Optional[int] = None
    total_lower: Optional[int] = None
    proportion: Optional[float] = None
    skipped: bool = False
    skip_reason: Optional[str] = None


class SparsityResponse(BaseModel):
    rows: list[SparsityRow]


class ErrorBody(BaseModel):
    code: Literal["usage", "cap", "numeric"]
    message: str


class ErrorResponse(BaseModel):
    error: ErrorBody
