"""HTTP front end over the core package.

Every CLI subcommand has one POST endpoint taking plain-data JSON.  Errors
are mapped onto structured bodies: 400 for usage problems, 413 when a size
cap refuses the computation, 500 for numeric failures.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .. import __version__, bench, kde, moments, quadform, symmetrizer, symvec
from ..caps import DEFAULT_MATRIX_CAP_BYTES, CapExceededError, checked_length
from ..hermite import gaussian_derivative
from . import schemas


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": {"code": code, "message": message}})


def create_app() -> FastAPI:
    app = FastAPI(title="gaussderiv", version=__version__)

    @app.exception_handler(RequestValidationError)
    async def _validation_handler(request: Request, exc: RequestValidationError):
        return _error(400, "usage", str(exc.errors()))

    @app.exception_handler(ValueError)
    async def _value_handler(request: Request, exc: ValueError):
        return _error(400, "usage", str(exc))

    @app.exception_handler(CapExceededError)
    async def _cap_handler(request: Request, exc: CapExceededError):
        return _error(413, "cap", str(exc))

    @app.exception_handler(ArithmeticError)
    async def _numeric_handler(request: Request, exc: ArithmeticError):
        return _error(500, "numeric", str(exc))

    @app.exception_handler(np.linalg.LinAlgError)
    async def _linalg_handler(request: Request, exc: np.linalg.LinAlgError):
        return _error(500, "numeric", str(exc))

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/symmetrizer", response_model=schemas.SymmetrizerResponse)
    def symmetrizer_endpoint(req: schemas.SymmetrizerRequest):
        cap_bytes = req.cap_bytes or DEFAULT_MATRIX_CAP_BYTES
        build = (
            symmetrizer.symmetrizer_direct
            if req.method == "direct"
            else symmetrizer.symmetrizer_recursive
        )
        mat = build(req.d, req.r, cap_bytes=cap_bytes)
        out = schemas.SymmetrizerResponse(
            d=req.d,
            r=req.r,
            side=mat.side,
            scale_denominator=mat.denominator,
            method=req.method,
            nnz_lower=mat.nnz_lower(),
        )
        if req.output == "triplets":
            out.triplets = mat.triplets().tolist()
        return out

    @app.post("/symv", response_model=schemas.SymvResponse)
    def symv_endpoint(req: schemas.SymvRequest):
        n = checked_length(req.d, req.r)
        if req.v is not None:
            v = np.asarray(req.v, dtype=float)
            source = "given"
        else:
            v = np.random.default_rng(req.seed).standard_normal(n)
            source = "seeded"
        fn = symvec.symv_direct if req.method == "direct" else symvec.symv_recursive
        w = fn(v, req.d, req.r)
        return schemas.SymvResponse(d=req.d, r=req.r, method=req.method, v_source=source, w=w.tolist())

    @app.post("/deriv", response_model=schemas.DerivResponse)
    def deriv_endpoint(req: schemas.DerivRequest):
        sigma = np.asarray(req.sigma, dtype=float)
        values = gaussian_derivative(np.asarray(req.x, dtype=float), sigma, req.r, req.method)
        return schemas.DerivResponse(d=sigma.shape[0], r=req.r, method=req.method, values=values.tolist())

    @app.post("/moments", response_model=schemas.MomentsResponse)
    def moments_endpoint(req: schemas.MomentsRequest):
        sigma = np.asarray(req.sigma, dtype=float)
        values = moments.moment_vector(np.asarray(req.mu, dtype=float), sigma, req.r, req.method)
        return schemas.MomentsResponse(d=sigma.shape[0], r=req.r, method=req.method, values=values.tolist())

    @app.post("/quadform", response_model=schemas.QuadformResponse)
    def quadform_endpoint(req: schemas.QuadformRequest):
        a_mat = np.asarray(req.a_mat, dtype=float)
        sigma = np.asarray(req.sigma, dtype=float)
        mu = np.asarray(req.mu, dtype=float)
        d = sigma.shape[0]
        b_mat = np.eye(d) if req.b_mat is None else np.asarray(req.b_mat, dtype=float)
        if req.s == 0:
            nu = quadform.nu_single(a_mat, mu, sigma, req.r, req.method)
        else:
            nu = quadform.nu_joint(a_mat, b_mat, mu, sigma, req.r, req.s, req.method)
        out = schemas.QuadformResponse(d=d, r=req.r, s=req.s, method=req.method, nu=nu)
        if req.r + req.s >= 1:
            out.kappa_joint = quadform.kappa_joint(a_mat, b_mat, mu, sigma, req.r, req.s)
        if req.check_mp:
            if req.r < 1 or req.s < 1:
                raise ValueError("check_mp needs r >= 1 and s >= 1")
            corrected = out.kappa_joint
            published = quadform.mathai_provost_formula(a_mat, b_mat, mu, sigma, req.r, req.s)
            rel = abs(published - corrected) / max(1e-300, abs(corrected))
            out.mp_comparison = schemas.MpComparison(
                kappa_corrected=corrected,
                kappa_mathai_provost=published,
                rel_diff=rel,
                mismatch=rel > 1e-9,
            )
        return out

    @app.post("/vstat", response_model=schemas.VstatResponse)
    def vstat_endpoint(req: schemas.VstatRequest):
        data = np.asarray(req.data, dtype=float)
        d = data.shape[1] if data.ndim == 2 else 1
        sigma = np.eye(d) if req.sigma is None else np.asarray(req.sigma, dtype=float)
        value = kde.vstat_q(data, sigma, req.r, req.method)
        return schemas.VstatResponse(n=data.shape[0], d=d, r=req.r, method=req.method, value=value)

    @app.post("/select-bw", response_model=schemas.SelectBwResponse)
    def select_bw_endpoint(req: schemas.SelectBwRequest):
        data = np.asarray(req.data, dtype=float)
        g_mat = None if req.g_mat is None else np.asarray(req.g_mat, dtype=float)
        init = None if req.init is None else np.asarray(req.init, dtype=float)
        sel = kde.select_bandwidth(data, req.r, req.criterion, g_mat, init)
        return schemas.SelectBwResponse(
            criterion=sel.criterion,
            r=sel.r,
            h_mat=sel.h_mat.tolist(),
            value=sel.value,
            converged=sel.converged,
            iterations=sel.iterations,
            evaluations=sel.evaluations,
            final_simplex_spread=sel.final_simplex_spread,
            message=sel.message,
        )

    @app.post("/bench", response_model=schemas.BenchResponse)
    def bench_endpoint(req: schemas.BenchRequest):
        grid = {}
        if req.d_values is not None:
            grid["d_values"] = tuple(req.d_values)
        if req.r_values is not None:
            grid["r_values"] = tuple(req.r_values)
        if req.n_values is not None and req.suite == "vstat":
            grid["n_values"] = tuple(req.n_values)
        if req.cap_bytes is not None and req.suite == "symmetrizer":
            grid["cap_bytes"] = req.cap_bytes
        floors = None
        if req.suite == "acceptance":
            reports, floors = bench.acceptance_floors(reps=req.reps, seed=req.seed)
        else:
            reports = bench.run_suite(req.suite, reps=req.reps, seed=req.seed, **grid)
        cells = [schemas.BenchCell(**rep.to_dict()) for rep in reports]
        return schemas.BenchResponse(suite=req.suite, reports=cells, floors_passed=floors)

    @app.post("/sparsity", response_model=schemas.SparsityResponse)
    def sparsity_endpoint(req: schemas.SparsityRequest):
        cap_bytes = req.cap_bytes or DEFAULT_MATRIX_CAP_BYTES
        rows = bench.sparsity_curve(
            d_values=tuple(req.d_values), r_values=tuple(req.r_values), cap_bytes=cap_bytes
        )
        return schemas.SparsityResponse(rows=[schemas.SparsityRow(**row) for row in rows])

    return app


app = create_app()
