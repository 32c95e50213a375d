"""HTTP front for the solver: solve, convergence, spy, and bench endpoints.

The CLI talks to this app in-process by default, so the service is the one
place that turns problem files into runs and package errors into payloads;
anything a client sees comes through here.  Package errors map to 422 with
a detail of {kind: "parse" | "solver", message}.
"""

from __future__ import annotations

from typing import List, Optional, Union

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field

from . import solving
from .banded import spy_triples
from .errors import FracbandError, ParseError
from .expressions import compile_expr
from .problem_io import ProblemFileModel, model_to_spec
from .problems import ProblemSpec

app = FastAPI(title="fracband", version="0.1.0")


class SolveRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    problem: ProblemFileModel
    n: Optional[int] = None
    tol: Optional[float] = None
    grid: int = Field(default=100, ge=2)


class ConvergenceRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    problem: ProblemFileModel
    ns: List[int] = Field(min_length=0)
    reference: Optional[str] = None
    tol: Optional[float] = None


class SpyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    problem: ProblemFileModel
    n: Optional[int] = None
    tol: Optional[float] = None


class BenchRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    problem: ProblemFileModel
    ns: List[int] = Field(min_length=1)
    repeats: int = Field(default=3, ge=1)
    tol: Optional[float] = None


class PointValue(BaseModel):
    x: float
    re: float
    im: float


class CoeffArray(BaseModel):
    re: List[float]
    im: List[float]


class ComplexValue(BaseModel):
    re: float
    im: float


class SolveResponse(BaseModel):
    n_used: int
    error_estimate: Optional[float]
    cond_estimate: Optional[float]
    points: List[PointValue]
    legendre: CoeffArray
    weighted_u: CoeffArray
    aux: List[ComplexValue]


class ConvergenceRow(BaseModel):
    n: int
    estimate: float
    true_error: Optional[float] = None


class ConvergenceResponse(BaseModel):
    rows: List[ConvergenceRow]


class SpyEntry(BaseModel):
    row: int
    col: int
    re: float
    im: float


class SpyResponse(BaseModel):
    n: int
    shape: List[int]
    entries: List[SpyEntry]


class BenchRow(BaseModel):
    n: int
    build_seconds: float
    solve_seconds: float


class BenchResponse(BaseModel):
    rows: List[BenchRow]


def _spec(problem: ProblemFileModel, n: Optional[int], tol: Optional[float]) -> ProblemSpec:
    spec = model_to_spec(problem)
    changes = {}
    if n is not None:
        changes["n"] = n
    if tol is not None:
        changes["tolerance"] = tol
    if changes:
        spec = ProblemSpec(
            terms=spec.terms,
            rhs=spec.rhs,
            constraints=spec.constraints,
            tolerance=changes.get("tolerance", spec.tolerance),
            n=changes.get("n", spec.n),
        )
    return spec


def _error_detail(exc: FracbandError) -> dict:
    kind = "parse" if isinstance(exc, ParseError) else "solver"
    return {"kind": kind, "message": str(exc)}


def _coeff_array(fun) -> CoeffArray:
    c = np.asarray(fun.coeffs, dtype=complex)
    return CoeffArray(re=c.real.tolist(), im=c.imag.tolist())


@app.get("/health")
def health():
    return {"status": "ok"}


@app.post("/solve", response_model=SolveResponse)
def solve_endpoint(req: SolveRequest):
    try:
        spec = _spec(req.problem, req.n, req.tol)
        sol = solving.solve(spec)
        est = sol.error_estimate
        if est is None:
            est = solving.estimate_error(spec, spec.n)
        xs = np.linspace(-1.0, 1.0, req.grid)
        vals = np.asarray(sol.u(xs), dtype=complex)
    except FracbandError as exc:
        raise HTTPException(status_code=422, detail=_error_detail(exc))
    return SolveResponse(
        n_used=sol.n_used,
        error_estimate=est,
        cond_estimate=sol.cond_estimate,
        points=[
            PointValue(x=float(x), re=float(v.real), im=float(v.imag))
            for x, v in zip(xs, vals)
        ],
        legendre=_coeff_array(sol.u.first),
        weighted_u=_coeff_array(sol.u.second),
        aux=[ComplexValue(re=a.real, im=a.imag) for a in sol.aux],
    )


@app.post("/convergence", response_model=ConvergenceResponse)
def convergence_endpoint(req: ConvergenceRequest):
    try:
        spec = _spec(req.problem, None, req.tol)
        reference = None
        if req.reference is not None:
            reference = compile_expr(req.reference)
        rows = solving.convergence_study(spec, req.ns, reference=reference)
    except FracbandError as exc:
        raise HTTPException(status_code=422, detail=_error_detail(exc))
    return ConvergenceResponse(
        rows=[
            ConvergenceRow(
                n=r["n"],
                estimate=r["estimate"],
                true_error=r.get("true_error"),
            )
            for r in rows
        ]
    )


@app.post("/spy", response_model=SpyResponse)
def spy_endpoint(req: SpyRequest):
    try:
        spec = _spec(req.problem, req.n, req.tol)
        if spec.n is None:
            raise ParseError("spy needs an explicit truncation size")
        mat = solving.assembled_matrix(spec, spec.n)
        triples = spy_triples(mat)
        shape = [2 * spec.n, 2 * spec.n]
    except FracbandError as exc:
        raise HTTPException(status_code=422, detail=_error_detail(exc))
    return SpyResponse(
        n=spec.n,
        shape=shape,
        entries=[
            SpyEntry(row=r, col=c, re=v.real, im=v.imag) for r, c, v in triples
        ],
    )


@app.post("/bench", response_model=BenchResponse)
def bench_endpoint(req: BenchRequest):
    try:
        spec = _spec(req.problem, None, req.tol)
        rows = solving.bench(spec, req.ns, repeats=req.repeats)
    except FracbandError as exc:
        raise HTTPException(status_code=422, detail=_error_detail(exc))
    return BenchResponse(
        rows=[
            BenchRow(
                n=r["n"],
                build_seconds=r["build_seconds"],
                solve_seconds=r["solve_seconds"],
            )
            for r in rows
        ]
    )
