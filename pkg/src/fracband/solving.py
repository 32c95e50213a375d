"""Solving assembled systems, with optional automatic truncation growth.

Routing is by matrix shape: banded sections get the banded LU, bordered
systems the Schur-complement solver, and the banded-below/dense-above
sections from weighted coefficients get restricted-pivot elimination.
"""

from __future__ import annotations

import logging
import math
import statistics
import time
from dataclasses import dataclass

import numpy as np

from .assembly import (
    CaputoSystem,
    assemble_fde_caputo,
    assemble_fde_rl,
    assemble_fie,
    recover_caputo,
)
from .banded import (
    AlmostBandedMat,
    BandedLU,
    BandedMat,
    DenseMat,
    solve_almost_banded,
    solve_lower_banded,
)
from .errors import NoConvergence, SingularMatrix, SingularSchurComplement
from .fractional import level_spaces
from .problems import ProblemSpec, Solution
from .spaces import sumfun_from_interleaved, trim_coeffs

log = logging.getLogger(__name__)

AUTO_START = 16
AUTO_CAP = 2**14

#: past this the factorization is reported as ill-conditioned
COND_REPORT_THRESHOLD = 1e12


def _dense_cond_probe(mat: DenseMat):
    b = np.ones(mat.rows, dtype=complex)
    b[1::2] = -1.0
    try:
        x = solve_lower_banded(mat, b)
    except SingularMatrix:
        return math.inf
    return mat.norm_inf() * float(np.abs(x).max())


def solve_linear(mat, rhs):
    """Solve one assembled section. Returns (x, cond_probe)."""
    if isinstance(mat, AlmostBandedMat):
        x, cond = solve_almost_banded(mat, rhs, return_cond=True)
    elif isinstance(mat, BandedMat):
        lu = BandedLU(mat)
        x, cond = lu.solve(rhs), lu.cond_probe()
    elif isinstance(mat, DenseMat):
        x, cond = solve_lower_banded(mat, rhs), _dense_cond_probe(mat)
    else:
        raise TypeError(f"cannot solve a {type(mat).__name__}")
    if not np.all(np.isfinite(x)):
        raise SingularMatrix("factorization overflowed to non-finite values")
    return x, cond


def solve_caputo_system(sys: CaputoSystem):
    """Schur elimination of v against the banded body.

    One factorization, M+1 solves, then an M x M dense system for the
    polynomial coefficients.
    """
    m = sys.m_order
    stacked = np.concatenate([sys.rhs_body[:, None], sys.left], axis=1)
    if isinstance(sys.body, BandedMat):
        lu = BandedLU(sys.body)
        Y = lu.solve(stacked)
        cond = lu.cond_probe()
    else:
        Y = solve_lower_banded(sys.body, stacked)
        cond = _dense_cond_probe(sys.body)
    y_f, Y_L = Y[:, 0], Y[:, 1:]
    top_c = sys.top[:, :m]
    top_v = sys.top[:, m:]
    S = top_c - top_v @ Y_L
    t = sys.rhs_top - top_v @ y_f
    try:
        c = np.linalg.solve(S, t)
    except np.linalg.LinAlgError as exc:
        raise SingularSchurComplement(str(exc)) from exc
    if not np.all(np.isfinite(c)):
        raise SingularSchurComplement("non-finite polynomial coefficients")
    v = y_f - Y_L @ c
    return c, v, cond


def _report_cond(cond):
    if cond is not None and cond > COND_REPORT_THRESHOLD:
        log.warning("ill-conditioned factorization, estimate %.3e", cond)
        return float(cond)
    return None


def solve_at(spec: ProblemSpec, n: int) -> Solution:
    """Assemble and solve at one fixed truncation size (n per part)."""
    kind = spec.kind
    if kind == "fde_caputo":
        sys = assemble_fde_caputo(spec, n)
        c, v, cond = solve_caputo_system(sys)
        u = recover_caputo(sys, c, v)
        return Solution(
            u=u, n_used=n, aux=tuple(c), cond_estimate=_report_cond(cond)
        )
    if kind == "fde_rl":
        mat, rhs = assemble_fde_rl(spec, n)
    else:
        mat, rhs = assemble_fie(spec, n)
    x, cond = solve_linear(mat, rhs)
    u = sumfun_from_interleaved(x, level_spaces(0))
    return Solution(u=u, n_used=n, cond_estimate=_report_cond(cond))


# Sample points for the error estimate. Comparing coefficient vectors
# directly would be cheaper, but the two-part representation is redundant:
# on stiff problems the solver may return wildly different coefficients for
# the same function at neighbouring truncations. Point values are what the
# representation actually determines, so the estimate samples the difference
# on a Chebyshev grid (clustered at the endpoints, where the action is).
_EST_POINTS = np.cos(np.linspace(0.0, np.pi, 129))


def _function_distance(u1, u2) -> float:
    d = np.abs(u1(_EST_POINTS) - u2(_EST_POINTS))
    return float(np.max(d)) if np.all(np.isfinite(d)) else math.inf


def _finer(n: int) -> int:
    return math.ceil(1.1 * n)


def estimate_error(spec: ProblemSpec, n: int) -> float:
    """Max difference of the solves at n and ceil(1.1 n) on a sample grid."""
    return _function_distance(solve_at(spec, n).u, solve_at(spec, _finer(n)).u)


def _trimmed_length(u, tol) -> int:
    return max(
        trim_coeffs(u.first.coeffs, tol).size,
        trim_coeffs(u.second.coeffs, tol).size,
    )


def solve(spec: ProblemSpec) -> Solution:
    """Solve a problem, growing the truncation when no size was given.

    The automatic path doubles n from 16 and accepts once the sampled
    error estimate clears the tolerance; n_used then reports the trimmed
    expansion length rather than the working size.
    """
    if spec.n is not None:
        sol = solve_at(spec, spec.n)
        est = _function_distance(sol.u, solve_at(spec, _finer(spec.n)).u)
        return Solution(
            u=sol.u,
            n_used=sol.n_used,
            aux=sol.aux,
            error_estimate=est,
            cond_estimate=sol.cond_estimate,
        )
    n = AUTO_START
    last_failure = None
    while n <= AUTO_CAP:
        try:
            coarse = solve_at(spec, n)
            fine = solve_at(spec, _finer(n))
        except (SingularMatrix, SingularSchurComplement) as exc:
            # a small section can be singular even when the problem is fine;
            # keep growing and only give up at the cap
            last_failure = exc
            n *= 2
            continue
        est = _function_distance(coarse.u, fine.u)
        if est <= spec.tolerance:
            return Solution(
                u=fine.u,
                n_used=_trimmed_length(fine.u, spec.tolerance),
                aux=fine.aux,
                error_estimate=est,
                cond_estimate=fine.cond_estimate,
            )
        n *= 2
    raise NoConvergence(
        f"error estimate still above {spec.tolerance:g} at n = {AUTO_CAP}"
    ) from last_failure


def convergence_study(spec: ProblemSpec, n_list, reference=None):
    """Error estimates over a list of sizes, with true errors if a reference
    evaluator is supplied (max abs difference on a 100-point equispaced grid).
    """
    rows = []
    grid = np.linspace(-1.0, 1.0, 100)
    for n in n_list:
        sol = solve_at(spec, n)
        est = _function_distance(sol.u, solve_at(spec, _finer(n)).u)
        row = {"n": int(n), "estimate": est}
        if reference is not None:
            ref = np.asarray([reference(x) for x in grid], dtype=complex)
            row["true_error"] = float(np.abs(sol.u(grid) - ref).max())
        rows.append(row)
    return rows


def _assemble_only(spec: ProblemSpec, n: int):
    kind = spec.kind
    if kind == "fde_caputo":
        return assemble_fde_caputo(spec, n)
    if kind == "fde_rl":
        return assemble_fde_rl(spec, n)
    return assemble_fie(spec, n)


def assembled_matrix(spec: ProblemSpec, n: int):
    """The square system matrix alone, for structure inspection."""
    assembled = _assemble_only(spec, n)
    if isinstance(assembled, CaputoSystem):
        m = assembled.top.shape[0]
        size = assembled.top.shape[1]
        arr = np.zeros((size, size), dtype=complex)
        arr[:m, :] = assembled.top
        arr[m:, :m] = assembled.left
        arr[m:, m:] = assembled.body.toarray()
        return DenseMat(arr)
    return assembled[0]


def bench(spec: ProblemSpec, n_list, repeats: int = 3):
    """Median build and solve wall times per truncation size."""
    rows = []
    for n in n_list:
        builds, solves = [], []
        for _ in range(max(1, int(repeats))):
            t0 = time.perf_counter()
            assembled = _assemble_only(spec, n)
            t1 = time.perf_counter()
            if isinstance(assembled, CaputoSystem):
                solve_caputo_system(assembled)
            else:
                mat, rhs = assembled
                solve_linear(mat, rhs)
            t2 = time.perf_counter()
            builds.append(t1 - t0)
            solves.append(t2 - t1)
        rows.append(
            {
                "n": int(n),
                "build_seconds": statistics.median(builds),
                "solve_seconds": statistics.median(solves),
            }
        )
    return rows
