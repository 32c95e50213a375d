"""Banded storage, interleaving, and the direct solvers."""

import math
import time

import numpy as np
import pytest

import oracles
from fracband.banded import (
    AlmostBandedMat,
    BandedLU,
    BandedMat,
    DenseMat,
    interleave,
    solve_almost_banded,
    solve_banded,
    solve_lower_banded,
    spy_triples,
)
from fracband.errors import ShapeMismatch, SingularMatrix


def _random_banded(n, l, u, seed, dominant=True):
    rng = np.random.default_rng(seed)
    A = BandedMat.zeros(n, n, l, u)
    for o in range(-l, u + 1):
        j0, j1 = max(o, 0), min(n, n + o)
        A.data[A.u - o, j0:j1] = rng.standard_normal(j1 - j0)
    if dominant:
        A.data[A.u, :] += 3.0 + l + u
    return A


def test_from_dense_round_trip():
    arr = np.array([[1.0, 2.0, 0.0], [3.0, 4.0, 5.0], [0.0, 6.0, 7.0]])
    A = BandedMat.from_dense(arr)
    assert (A.l, A.u) == (1, 1)
    assert np.allclose(A.toarray(), arr)


def test_matmul_matches_dense():
    A = _random_banded(12, 1, 2, 0, dominant=False)
    B = _random_banded(12, 2, 0, 1, dominant=False)
    C = A.matmul(B)
    assert np.allclose(C.toarray(), A.toarray() @ B.toarray(), atol=1e-13)


def test_matvec_and_vecmat_match_dense():
    A = _random_banded(15, 2, 1, 2, dominant=False)
    x = np.arange(15, dtype=complex)
    assert np.allclose(A.matvec(x), A.toarray() @ x, atol=1e-13)
    assert np.allclose(A.vecmat(x), x @ A.toarray(), atol=1e-13)


def test_interleave_bidiagonal_blocks_tridiagonal():
    # identity diagonals with one lower- and one upper-bidiagonal coupling:
    # the layout of the order-1/2 integral system at sigma=1
    n = 4
    eye = BandedMat.identity(n)
    lower = BandedMat.zeros(n, n, 1, 0)
    lower.set_diag(0, np.ones(n))
    lower.set_diag(-1, np.ones(n - 1))
    upper = BandedMat.zeros(n, n, 0, 1)
    upper.set_diag(0, np.ones(n))
    upper.set_diag(1, -np.ones(n - 1))
    M = interleave(((eye, lower), (upper, eye)), n)
    offsets = {j - i for i, j, v in M.entries() if v != 0}
    assert offsets <= {-1, 0, 1}
    dense = M.toarray()
    assert dense.shape == (8, 8)
    assert dense[0, 1] == 1.0 and dense[1, 0] == 1.0


def test_interleave_zero_blocks():
    M = interleave(((None, None), (None, None)), 5)
    assert M.rows == M.cols == 10
    assert M.effective_bands() == (0, 0)
    assert np.allclose(M.toarray(), 0.0)


def test_interleave_identity_blocks():
    eye = BandedMat.identity(6)
    M = interleave(((eye, None), (None, eye)), 6)
    assert np.allclose(M.toarray(), np.eye(12))


def test_interleave_rejects_mismatched_blocks():
    with pytest.raises(ShapeMismatch):
        interleave(((BandedMat.identity(3), None), (None, BandedMat.identity(4))), 3)


def test_interleave_matches_dense_scatter():
    rng = np.random.default_rng(4)
    blocks = [[_random_banded(6, 1, 1, s, dominant=False) for s in (1, 2)],
              [_random_banded(6, 1, 1, s, dominant=False) for s in (3, 4)]]
    M = interleave(((blocks[0][0], blocks[0][1]), (blocks[1][0], blocks[1][1])), 6)
    want = np.zeros((12, 12), dtype=complex)
    for p in (0, 1):
        for q in (0, 1):
            want[p::2, q::2] = blocks[p][q].toarray()
    assert np.allclose(M.toarray(), want, atol=0.0)


def test_solve_identity_unit_vector():
    e3 = np.zeros(7)
    e3[3] = 1.0
    x = solve_banded(BandedMat.identity(7), e3)
    assert np.allclose(x, e3, atol=0.0)


def test_solve_random_diagonally_dominant():
    A = _random_banded(500, 3, 2, 11)
    rhs = np.cos(np.arange(500.0)).astype(complex)
    x = solve_banded(A, rhs)
    resid = np.abs(A.matvec(x) - rhs).max()
    assert resid < 1e-12


def test_solve_detects_singular():
    A = BandedMat.zeros(4, 4, 1, 1)
    A.set_diag(0, np.array([1.0, 1.0, 0.0, 1.0]))
    with pytest.raises(SingularMatrix):
        solve_banded(A, np.ones(4))


def test_lu_storage_stays_inside_bands():
    A = _random_banded(40, 2, 3, 5)
    lu = BandedLU(A)
    assert lu.V.shape == (40, 2 * A.l + A.u + 1)
    assert lu.mult.shape == (40, A.l)


def test_lu_multiple_right_hand_sides():
    A = _random_banded(30, 2, 2, 9)
    B = np.arange(60, dtype=complex).reshape(30, 2)
    X = BandedLU(A).solve(B)
    assert np.abs(A.toarray() @ X - B).max() < 1e-12


def test_permutation_similarity_of_interleaving():
    # solving the interleaved system equals solving the block system
    n = 15
    blocks = [[_random_banded(n, 1, 1, s, dominant=False) for s in (21, 22)],
              [_random_banded(n, 1, 1, s, dominant=False) for s in (23, 24)]]
    for p in (0, 1):
        blocks[p][p].data[blocks[p][p].u, :] += 4.0
    M = interleave(((blocks[0][0], blocks[0][1]), (blocks[1][0], blocks[1][1])), n)
    rng = np.random.default_rng(8)
    a, b = rng.standard_normal(n), rng.standard_normal(n)
    rhs = np.empty(2 * n, dtype=complex)
    rhs[0::2], rhs[1::2] = a, b
    x = solve_banded(M, rhs)
    dense = np.block([[blocks[0][0].toarray(), blocks[0][1].toarray()],
                      [blocks[1][0].toarray(), blocks[1][1].toarray()]])
    y = np.linalg.solve(dense, np.concatenate([a, b]))
    assert np.abs(x[0::2] - y[:n]).max() < 1e-12
    assert np.abs(x[1::2] - y[n:]).max() < 1e-12


def test_almost_banded_K0_reduces_to_banded():
    body = _random_banded(25, 2, 1, 13)
    rhs = np.ones(25, dtype=complex)
    M = AlmostBandedMat(np.zeros((0, 25)), body)
    assert np.allclose(solve_almost_banded(M, rhs), solve_banded(body, rhs), atol=0.0)


def test_almost_banded_K1_matches_dense():
    n = 12
    border = np.zeros((1, n), dtype=complex)
    border[0, 0] = 1.0
    body = BandedMat.zeros(n - 1, n, 0, 1)
    body.set_diag(0, 2.0 * np.ones(n - 1))
    body.set_diag(1, np.ones(n - 1))
    M = AlmostBandedMat(border, body)
    rhs = np.arange(1.0, n + 1.0, dtype=complex)
    x = solve_almost_banded(M, rhs)
    y = np.linalg.solve(M.toarray(), rhs)
    assert np.abs(x - y).max() < 1e-13


def test_almost_banded_random_matches_dense():
    # bodies weighted toward offset +K, the shape bordered operator rows
    # take after K constraint rows are stacked on top; a body dominant at
    # offset 0 would hand the pinned Woodbury base an exponentially bad
    # condition number that no bordered elimination survives
    rng = np.random.default_rng(31)
    for K in (1, 2, 3):
        n = 40
        border = rng.standard_normal((K, n)) + 1j * rng.standard_normal((K, n))
        body = _random_banded(n, 2, 3, 100 + K, dominant=False)
        body.data[body.u - K, K:] += 8.0
        body = body.crop(n - K, n)
        M = AlmostBandedMat(border, body)
        rhs = rng.standard_normal(n).astype(complex)
        x = solve_almost_banded(M, rhs)
        y = np.linalg.solve(M.toarray(), rhs)
        assert np.abs(x - y).max() < 1e-11


def test_lower_banded_back_substitution():
    n = 20
    rng = np.random.default_rng(17)
    arr = np.triu(rng.standard_normal((n, n)))
    np.fill_diagonal(arr, 1.0)
    A = DenseMat(arr.astype(complex), l=0)
    rhs = rng.standard_normal(n).astype(complex)
    x = solve_lower_banded(A, rhs)
    y = np.linalg.solve(arr, rhs)
    # triangular solves amplify random unit-diagonal systems, so compare
    # relative to the solution scale
    assert np.abs(x - y).max() < 1e-13 * max(1.0, np.abs(y).max())


def test_lower_banded_general_matches_dense():
    n = 35
    l = 4
    rng = np.random.default_rng(23)
    arr = np.triu(rng.standard_normal((n, n)), -l)
    np.fill_diagonal(arr, arr.diagonal() + 6.0)
    A = DenseMat(arr.astype(complex), l=l)
    rhs = rng.standard_normal(n).astype(complex)
    x = solve_lower_banded(A, rhs)
    assert np.abs(arr @ x - rhs).max() < 1e-11


def test_crop_is_projection_consistent():
    A = _random_banded(30, 2, 3, 40, dominant=False)
    big = A.toarray()
    small = A.crop(12, 12).toarray()
    assert np.allclose(small, big[:12, :12], atol=0.0)


def test_spy_triples_sorted_zero_based():
    A = BandedMat.zeros(3, 3, 0, 1)
    A.set_diag(0, np.array([1.0, 2.0, 3.0]))
    A.set_diag(1, np.array([4.0, 5.0]))
    triples = spy_triples(A)
    assert triples == sorted(triples)
    assert triples[0][0] == 0 and triples[0][1] == 0
    assert all(v != 0 for _, _, v in triples)


def test_linear_complexity_of_banded_solve():
    # wall-clock doubling ratio on a fixed-bandwidth system
    def best_time(n):
        A = _random_banded(n, 2, 2, 3)
        rhs = np.ones(n, dtype=complex)
        best = math.inf
        for _ in range(3):
            t0 = time.perf_counter()
            solve_banded(A, rhs)
            best = min(best, time.perf_counter() - t0)
        return best

    ratio = best_time(40000) / best_time(20000)
    assert 1.6 <= ratio <= 2.8
