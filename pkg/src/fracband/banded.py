"""Banded and almost-banded matrices with the solvers the method relies on.

Storage is diagonal-major: data[u + i - j, j] holds entry (i, j), so a
BandedMat with lower bandwidth l and upper bandwidth u keeps l+u+1 rows of
length cols. Products, sums, sections and interleavings all stay in this
layout; nothing round-trips through dense arrays unless a genuinely dense
block (a connection operator) forces it.

Three solvers:

* solve_banded: LU with partial pivoting confined to the band, O(N) for
  fixed bandwidths. Fill is at most l extra superdiagonals, and the working
  array has exactly 2l+u+1 diagonals, so the "no writes outside l and l+u"
  claim is structural.
* solve_almost_banded: bordered systems (K dense rows on top of a banded
  body) by a Schur complement about the last K unknowns; K+1 banded solves
  plus a K x K dense solve.
* solve_lower_banded: matrices dense above the diagonal but banded below,
  by Gaussian elimination that only eliminates the l subdiagonals,
  O(l N^2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import as_strided

from .errors import (
    ShapeMismatch,
    SingularMatrix,
    SingularSchurComplement,
)

_PIVOT_RTOL = 1e-300  # pivot magnitudes below this times ||A|| count as zero


class BandedMat:
    """Rectangular banded matrix in diagonal-major storage."""

    __slots__ = ("rows", "cols", "l", "u", "data")

    def __init__(self, rows, cols, l, u, data=None):
        if rows < 0 or cols < 0 or l < 0 or u < 0:
            raise ShapeMismatch("negative dimension or bandwidth")
        self.rows = rows
        self.cols = cols
        self.l = l
        self.u = u
        if data is None:
            data = np.zeros((l + u + 1, cols), dtype=complex)
        if data.shape != (l + u + 1, cols):
            raise ShapeMismatch("band data has wrong shape")
        self.data = data

    # -- construction -----------------------------------------------------

    @classmethod
    def zeros(cls, rows, cols, l, u):
        return cls(rows, cols, l, u)

    @classmethod
    def identity(cls, n):
        out = cls(n, n, 0, 0)
        out.data[0, :] = 1.0
        return out

    @classmethod
    def from_dense(cls, arr, l=None, u=None):
        arr = np.asarray(arr, dtype=complex)
        rows, cols = arr.shape
        if l is None or u is None:
            l_eff = u_eff = 0
            for o in range(-(rows - 1), cols):
                if np.any(np.diagonal(arr, o)):
                    l_eff = max(l_eff, -o)
                    u_eff = max(u_eff, o)
            l = l_eff if l is None else l
            u = u_eff if u is None else u
        out = cls(rows, cols, l, u)
        for o in range(-l, u + 1):
            d = np.diagonal(arr, o)
            out.set_diag(o, d)
        return out

    # -- element access ----------------------------------------------------

    def _diag_cols(self, o):
        """Column index range [j0, j1) of stored entries on diagonal o."""
        j0 = max(o, 0)
        j1 = min(self.cols, self.rows + o)
        return j0, max(j0, j1)

    def diag(self, o):
        """View of diagonal o (entries A[j-o, j], indexed by j-j0)."""
        j0, j1 = self._diag_cols(o)
        return self.data[self.u - o, j0:j1]

    def set_diag(self, o, values):
        j0, j1 = self._diag_cols(o)
        vals = np.asarray(values, dtype=complex)
        if vals.size != j1 - j0:
            raise ShapeMismatch("diagonal length mismatch")
        self.data[self.u - o, j0:j1] = vals

    def toarray(self):
        out = np.zeros((self.rows, self.cols), dtype=complex)
        for o in range(-self.l, self.u + 1):
            j0, j1 = self._diag_cols(o)
            for j in range(j0, j1):
                out[j - o, j] = self.data[self.u - o, j]
        return out

    # -- algebra ------------------------------------------------------------

    def copy(self):
        return BandedMat(self.rows, self.cols, self.l, self.u, self.data.copy())

    def scale(self, alpha):
        return BandedMat(self.rows, self.cols, self.l, self.u, self.data * alpha)

    def add(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeMismatch("addition of mismatched shapes")
        l = max(self.l, other.l)
        u = max(self.u, other.u)
        out = BandedMat.zeros(self.rows, self.cols, l, u)
        out.data[u - self.u : u + self.l + 1, :] += self.data
        out.data[u - other.u : u + other.l + 1, :] += other.data
        return out

    def matmul(self, other):
        if self.cols != other.rows:
            raise ShapeMismatch("matmul inner dimensions differ")
        out = BandedMat.zeros(
            self.rows, other.cols, self.l + other.l, self.u + other.u
        )
        for oa in range(-self.l, self.u + 1):
            ra = self.data[self.u - oa]
            for ob in range(-other.l, other.u + 1):
                rb = other.data[other.u - ob]
                oc = oa + ob
                # jc ranges so that row jc-oc of self and column jc of other
                # both exist, with the inner index jc-ob in range.
                jc0 = max(0, oc, ob)
                jc1 = min(
                    other.cols, self.rows + oc, other.rows + ob
                )
                if jc1 <= jc0:
                    continue
                out.data[out.u - oc, jc0:jc1] += (
                    ra[jc0 - ob : jc1 - ob] * rb[jc0:jc1]
                )
        return out

    def matvec(self, x):
        x = np.asarray(x, dtype=complex)
        if x.size != self.cols:
            raise ShapeMismatch("matvec length mismatch")
        y = np.zeros(self.rows, dtype=complex)
        for o in range(-self.l, self.u + 1):
            j0, j1 = self._diag_cols(o)
            if j1 > j0:
                y[j0 - o : j1 - o] += self.data[self.u - o, j0:j1] * x[j0:j1]
        return y

    def vecmat(self, v):
        """Row vector times matrix: (v^T A) as a 1-D array of length cols."""
        v = np.asarray(v, dtype=complex)
        if v.size != self.rows:
            raise ShapeMismatch("vecmat length mismatch")
        w = np.zeros(self.cols, dtype=complex)
        for o in range(-self.l, self.u + 1):
            j0, j1 = self._diag_cols(o)
            if j1 > j0:
                w[j0:j1] += self.data[self.u - o, j0:j1] * v[j0 - o : j1 - o]
        return w

    def crop(self, rows, cols):
        """Leading section, preserving stored bandwidth labels."""
        if rows > self.rows or cols > self.cols:
            raise ShapeMismatch("crop cannot grow a matrix")
        out = BandedMat.zeros(rows, cols, self.l, self.u)
        out.data[:, :] = self.data[:, :cols]
        # kill entries whose row index fell off the section
        for o in range(-self.l, self.u + 1):
            j_bad = rows + o  # first column with row index >= rows
            if j_bad < cols:
                out.data[self.u - o, max(j_bad, 0) :] = 0.0
        return out

    def effective_bands(self, tol=0.0):
        """(l, u) after discarding diagonals with no entry above tol."""
        l_eff = u_eff = 0
        for o in range(-self.l, self.u + 1):
            j0, j1 = self._diag_cols(o)
            if j1 > j0 and np.any(
                np.abs(self.data[self.u - o, j0:j1]) > tol
            ):
                l_eff = max(l_eff, -o)
                u_eff = max(u_eff, o)
        return l_eff, u_eff

    def norm_inf(self):
        s = np.zeros(self.rows)
        for o in range(-self.l, self.u + 1):
            j0, j1 = self._diag_cols(o)
            if j1 > j0:
                s[j0 - o : j1 - o] += np.abs(self.data[self.u - o, j0:j1])
        return s.max() if s.size else 0.0

    def entries(self):
        """Yield (row, col, value) for stored nonzero entries."""
        for o in range(-self.l, self.u + 1):
            j0, j1 = self._diag_cols(o)
            row = self.data[self.u - o, j0:j1]
            for idx in np.nonzero(row)[0]:
                j = j0 + idx
                yield (j - o, j, row[idx])


class DenseMat:
    """Dense-storage matrix that remembers its lower bandwidth.

    Used for operators that are dense above the diagonal (connection
    coefficients) but banded below; the lower bandwidth is what the
    quadratic-cost solver exploits.
    """

    __slots__ = ("arr", "l")

    def __init__(self, arr, l=None):
        arr = np.asarray(arr, dtype=complex)
        self.arr = arr
        self.l = arr.shape[0] - 1 if l is None else min(l, arr.shape[0] - 1)

    @property
    def rows(self):
        return self.arr.shape[0]

    @property
    def cols(self):
        return self.arr.shape[1]

    def toarray(self):
        return self.arr.copy()

    def copy(self):
        return DenseMat(self.arr.copy(), self.l)

    def scale(self, alpha):
        return DenseMat(self.arr * alpha, self.l)

    def add(self, other):
        other_d = as_dense(other)
        if self.arr.shape != other_d.arr.shape:
            raise ShapeMismatch("addition of mismatched shapes")
        return DenseMat(self.arr + other_d.arr, max(self.l, other_d.l))

    def matmul(self, other):
        other_d = as_dense(other)
        if self.cols != other_d.rows:
            raise ShapeMismatch("matmul inner dimensions differ")
        return DenseMat(self.arr @ other_d.arr, self.l + other_d.l)

    def matvec(self, x):
        return self.arr @ np.asarray(x, dtype=complex)

    def crop(self, rows, cols):
        return DenseMat(self.arr[:rows, :cols].copy(), self.l)

    def norm_inf(self):
        return np.abs(self.arr).sum(axis=1).max() if self.arr.size else 0.0

    def entries(self):
        for i, j in zip(*np.nonzero(self.arr)):
            yield (int(i), int(j), self.arr[i, j])


def as_dense(m) -> DenseMat:
    if isinstance(m, DenseMat):
        return m
    return DenseMat(m.toarray(), l=m.l)


def mat_mul(a, b):
    if isinstance(a, BandedMat) and isinstance(b, BandedMat):
        return a.matmul(b)
    return as_dense(a).matmul(b)


def mat_add(a, b):
    if isinstance(a, BandedMat) and isinstance(b, BandedMat):
        return a.add(b)
    return as_dense(a).add(b)


# -- interleaving ------------------------------------------------------------


def interleave(blocks, n):
    """Merge a 2x2 block operator into one matrix on interleaved unknowns.

    blocks is ((b00, b01), (b10, b11)) of n x n matrices (None for zero).
    Entry (2i+p, 2j+q) of the result is block[p][q][i, j]. Banded blocks with
    bandwidths (l, u) give a banded result within (2l+1, 2u+1); any dense
    block makes the result a DenseMat that still knows its lower bandwidth.
    """
    flat = [blocks[0][0], blocks[0][1], blocks[1][0], blocks[1][1]]
    if all(b is None for b in flat):
        return BandedMat.zeros(2 * n, 2 * n, 0, 0)
    for b in flat:
        if b is not None and (b.rows != n or b.cols != n):
            raise ShapeMismatch("interleave blocks must all be n x n")
    if any(isinstance(b, DenseMat) for b in flat):
        arr = np.zeros((2 * n, 2 * n), dtype=complex)
        l_eff = 0
        for p in (0, 1):
            for q in (0, 1):
                b = blocks[p][q]
                if b is None:
                    continue
                arr[p::2, q::2] = b.toarray()
                l_eff = max(l_eff, 2 * b.l + p - q)
        return DenseMat(arr, l=l_eff)

    l_out = max(
        (2 * b.l + p - q)
        for p in (0, 1)
        for q in (0, 1)
        if (b := blocks[p][q]) is not None
    )
    u_out = max(
        (2 * b.u + q - p)
        for p in (0, 1)
        for q in (0, 1)
        if (b := blocks[p][q]) is not None
    )
    out = BandedMat.zeros(2 * n, 2 * n, max(l_out, 0), max(u_out, 0))
    for p in (0, 1):
        for q in (0, 1):
            b = blocks[p][q]
            if b is None:
                continue
            for o in range(-b.l, b.u + 1):
                j0, j1 = b._diag_cols(o)
                if j1 <= j0:
                    continue
                t = 2 * o + q - p
                c0 = 2 * j0 + q
                out.data[out.u - t, c0 : 2 * (j1 - 1) + q + 1 : 2] += b.data[
                    b.u - o, j0:j1
                ]
    return out


# -- banded LU ----------------------------------------------------------------


class BandedLU:
    """LU factorization with partial pivoting of a square banded matrix.

    Row-major working storage V[i, c] = A[i, i-l+c] with width 2l+u+1: the
    original band plus the l superdiagonals of pivoting fill. Multipliers and
    the pivot offsets are kept for repeated solves.
    """

    def __init__(self, A: BandedMat):
        if A.rows != A.cols:
            raise ShapeMismatch("banded LU needs a square matrix")
        n, l, u = A.rows, A.l, A.u
        self.n, self.l, self.u = n, l, u
        self.uw = l + u  # upper bandwidth after fill
        w = 2 * l + u + 1
        V = np.zeros((n, w), dtype=complex)
        for o in range(-l, u + 1):
            j0, j1 = A._diag_cols(o)
            if j1 > j0:
                i0, i1 = j0 - o, j1 - o
                V[i0:i1, o + l] = A.data[A.u - o, j0:j1]
        self.anorm = np.abs(V[:, : l + u + 1]).sum(axis=1).max() if n else 0.0
        self.V = V
        self.mult = np.zeros((n, l), dtype=complex)
        self.piv = np.zeros(n, dtype=np.int64)
        self._factor()

    def _factor(self):
        n, l, uw = self.n, self.l, self.uw
        V = self.V
        tol = _PIVOT_RTOL * self.anorm
        s0, s1 = V.strides
        for k in range(n):
            nl = min(l, n - 1 - k)
            col = as_strided(V[k:, l:], shape=(nl + 1,), strides=(s0 - s1,))
            p = int(np.argmax(np.abs(col))) if nl else 0
            wcols = min(uw, n - 1 - k) + 1
            if p:
                rowk = V[k, l : l + wcols]
                rowp = V[k + p, l - p : l - p + wcols]
                tmp = rowk.copy()
                rowk[:] = rowp
                rowp[:] = tmp
            self.piv[k] = p
            pivot = V[k, l]
            # written so a NaN pivot (overflow fallout) also trips
            if not abs(pivot) > tol:
                raise SingularMatrix(
                    f"zero pivot at elimination step {k} (|pivot|={abs(pivot):.3e})"
                )
            if nl:
                m = col[1:] / pivot
                self.mult[k, :nl] = m
                if wcols > 1:
                    block = as_strided(
                        V[k + 1 :, l:],
                        shape=(nl, wcols - 1),
                        strides=(s0 - s1, s1),
                    )
                    block -= np.multiply.outer(m, V[k, l + 1 : l + wcols])

    def solve(self, rhs):
        """Solve A x = rhs for one vector or a (n, m) block of them."""
        y = np.array(rhs, dtype=complex)
        one_d = y.ndim == 1
        if one_d:
            y = y[:, None]
        if y.shape[0] != self.n:
            raise ShapeMismatch("rhs length mismatch")
        n, l, uw = self.n, self.l, self.uw
        V = self.V
        for k in range(n):
            p = self.piv[k]
            if p:
                tmp = y[k].copy()
                y[k] = y[k + p]
                y[k + p] = tmp
            nl = min(l, n - 1 - k)
            if nl:
                y[k + 1 : k + 1 + nl] -= np.multiply.outer(self.mult[k, :nl], y[k])
        x = np.zeros_like(y)
        for k in range(n - 1, -1, -1):
            w = min(uw, n - 1 - k)
            acc = y[k]
            if w:
                acc = acc - V[k, l + 1 : l + 1 + w] @ x[k + 1 : k + 1 + w]
            x[k] = acc / V[k, l]
        return x[:, 0] if one_d else x

    def cond_probe(self):
        """Cheap infinity-norm condition estimate from one probe solve."""
        b = np.ones(self.n, dtype=complex)
        b[1::2] = -1.0
        try:
            x = self.solve(b)
        except SingularMatrix:
            return np.inf
        return self.anorm * np.abs(x).max()


def solve_banded(A: BandedMat, rhs):
    return BandedLU(A).solve(rhs)


# -- lower banded / dense upper ----------------------------------------------


def solve_lower_banded(A: DenseMat, rhs):
    """Gaussian elimination for matrices banded below, dense above.

    Pivoting searches only the l+1 rows that can hold a nonzero in the
    current column, so the cost is O(l N^2) instead of O(N^3).
    """
    M = A.arr.copy()
    n = M.shape[0]
    if M.shape[1] != n:
        raise ShapeMismatch("solve_lower_banded needs a square matrix")
    l = A.l
    y = np.array(rhs, dtype=complex)
    one_d = y.ndim == 1
    if one_d:
        y = y[:, None]
    anorm = np.abs(M).sum(axis=1).max() if n else 0.0
    tol = _PIVOT_RTOL * anorm
    for k in range(n):
        nl = min(l, n - 1 - k)
        p = int(np.argmax(np.abs(M[k : k + nl + 1, k]))) if nl else 0
        if p:
            M[[k, k + p], k:] = M[[k + p, k], k:]
            y[[k, k + p]] = y[[k + p, k]]
        pivot = M[k, k]
        if abs(pivot) <= tol:
            raise SingularMatrix(f"zero pivot at elimination step {k}")
        if nl:
            m = M[k + 1 : k + nl + 1, k] / pivot
            M[k + 1 : k + nl + 1, k + 1 :] -= np.multiply.outer(m, M[k, k + 1 :])
            y[k + 1 : k + nl + 1] -= np.multiply.outer(m, y[k])
    x = np.zeros_like(y)
    for k in range(n - 1, -1, -1):
        acc = y[k] - M[k, k + 1 :] @ x[k + 1 :]
        x[k] = acc / M[k, k]
    return x[:, 0] if one_d else x


# -- almost banded -------------------------------------------------------------


@dataclass
class AlmostBandedMat:
    """K dense border rows stacked on top of a banded body.

    Row i < K is border[i]; row K+t is row t of the body, whose band offsets
    are relative to column t (the bordering convention: constraint rows plus
    the first n-K operator rows of an interleaved system).
    """

    border: np.ndarray
    body: BandedMat

    def __post_init__(self):
        self.border = np.asarray(self.border, dtype=complex)
        k, n = self.border.shape
        if self.body.cols != n or self.body.rows != n - k:
            raise ShapeMismatch(
                "body must be (n-K) x n for a K x n border"
            )

    @property
    def k(self):
        return self.border.shape[0]

    @property
    def n(self):
        return self.border.shape[1]

    def toarray(self):
        out = np.zeros((self.n, self.n), dtype=complex)
        out[: self.k] = self.border
        out[self.k :] = self.body.toarray()
        return out

    def matvec(self, x):
        x = np.asarray(x, dtype=complex)
        return np.concatenate([self.border @ x, self.body.matvec(x)])

    def entries(self):
        for i in range(self.k):
            for j in np.nonzero(self.border[i])[0]:
                yield (i, int(j), self.border[i, j])
        for (i, j, v) in self.body.entries():
            yield (i + self.k, j, v)


def solve_almost_banded(M: AlmostBandedMat, rhs, return_cond=False):
    """Solve a bordered almost-banded system by the Woodbury formula.

    The dense border is split off as a rank-K correction of a genuinely
    banded matrix B whose top K rows are unit rows (pinning the leading
    coefficients): A = B + I[:, :K] (border - I[:K, :]). One banded
    factorization of B, K+1 solves, and a K x K capacitance system give the
    exact solution in O(K^2 N + K^3) after the O(N) factorization.

    Eliminating the body against its own leading square would be cheaper
    still, but that square is the operator without its boundary rows; once
    the truncation resolves the homogeneous solutions it turns numerically
    singular. Pinned leading coefficients keep B well-conditioned.
    """
    K, n = M.k, M.n
    rhs = np.asarray(rhs, dtype=complex)
    if rhs.shape != (n,):
        raise ShapeMismatch("rhs length mismatch")
    if K == 0:
        lu = BandedLU(M.body)
        x = lu.solve(rhs)
        return (x, lu.cond_probe()) if return_cond else x
    body = M.body
    B = BandedMat.zeros(n, n, body.l + K, max(body.u - K, 0))
    B.data[B.u, :K] = 1.0
    for o in range(-body.l, body.u + 1):
        j0, j1 = body._diag_cols(o)
        if j1 > j0:
            B.data[B.u - (o - K), j0:j1] = body.data[body.u - o, j0:j1]
    lu = BandedLU(B)
    stacked = np.zeros((n, K + 1), dtype=complex)
    stacked[:K, 1:] = np.eye(K)
    stacked[:, 0] = rhs
    Y = lu.solve(stacked)
    y, W = Y[:, 0], Y[:, 1:]
    VT = M.border.copy()
    VT[:, :K] -= np.eye(K)
    S = np.eye(K, dtype=complex) + VT @ W
    try:
        t = np.linalg.solve(S, VT @ y)
    except np.linalg.LinAlgError as exc:
        raise SingularSchurComplement(str(exc)) from exc
    if not np.all(np.isfinite(t)):
        raise SingularSchurComplement("non-finite capacitance solve")
    x = y - W @ t
    return (x, lu.cond_probe()) if return_cond else x


def spy_triples(M):
    """Sorted (row, col, value) triples of stored nonzeros, zero-based."""
    return sorted(M.entries(), key=lambda t: (t[0], t[1]))
