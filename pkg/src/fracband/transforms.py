"""Coefficient transforms between Chebyshev and Legendre families.

The sampling front end produces Chebyshev T coefficients from point values on
nested second-kind grids (DCT-I via an even extension and the FFT). T
coefficients are then rebased: to U by the two-term identity, to Legendre by
running the Chebyshev three-term recurrence through the Legendre
multiplication operator. The Legendre path costs O(d^2) for degree d, exact
arithmetic graph, no quadrature.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidParameter, NoConvergence

MAX_GRID = 2**16 + 1


def cheb_points_second_kind(n: int) -> np.ndarray:
    """n Chebyshev points of the second kind, descending from 1 to -1."""
    if n < 2:
        raise InvalidParameter("need at least 2 points")
    return np.cos(np.pi * np.arange(n) / (n - 1))


def chebT_from_values(vals: np.ndarray) -> np.ndarray:
    """T coefficients interpolating values at second-kind points (descending).

    Complex-safe DCT-I through the FFT of the even extension.
    """
    v = np.asarray(vals, dtype=complex)
    n = v.size - 1
    if n < 1:
        return v.copy()
    ext = np.concatenate([v, v[-2:0:-1]])
    coeffs = np.fft.fft(ext)[: n + 1] / n
    coeffs[0] /= 2.0
    coeffs[-1] /= 2.0
    return coeffs


def _sample(f, pts: np.ndarray) -> np.ndarray:
    """Evaluate f at pts, accepting vectorized or scalar-only callables."""
    try:
        out = np.asarray(f(pts), dtype=complex)
        if out.shape == pts.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([f(x) for x in pts], dtype=complex)


def chebT_coeffs_adaptive(f, tol: float = 1e-14) -> np.ndarray:
    """Chebyshev T coefficients of f on [-1, 1], resolved adaptively.

    Grids of 9, 17, 33, ... second-kind points are tried until the tail of
    the expansion (the last max(3, d/50) coefficients) drops below
    tol * max|coefficient|; the accepted expansion is trimmed at the same
    relative threshold. Raises NoConvergence past 2^16 + 1 points and
    rejects non-finite samples.
    """
    if not (tol > 0):
        raise InvalidParameter("tol must be positive")
    n = 9
    while n <= MAX_GRID:
        pts = cheb_points_second_kind(n)
        vals = _sample(f, pts)
        if not np.all(np.isfinite(vals)):
            raise NoConvergence("non-finite sample value on the Chebyshev grid")
        c = chebT_from_values(vals)
        cmax = np.abs(c).max()
        if cmax == 0.0:
            return np.zeros(1, dtype=complex)
        ntail = max(3, c.size // 50)
        if np.abs(c[-ntail:]).max() < tol * cmax:
            keep = np.nonzero(np.abs(c) > tol * cmax)[0]
            d = keep[-1] + 1 if keep.size else 1
            return c[:d]
        n = 2 * (n - 1) + 1
    raise NoConvergence(f"no Chebyshev resolution below {MAX_GRID} points")


def convert_T_to_U(t: np.ndarray) -> np.ndarray:
    """Rebase a T expansion as a U expansion (same length).

    T_0 = U_0, T_1 = U_1/2, T_n = (U_n - U_{n-2})/2.
    """
    t = np.asarray(t, dtype=complex)
    n = t.size
    if n == 0:
        return t.copy()
    u = np.zeros(n, dtype=complex)
    u[0] = t[0]
    if n > 1:
        u[1:] = t[1:] / 2.0
    u[: n - 2] -= t[2:] / 2.0
    return u


def jacobi_apply(lam: float, c: np.ndarray, out_len=None) -> np.ndarray:
    """Apply multiplication-by-x in the C^(lambda) basis to a coefficient vector.

    Column k of the operator carries (k+1)/(2(k+lam)) to row k+1 and
    (k+2lam-1)/(2(k+lam)) to row k-1. lam=0 (Chebyshev T) is handled with its
    first-column special case.
    """
    c = np.asarray(c, dtype=complex)
    n = c.size
    m = n + 1 if out_len is None else out_len
    out = np.zeros(m, dtype=complex)
    if n == 0:
        return out
    k = np.arange(n, dtype=float)
    if lam == 0:
        down = np.where(k == 0, 1.0, 0.5)  # x T_0 = T_1, else 1/2
        up = np.full(n, 0.5)
    else:
        down = (k + 1.0) / (2.0 * (k + lam))
        up = (k + 2.0 * lam - 1.0) / (2.0 * (k + lam))
    lo = np.minimum(n + 1, m)
    out[1:lo] += (down * c)[: lo - 1]
    hi = min(n - 1, m)
    if hi > 0:
        out[:hi] += (up * c)[1 : hi + 1]
    return out


def cheb_to_legendre(t: np.ndarray) -> np.ndarray:
    """Legendre coefficients of a T expansion, by operator recurrence.

    Walks T_{j+1} = 2 x T_j - T_{j-1} with x applied through the Legendre
    Jacobi operator, accumulating t_j * coeffs(T_j). O(d^2) work, supports
    degrees well into the thousands.
    """
    t = np.asarray(t, dtype=complex)
    d = t.size
    if d == 0:
        return t.copy()
    out = np.zeros(d, dtype=complex)
    prev = np.zeros(d, dtype=complex)  # coeffs of T_{j-1} in P
    cur = np.zeros(d, dtype=complex)  # coeffs of T_j in P
    cur[0] = 1.0
    out += t[0] * cur
    if d == 1:
        return out
    prev, cur = cur, np.zeros(d, dtype=complex)
    cur[1] = 1.0  # T_1 = P_1
    out += t[1] * cur
    for j in range(1, d - 1):
        nxt = 2.0 * jacobi_apply(0.5, cur, out_len=d) - prev
        out += t[j + 1] * nxt
        prev, cur = cur, nxt
    return out


def legendre_to_cheb(p: np.ndarray) -> np.ndarray:
    """T coefficients of a Legendre expansion; inverse of cheb_to_legendre."""
    p = np.asarray(p, dtype=complex)
    d = p.size
    if d == 0:
        return p.copy()
    out = np.zeros(d, dtype=complex)
    prev = np.zeros(d, dtype=complex)
    cur = np.zeros(d, dtype=complex)
    cur[0] = 1.0
    out += p[0] * cur
    if d == 1:
        return out
    prev, cur = cur, np.zeros(d, dtype=complex)
    cur[1] = 1.0  # P_1 = T_1
    out += p[1] * cur
    for j in range(1, d - 1):
        # (j+1) P_{j+1} = (2j+1) x P_j - j P_{j-1}, x through the T basis
        nxt = ((2 * j + 1) * jacobi_apply(0.0, cur, out_len=d) - j * prev) / (j + 1)
        out += p[j + 1] * nxt
        prev, cur = cur, nxt
    return out


def eval_chebT(coeffs, x):
    """Clenshaw evaluation of a T expansion (transform tests only)."""
    c = np.asarray(coeffs, dtype=complex)
    scalar = np.ndim(x) == 0
    xv = np.asarray(x, dtype=float)
    b1 = np.zeros_like(xv, dtype=complex)
    b2 = np.zeros_like(xv, dtype=complex)
    for k in range(c.size - 1, 0, -1):
        b1, b2 = c[k] + 2.0 * xv * b1 - b2, b1
    out = (c[0] if c.size else 0.0) + xv * b1 - b2
    return out[()] if scalar else out
