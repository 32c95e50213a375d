"""Independent reference computations shared by the test modules.

Nothing in here touches the package's own evaluators or operators: polynomial
values come from the forward three-term recurrence, half-order integrals from
scipy's adaptive quadrature after an explicit desingularizing substitution,
and special functions from scipy. Tests compare package output against these.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import scipy.integrate
import scipy.special

SQRT_PI = math.sqrt(math.pi)

PROBLEM_DIR = Path(__file__).resolve().parent.parent / "problems"


def ultra(lam: float, n: int, x: float) -> float:
    """C_n^(lam)(x) by the forward recurrence
    (k+1) C_{k+1} = 2(k+lam) x C_k - (k+2 lam - 1) C_{k-1}."""
    if n < 0:
        return 0.0
    c_prev, c_cur = 0.0, 1.0
    for k in range(n):
        c_prev, c_cur = c_cur, (
            2.0 * (k + lam) * x * c_cur - (k + 2.0 * lam - 1.0) * c_prev
        ) / (k + 1.0)
    return c_cur


def ultra_series(lam: float, coeffs, x: float) -> complex:
    return sum(c * ultra(lam, k, x) for k, c in enumerate(coeffs))


def legP(n: int, x: float) -> float:
    return ultra(0.5, n, x)


def chebU(n: int, x: float) -> float:
    return ultra(1.0, n, x)


def _quad(f, a, b):
    val, err = scipy.integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


def q_half_smooth(g, x: float) -> float:
    """Half integral of a smooth g at x.

    (1/sqrt(pi)) int_{-1}^x g(t) (x-t)^(-1/2) dt with t = x - s^2, which
    turns the endpoint singularity into a plain integral over s in [0, L],
    L = sqrt(1+x).
    """
    L = math.sqrt(1.0 + x)
    return (2.0 / SQRT_PI) * _quad(lambda s: g(x - s * s), 0.0, L)


def q_half_weighted(lam: float, h, x: float) -> float:
    """Half integral of (1+t)^(lam - 1/2) h(t) at x.

    Substituting 1 + t = L^2 cos^2(theta) (L = sqrt(1+x)) absorbs both the
    weight and the kernel singularity:
    (2/sqrt(pi)) L^(2 lam) int_0^(pi/2) cos^(2 lam)(theta) h(-1 + L^2 cos^2 theta) dtheta.
    """
    L2 = 1.0 + x
    return (
        (2.0 / SQRT_PI)
        * L2**lam
        * _quad(
            lambda th: math.cos(th) ** (2.0 * lam) * h(-1.0 + L2 * math.cos(th) ** 2),
            0.0,
            math.pi / 2.0,
        )
    )


def q_half_inv_weight(g, x: float) -> float:
    """Half integral of (1+t)^(-1/2) g(t) at x; the lam = 0 substitution."""
    L2 = 1.0 + x
    return (2.0 / SQRT_PI) * _quad(
        lambda th: g(-1.0 + L2 * math.cos(th) ** 2), 0.0, math.pi / 2.0
    )


def relax_exact(x):
    """e^(1+x) erfc(sqrt(1+x)), the closed-form solution shared by the
    relaxation problems."""
    xv = np.asarray(x, dtype=float)
    out = np.exp(1.0 + xv) * scipy.special.erfc(np.sqrt(1.0 + xv))
    return out if out.ndim else float(out)


GRID100 = np.linspace(-1.0, 1.0, 100)
