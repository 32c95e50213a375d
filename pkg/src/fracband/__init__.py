"""Spectral solver for half-integer fractional equations on [-1, 1].

Solutions are direct sums of a Legendre series and sqrt(1+x) times a
second-kind Chebyshev series; operators act on the interleaved coefficients
through banded or almost-banded sections, so solves cost O(N) at spectral
accuracy.
"""

from .errors import (
    DomainError,
    FracbandError,
    InsufficientConstraints,
    InvalidSpec,
    NoConvergence,
    ParseError,
    SingularMatrix,
    SingularSchurComplement,
)
from .problem_io import load_problem, problem_from_json
from .problems import (
    CoeffFn,
    Constraint,
    ProblemSpec,
    Solution,
    Term,
    TermKind,
    term,
)
from .solving import (
    bench,
    convergence_study,
    estimate_error,
    solve,
    solve_at,
)
from .spaces import Fun, SumFun

__version__ = "0.1.0"

__all__ = [
    "CoeffFn",
    "Constraint",
    "DomainError",
    "FracbandError",
    "Fun",
    "InsufficientConstraints",
    "InvalidSpec",
    "NoConvergence",
    "ParseError",
    "ProblemSpec",
    "SingularMatrix",
    "SingularSchurComplement",
    "Solution",
    "SumFun",
    "Term",
    "TermKind",
    "bench",
    "convergence_study",
    "estimate_error",
    "load_problem",
    "problem_from_json",
    "solve",
    "solve_at",
    "term",
    "__version__",
]
