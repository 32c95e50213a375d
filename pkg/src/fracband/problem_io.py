"""JSON problem files: strict models and conversion to ProblemSpec.

A file names the equation kind, the terms (orders as "k/2" strings,
coefficients as expression strings, plain numbers, or Chebyshev coefficient
lists), any point constraints, the right-hand side, a tolerance, and either
a truncation size or "auto".  Unknown fields are rejected so typos fail
loudly instead of being ignored.
"""

from __future__ import annotations

import json
import re
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .errors import ParseError
from .expressions import compile_expr
from .problems import CoeffFn, Constraint, ProblemSpec, Term, TermKind

__all__ = [
    "CoeffPartsModel",
    "TermModel",
    "ConstraintModel",
    "ProblemFileModel",
    "problem_from_json",
    "load_problem",
    "model_to_spec",
]

_ORDER = re.compile(r"^(\d+)/2$")

CoeffPart = Union[str, float, List[float]]


class CoeffPartsModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    smooth: Optional[CoeffPart] = None
    weighted: Optional[CoeffPart] = None


CoeffValue = Union[CoeffPartsModel, str, float, List[float]]


class TermModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["identity", "integral", "derivative_rl", "derivative_caputo"]
    order: Optional[str] = None
    left: Optional[CoeffValue] = None
    right: Optional[CoeffValue] = None


class ConstraintModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    point: float
    value: Union[float, str] = 0.0


class ProblemFileModel(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    equation: Literal["fie", "fde_rl", "fde_caputo"]
    terms: List[TermModel] = Field(min_length=1)
    constraints: List[ConstraintModel] = Field(default_factory=list)
    rhs: Optional[Union[CoeffPartsModel, str, float, List[float]]] = None
    tolerance: float = 1e-14
    n: Union[int, Literal["auto"]] = Field(default="auto", alias="N")


def _part(value):
    if value is None:
        return None
    if isinstance(value, str):
        return compile_expr(value)
    if isinstance(value, list):
        return value
    return complex(value)


def _coeff(value) -> Optional[CoeffFn]:
    if value is None:
        return None
    if isinstance(value, CoeffPartsModel):
        return CoeffFn(smooth=_part(value.smooth), weighted=_part(value.weighted))
    return CoeffFn(smooth=_part(value))


def _order(text: Optional[str], kind: str) -> int:
    if text is None:
        if kind == "identity":
            return 0
        raise ParseError(f"term of kind {kind!r} needs an order")
    m = _ORDER.match(text.strip())
    if m is None:
        raise ParseError(
            f"term order must be a half-integer written as \"k/2\", got {text!r}"
        )
    return int(m.group(1))


def model_to_spec(model: ProblemFileModel) -> ProblemSpec:
    terms = []
    for tm in model.terms:
        terms.append(
            Term(
                kind=TermKind(tm.kind),
                two_order=_order(tm.order, tm.kind),
                left=_coeff(tm.left),
                right=_coeff(tm.right),
            )
        )
    constraints = []
    for cm in model.constraints:
        value = cm.value
        if isinstance(value, str):
            value = compile_expr(value)(0.0)
        constraints.append(Constraint(point=cm.point, value=complex(value)))
    rhs = _coeff(model.rhs)
    spec = ProblemSpec(
        terms=tuple(terms),
        constraints=tuple(constraints),
        tolerance=model.tolerance,
        n=None if model.n == "auto" else int(model.n),
        **({} if rhs is None else {"rhs": rhs}),
    )
    if spec.kind != model.equation:
        raise ParseError(
            f"equation declared {model.equation!r} but the terms make it {spec.kind!r}"
        )
    return spec


def problem_from_json(text: str) -> ProblemSpec:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", offset=exc.pos) from exc
    try:
        model = ProblemFileModel.model_validate(raw)
    except ValidationError as exc:
        raise ParseError(_summarize(exc)) from exc
    return model_to_spec(model)


def load_problem(path) -> ProblemSpec:
    with open(path, encoding="utf-8") as fh:
        return problem_from_json(fh.read())


def _summarize(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors()[:4]:
        loc = ".".join(str(p) for p in err["loc"]) or "file"
        parts.append(f"{loc}: {err['msg']}")
    return "problem file invalid: " + "; ".join(parts)
