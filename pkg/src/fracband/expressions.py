"""Arithmetic expressions for coefficient functions in problem files.

Grammar (tightest first): atoms and calls, ^ (right-associative), unary
minus, * and /, + and -. Names are the variable x, the constants pi, e, i,
and the function heads exp, sqrt, erfc, erf, sin, cos, abs.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass

from .errors import DomainError, ParseError
from .special import erfc as _erfc_real

__all__ = [
    "Num",
    "Name",
    "Neg",
    "BinOp",
    "Call",
    "parse_expr",
    "to_source",
    "evaluate",
    "compile_expr",
]

FUNCTIONS = ("exp", "sqrt", "erfc", "erf", "sin", "cos", "abs")
CONSTANTS = ("x", "pi", "e", "i")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    fn: str
    arg: object


_TOKEN = re.compile(
    r"""\s*(?:
        (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
      | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
      | (?P<op>[-+*/^()])
    )""",
    re.VERBOSE,
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == m.start():
            rest = text[pos:].lstrip()
            if not rest:
                break
            at = len(text) - len(rest)
            raise ParseError(
                f"unexpected character {rest[0]!r}",
                offset=len(text[:at].encode("utf-8")),
                expected=("number", "name", "operator"),
            )
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected):
        kind, value, at = self.peek()
        what = "end of input" if kind == "end" else repr(value)
        raise ParseError(
            f"unexpected {what}",
            offset=len(self.text[:at].encode("utf-8")),
            expected=expected,
        )

    def expr(self):
        node = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        node = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            # the exponent re-enters at unary, so ^ chains to the right
            # and signed exponents parse without parentheses
            node = BinOp("^", node, self.unary())
        return node

    def atom(self):
        kind, value, at = self.peek()
        if kind == "num":
            self.take()
            return Num(float(value))
        if kind == "name":
            self.take()
            if self.peek()[:2] == ("op", "("):
                if value not in FUNCTIONS:
                    raise ParseError(
                        f"unknown function {value!r}",
                        offset=len(self.text[:at].encode("utf-8")),
                        expected=FUNCTIONS,
                    )
                self.take()
                arg = self.expr()
                if self.peek()[:2] != ("op", ")"):
                    self.fail(expected=("')'",))
                self.take()
                return Call(value, arg)
            if value not in CONSTANTS:
                raise ParseError(
                    f"unknown name {value!r}",
                    offset=len(self.text[:at].encode("utf-8")),
                    expected=CONSTANTS + FUNCTIONS,
                )
            return Name(value)
        if (kind, value) == ("op", "("):
            self.take()
            node = self.expr()
            if self.peek()[:2] != ("op", ")"):
                self.fail(expected=("')'",))
            self.take()
            return node
        self.fail(expected=("number", "name", "'('", "'-'"))


def parse_expr(text: str):
    if not isinstance(text, str):
        raise ParseError("expression must be a string", offset=0, expected=())
    p = _Parser(text)
    node = p.expr()
    if p.peek()[0] != "end":
        p.fail(expected=("operator", "end of input"))
    return node


_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _prec(node) -> int:
    if isinstance(node, BinOp):
        if node.op in "+-":
            return _PREC_ADD
        if node.op in "*/":
            return _PREC_MUL
        return _PREC_POW
    if isinstance(node, Neg):
        return _PREC_NEG
    return _PREC_ATOM


def _wrap(s: str, need: bool) -> str:
    return f"({s})" if need else s


def to_source(node) -> str:
    """Render an AST back to text; parse(to_source(t)) == t."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Name):
        return node.name
    if isinstance(node, Neg):
        return "-" + _wrap(to_source(node.arg), _prec(node.arg) < _PREC_NEG)
    if isinstance(node, Call):
        return f"{node.fn}({to_source(node.arg)})"
    if isinstance(node, BinOp):
        if node.op == "^":
            left = _wrap(to_source(node.left), _prec(node.left) < _PREC_ATOM)
            right = _wrap(to_source(node.right), _prec(node.right) < _PREC_NEG)
            return f"{left}^{right}"
        own = _prec(node)
        left = _wrap(to_source(node.left), _prec(node.left) < own)
        # same-precedence right operands keep their parentheses so the
        # reparsed tree associates identically
        right = _wrap(to_source(node.right), _prec(node.right) <= own)
        return f"{left} {node.op} {right}"
    raise TypeError(f"not an expression node: {node!r}")


def _erf_like(fn: str, z: complex) -> complex:
    if abs(z.imag) > 1e-14 * max(1.0, abs(z.real)):
        raise DomainError(f"{fn} takes real arguments, got {z}")
    t = z.real
    if fn == "erfc":
        return _erfc_real(t) if t >= 0 else 2.0 - _erfc_real(-t)
    c = 1.0 - _erfc_real(abs(t))
    return c if t >= 0 else -c


def evaluate(node, x) -> complex:
    """Evaluate at a point; singularities surface as DomainError."""
    if isinstance(node, Num):
        return complex(node.value)
    if isinstance(node, Name):
        if node.name == "x":
            return complex(x)
        if node.name == "pi":
            return complex(math.pi)
        if node.name == "e":
            return complex(math.e)
        return 1j
    if isinstance(node, Neg):
        return -evaluate(node.arg, x)
    if isinstance(node, Call):
        z = evaluate(node.arg, x)
        if node.fn == "exp":
            return cmath.exp(z)
        if node.fn == "sqrt":
            return cmath.sqrt(z)
        if node.fn == "sin":
            return cmath.sin(z)
        if node.fn == "cos":
            return cmath.cos(z)
        if node.fn == "abs":
            return complex(abs(z))
        return _erf_like(node.fn, z)
    if isinstance(node, BinOp):
        a = evaluate(node.left, x)
        b = evaluate(node.right, x)
        try:
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            if node.op == "/":
                return a / b
            return a**b
        except ZeroDivisionError:
            raise DomainError(f"expression singular at x = {x}") from None
        except OverflowError:
            raise DomainError(f"expression overflows at x = {x}") from None
    raise TypeError(f"not an expression node: {node!r}")


def compile_expr(text: str):
    """Parse once, return a scalar callable of x."""
    node = parse_expr(text)
    return lambda x: evaluate(node, x)
