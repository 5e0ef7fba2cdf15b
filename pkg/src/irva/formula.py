"""Boolean combinations of linear constraints: parsing, printing, evaluation.

Text format::

    # comment
    dim 2;
    x1 >= 1 & x2 < 2 & x1 - x2 <= 1

Atoms compare two sums of terms (``3*x1``, ``-1/2*x2``, ``x3``, ``7/4``);
connectives are ``!``, ``&``, ``|`` in decreasing precedence.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence, Union

from .linalg import DimensionError, RVector, dot, format_rational

OPS = ("<", "<=", "=", ">=", ">")

_COMPARE = {
    "<": lambda x, b: x < b,
    "<=": lambda x, b: x <= b,
    "=": lambda x, b: x == b,
    ">=": lambda x, b: x >= b,
    ">": lambda x, b: x > b,
}


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Constraint:
    """``a . x  op  b``."""

    a: RVector
    b: Fraction
    op: str

    def holds(self, p: Sequence) -> bool:
        return _COMPARE[self.op](dot(self.a, p), self.b)


@dataclass(frozen=True)
class Not:
    child: "Node"


@dataclass(frozen=True)
class And:
    children: tuple


@dataclass(frozen=True)
class Or:
    children: tuple


@dataclass(frozen=True)
class Const:
    value: bool


TRUE = Const(True)
FALSE = Const(False)

Node = Union[Constraint, Not, And, Or, Const]


@dataclass(frozen=True)
class Formula:
    dim: int
    root: Node

    def __str__(self) -> str:
        return to_text(self)


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<num>\d+(?:/\d+)?)
  | (?P<var>x(?P<idx>\d+))
  | (?P<kw>dim|true|false)\b
  | (?P<op><=|>=|<|>|=)
  | (?P<punct>[-+*!&|();])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup if m.lastgroup != "idx" else "var"
        if kind != "ws":
            toks.append(_Tok(kind, m.group(kind), line, pos - line_start + 1))
        chunk = m.group(0)
        if "\n" in chunk:
            line += chunk.count("\n")
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.dim = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> _Tok:
        tok = self.take()
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok.line, tok.col)
        return tok

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        raise ParseError(msg, tok.line, tok.col)

    def formula(self) -> Formula:
        self.expect("dim")
        tok = self.take()
        if tok.kind != "num" or "/" in tok.text or int(tok.text) < 1:
            self.error("dimension must be a positive integer", tok)
        self.dim = int(tok.text)
        self.expect(";")
        root = self.disjunction()
        if self.peek().kind != "eof":
            self.error(f"unexpected {self.peek().text!r}")
        return Formula(self.dim, root)

    def disjunction(self) -> Node:
        parts = [self.conjunction()]
        while self.peek().text == "|":
            self.take()
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self) -> Node:
        parts = [self.unary()]
        while self.peek().text == "&":
            self.take()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self) -> Node:
        tok = self.peek()
        if tok.text == "!":
            self.take()
            return Not(self.unary())
        if tok.text == "(":
            self.take()
            node = self.disjunction()
            self.expect(")")
            return node
        if tok.text in ("true", "false"):
            self.take()
            return Const(tok.text == "true")
        return self.atom()

    def atom(self) -> Constraint:
        lhs, lc = self.sum()
        tok = self.take()
        if tok.kind != "op":
            self.error("expected a comparison operator", tok)
        rhs, rc = self.sum()
        a = tuple(x - y for x, y in zip(lhs, rhs))
        return Constraint(a, rc - lc, tok.text)

    def sum(self) -> tuple[list[Fraction], Fraction]:
        coeffs = [Fraction(0)] * self.dim
        const = Fraction(0)
        sign = 1
        tok = self.peek()
        if tok.text in "+-" and tok.kind == "punct":
            self.take()
            sign = -1 if tok.text == "-" else 1
        while True:
            var, value = self.term()
            if var is None:
                const += sign * value
            else:
                coeffs[var] += sign * value
            tok = self.peek()
            if tok.kind == "punct" and tok.text in "+-":
                self.take()
                sign = -1 if tok.text == "-" else 1
            else:
                return coeffs, const

    def term(self) -> tuple[int | None, Fraction]:
        tok = self.take()
        if tok.kind == "num":
            value = Fraction(tok.text)
            if self.peek().text == "*":
                self.take()
                return self.variable(), value
            return None, value
        if tok.kind == "var":
            self.i -= 1
            return self.variable(), Fraction(1)
        self.error(f"expected a term, found {tok.text or 'end of input'!r}", tok)

    def variable(self) -> int:
        tok = self.take()
        if tok.kind != "var":
            self.error("expected a variable x<k>", tok)
        k = int(tok.text[1:])
        if not 1 <= k <= self.dim:
            self.error(f"variable {tok.text} exceeds declared dimension {self.dim}", tok)
        return k - 1


def parse(text: str) -> Formula:
    return _Parser(text).formula()


# -- printing ----------------------------------------------------------------

def _sum_text(a: Sequence[Fraction]) -> str:
    parts = []
    for k, c in enumerate(a):
        if not c:
            continue
        mag = abs(c)
        term = f"x{k + 1}" if mag == 1 else f"{format_rational(mag)}*x{k + 1}"
        if not parts:
            parts.append(term if c > 0 else "-" + term)
        else:
            parts.append(("+ " if c > 0 else "- ") + term)
    return " ".join(parts) if parts else "0"


def _node_text(node: Node, parent: str = "") -> str:
    if isinstance(node, Const):
        return "true" if node.value else "false"
    if isinstance(node, Constraint):
        text = f"{_sum_text(node.a)} {node.op} {format_rational(node.b)}"
        return f"({text})" if parent == "!" else text
    if isinstance(node, Not):
        return "!" + _node_text(node.child, "!")
    sym = "&" if isinstance(node, And) else "|"
    text = f" {sym} ".join(_node_text(c, sym) for c in node.children)
    return f"({text})" if parent else text


def to_text(f: Formula) -> str:
    return f"dim {f.dim}; {_node_text(f.root)}"


# -- semantics ---------------------------------------------------------------

def _eval(node: Node, p: Sequence) -> bool:
    if isinstance(node, Constraint):
        return node.holds(p)
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Not):
        return not _eval(node.child, p)
    if isinstance(node, And):
        return all(_eval(c, p) for c in node.children)
    return any(_eval(c, p) for c in node.children)


def evaluate(f: Formula, p: Sequence) -> bool:
    """Exact truth value of ``f`` at the point ``p``."""
    if len(p) != f.dim:
        raise DimensionError(f"point of dimension {len(p)} for a formula of dimension {f.dim}")
    return _eval(f.root, tuple(Fraction(x) for x in p))


def atoms(f: Formula | Node) -> list[Constraint]:
    node = f.root if isinstance(f, Formula) else f
    if isinstance(node, Constraint):
        return [node]
    if isinstance(node, Not):
        return atoms(node.child)
    if isinstance(node, (And, Or)):
        return [a for c in node.children for a in atoms(c)]
    return []


def integer_constraint(c: Constraint) -> Constraint:
    """Scale by a positive factor so that all coefficients are coprime integers."""
    values = list(c.a) + [c.b]
    den = 1
    for x in values:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in values]
    g = 0
    for x in ints:
        g = gcd(g, x)
    g = g or 1
    return Constraint(tuple(Fraction(x // g) for x in ints[:-1]), Fraction(ints[-1] // g), c.op)


def _fold(node: Node) -> Node:
    """Constant-fold trivial atoms ``0 . x # b`` and propagate constants."""
    if isinstance(node, Constraint):
        if not any(node.a):
            return Const(_COMPARE[node.op](Fraction(0), node.b))
        return integer_constraint(node)
    if isinstance(node, Const):
        return node
    if isinstance(node, Not):
        child = _fold(node.child)
        return Const(not child.value) if isinstance(child, Const) else Not(child)
    absorbing = isinstance(node, Or)  # True absorbs Or, False absorbs And
    kids = []
    for c in map(_fold, node.children):
        if isinstance(c, Const):
            if c.value == absorbing:
                return c
            continue
        kids.append(c)
    if not kids:
        return Const(not absorbing)
    if len(kids) == 1:
        return kids[0]
    return type(node)(tuple(kids))


def _homogenize(node: Node) -> Node:
    if isinstance(node, Constraint):
        return Constraint(tuple(node.a) + (-node.b,), Fraction(0), node.op)
    if isinstance(node, Not):
        return Not(_homogenize(node.child))
    if isinstance(node, (And, Or)):
        return type(node)(tuple(_homogenize(c) for c in node.children))
    return node


def conify(f: Formula) -> Formula:
    """Formula of the representing cone ``{t(x, 1) : t > 0, x in f}``."""
    n = f.dim
    positive = Constraint(tuple(Fraction(int(i == n)) for i in range(n + 1)), Fraction(0), ">")
    body = _homogenize(_fold(f.root))
    if isinstance(body, Const):
        return Formula(n + 1, positive if body.value else FALSE)
    if isinstance(body, And):
        return Formula(n + 1, And(body.children + (positive,)))
    return Formula(n + 1, And((body, positive)))


def simplified(f: Formula) -> Formula:
    return Formula(f.dim, _fold(f.root))


__all__ = [
    "And",
    "Const",
    "Constraint",
    "FALSE",
    "Formula",
    "Not",
    "OPS",
    "Or",
    "ParseError",
    "TRUE",
    "atoms",
    "conify",
    "evaluate",
    "integer_constraint",
    "parse",
    "simplified",
    "to_text",
]
