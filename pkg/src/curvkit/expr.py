"""Symbolic scalar expressions in chart coordinates.

The AST is deliberately small: numeric constants, coordinate variables, unary
negation, the functions sin/cos/tan/exp/log/sqrt, and the binary operators
``+ - * / ^``.  Differentiation is exact and closed over this vocabulary;
evaluation is plain float arithmetic.  There is no general simplifier, only
constant folding and neutral-element elimination, enough to keep derivative
trees from silting up with ``0*...`` and ``...^1`` debris.

Grammar (infix), as documented in the README::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?        # right-associative
    atom   := NUMBER | 'pi' | COORD | FUNC '(' expr ')' | '(' expr ')'

``^`` binds tighter than unary minus, so ``-x^2`` parses as ``-(x^2)``.
Identifiers match ``[A-Za-z_][A-Za-z0-9_]*``; numbers are ordinary decimal
literals with optional fraction and exponent.

Expressions are immutable after construction and safe to share between
threads.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import DomainError, ParseError, UnknownIdentifier

__all__ = [
    "Expression", "parse", "differentiate", "evaluate",
    "Num", "Var", "Neg", "Fun", "BinOp",
]


# --------------------------------------------------------------------------
# AST nodes

class Node:
    __slots__ = ()


@dataclass(frozen=True)
class Num(Node):
    value: float


@dataclass(frozen=True)
class Var(Node):
    name: str


@dataclass(frozen=True)
class Neg(Node):
    arg: Node


@dataclass(frozen=True)
class Fun(Node):
    name: str
    arg: Node


@dataclass(frozen=True)
class BinOp(Node):
    op: str  # one of + - * / ^
    left: Node
    right: Node


_FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "exp": math.exp,
    "log": math.log,
    "sqrt": math.sqrt,
}

_ZERO = Num(0.0)
_ONE = Num(1.0)


# --------------------------------------------------------------------------
# Pointwise semantics (shared by evaluation and constant folding)

def _apply_fun(name: str, x: float, node_text: str | None = None) -> float:
    if name == "log" and x <= 0.0:
        raise DomainError(f"log of non-positive value {x!r}", node_text)
    if name == "sqrt" and x < 0.0:
        raise DomainError(f"sqrt of negative value {x!r}", node_text)
    try:
        y = _FUNCTIONS[name](x)
    except (ValueError, OverflowError) as exc:
        raise DomainError(f"{name} failed: {exc}", node_text) from None
    if not math.isfinite(y):
        raise DomainError(f"{name} produced non-finite value", node_text)
    return y


def _apply_binop(op: str, a: float, b: float, node_text: str | None = None) -> float:
    if op == "+":
        y = a + b
    elif op == "-":
        y = a - b
    elif op == "*":
        y = a * b
    elif op == "/":
        if b == 0.0:
            raise DomainError("division by zero", node_text)
        y = a / b
    elif op == "^":
        if a == 0.0 and b < 0.0:
            raise DomainError("zero raised to a negative power", node_text)
        if a < 0.0 and not float(b).is_integer():
            raise DomainError("negative base with non-integer exponent", node_text)
        try:
            y = math.pow(a, b)
        except (ValueError, OverflowError) as exc:
            raise DomainError(f"power failed: {exc}", node_text) from None
    else:  # pragma: no cover - guarded by the parser
        raise AssertionError(f"unknown operator {op!r}")
    if not math.isfinite(y):
        raise DomainError("operation produced non-finite value", node_text)
    return y


# --------------------------------------------------------------------------
# Smart constructors (constant folding only; no algebraic rewriting)

def num(value: float) -> Num:
    return Num(float(value))


def neg(x: Node) -> Node:
    if isinstance(x, Num):
        return Num(-x.value)
    if isinstance(x, Neg):
        return x.arg
    return Neg(x)


def add(a: Node, b: Node) -> Node:
    if isinstance(a, Num) and isinstance(b, Num):
        return _fold_binop("+", a, b)
    if isinstance(a, Num) and a.value == 0.0:
        return b
    if isinstance(b, Num) and b.value == 0.0:
        return a
    return BinOp("+", a, b)


def sub(a: Node, b: Node) -> Node:
    if isinstance(a, Num) and isinstance(b, Num):
        return _fold_binop("-", a, b)
    if isinstance(b, Num) and b.value == 0.0:
        return a
    if isinstance(a, Num) and a.value == 0.0:
        return neg(b)
    return BinOp("-", a, b)


def mul(a: Node, b: Node) -> Node:
    if isinstance(a, Num) and isinstance(b, Num):
        return _fold_binop("*", a, b)
    if isinstance(a, Num):
        if a.value == 0.0:
            return _ZERO
        if a.value == 1.0:
            return b
    if isinstance(b, Num):
        if b.value == 0.0:
            return _ZERO
        if b.value == 1.0:
            return a
    return BinOp("*", a, b)


def div(a: Node, b: Node) -> Node:
    if isinstance(a, Num) and isinstance(b, Num) and b.value != 0.0:
        return _fold_binop("/", a, b)
    if isinstance(a, Num) and a.value == 0.0:
        return _ZERO
    if isinstance(b, Num) and b.value == 1.0:
        return a
    return BinOp("/", a, b)


def power(a: Node, b: Node) -> Node:
    if isinstance(a, Num) and isinstance(b, Num):
        return _fold_binop("^", a, b)
    if isinstance(b, Num):
        if b.value == 1.0:
            return a
        if b.value == 0.0:
            return _ONE
    return BinOp("^", a, b)


def fun(name: str, arg: Node) -> Node:
    if name not in _FUNCTIONS:
        raise UnknownIdentifier(name)
    if isinstance(arg, Num):
        try:
            return Num(_apply_fun(name, arg.value))
        except DomainError:
            pass  # defer to evaluation time
    return Fun(name, arg)


def _fold_binop(op: str, a: Num, b: Num) -> Node:
    try:
        return Num(_apply_binop(op, a.value, b.value))
    except DomainError:
        return BinOp(op, a, b)  # defer to evaluation time


# --------------------------------------------------------------------------
# Differentiation
#
# Smart constructors share subtrees aggressively, so large expressions are
# DAGs rather than trees (the same inverse-metric node appears in every
# Christoffel symbol, say).  Differentiation and evaluation therefore memoize
# on node identity -- nodes are immutable, so this is sound -- which keeps
# both walks linear in the DAG size instead of exponential.

def diff_node(node: Node, name: str, memo: dict | None = None) -> Node:
    """Exact partial derivative of `node` with respect to the coordinate `name`."""
    if memo is None:
        memo = {}
    key = id(node)
    hit = memo.get(key)
    if hit is not None:
        return hit
    out = _diff_uncached(node, name, memo)
    memo[key] = out
    return out


def _diff_uncached(node: Node, name: str, memo: dict) -> Node:
    if isinstance(node, Num):
        return _ZERO
    if isinstance(node, Var):
        return _ONE if node.name == name else _ZERO
    if isinstance(node, Neg):
        return neg(diff_node(node.arg, name, memo))
    if isinstance(node, Fun):
        du = diff_node(node.arg, name, memo)
        u = node.arg
        if node.name == "sin":
            outer = fun("cos", u)
        elif node.name == "cos":
            outer = neg(fun("sin", u))
        elif node.name == "tan":
            outer = div(_ONE, power(fun("cos", u), Num(2.0)))
        elif node.name == "exp":
            outer = fun("exp", u)
        elif node.name == "log":
            outer = div(_ONE, u)
        elif node.name == "sqrt":
            outer = div(_ONE, mul(Num(2.0), fun("sqrt", u)))
        else:  # pragma: no cover
            raise AssertionError(node.name)
        return mul(outer, du)
    if isinstance(node, BinOp):
        a, b = node.left, node.right
        da = diff_node(a, name, memo)
        if node.op == "^" and isinstance(b, Num):
            # d(u^c) = c * u^(c-1) * u'
            return mul(mul(b, power(a, Num(b.value - 1.0))), da)
        db = diff_node(b, name, memo)
        if node.op == "+":
            return add(da, db)
        if node.op == "-":
            return sub(da, db)
        if node.op == "*":
            return add(mul(da, b), mul(a, db))
        if node.op == "/":
            return div(sub(mul(da, b), mul(a, db)), power(b, Num(2.0)))
        if node.op == "^":
            # general rule via u^v = exp(v log u)
            return mul(power(a, b), add(mul(db, fun("log", a)),
                                        mul(b, div(da, a))))
    raise AssertionError(f"unreachable node {node!r}")  # pragma: no cover


# --------------------------------------------------------------------------
# Evaluation

def eval_node(node: Node, env: Mapping[str, float],
              memo: dict | None = None) -> float:
    """Evaluate a node against a name -> value environment.  Passing one
    `memo` dict across several evaluations with the same environment shares
    work between expressions with common subtrees."""
    if memo is None:
        memo = {}
    key = id(node)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if isinstance(node, Num):
        out = node.value
    elif isinstance(node, Var):
        out = env[node.name]
    elif isinstance(node, Neg):
        out = -eval_node(node.arg, env, memo)
    elif isinstance(node, Fun):
        x = eval_node(node.arg, env, memo)
        try:
            out = _apply_fun(node.name, x)
        except DomainError as exc:
            raise DomainError(exc.args[0], _error_context(node)) from None
    elif isinstance(node, BinOp):
        a = eval_node(node.left, env, memo)
        b = eval_node(node.right, env, memo)
        try:
            out = _apply_binop(node.op, a, b)
        except DomainError as exc:
            raise DomainError(exc.args[0], _error_context(node)) from None
    else:  # pragma: no cover
        raise AssertionError(f"unreachable node {node!r}")
    memo[key] = out
    return out


def _error_context(node: Node, limit: int = 120) -> str:
    """Printable form of the offending node for error messages, truncated so
    huge derived expressions do not flood the message."""
    text = to_string(node, depth_limit=6)
    return text if len(text) <= limit else text[:limit] + "..."


# --------------------------------------------------------------------------
# Canonical printer

_PREC_ADD = 1
_PREC_MUL = 2
_PREC_NEG = 2.5
_PREC_POW = 3
_PREC_ATOM = 9


def _prec(node: Node) -> float:
    if isinstance(node, BinOp):
        return {"+": _PREC_ADD, "-": _PREC_ADD,
                "*": _PREC_MUL, "/": _PREC_MUL,
                "^": _PREC_POW}[node.op]
    if isinstance(node, Neg):
        return _PREC_NEG
    if isinstance(node, Num) and node.value < 0.0:
        # prints with a leading '-', so it binds like a negation
        return _PREC_NEG
    return _PREC_ATOM


def to_string(node: Node, depth_limit: int | None = None) -> str:
    """Canonical infix form; `parse(to_string(e))` reproduces `e` up to
    negative-constant normalization (stable from the second round trip on).
    `depth_limit` elides deeper subtrees as '...' (error messages only; the
    elided form is not parseable)."""
    if depth_limit is not None and depth_limit <= 0:
        return "..."
    deeper = None if depth_limit is None else depth_limit - 1
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Fun):
        return f"{node.name}({to_string(node.arg, deeper)})"
    if isinstance(node, Neg):
        inner = to_string(node.arg, deeper)
        if _prec(node.arg) <= _PREC_NEG:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, BinOp):
        op = node.op
        p = _prec(node)
        ls = to_string(node.left, deeper)
        rs = to_string(node.right, deeper)
        if op == "^":
            # right-associative; a negative-constant base needs parens
            if _prec(node.left) <= p:
                ls = f"({ls})"
            if _prec(node.right) < p:
                rs = f"({rs})"
        else:
            if _prec(node.left) < p:
                ls = f"({ls})"
            # left-associative: parenthesize same-precedence right operands;
            # also parenthesize leading-minus right operands for readability
            if _prec(node.right) <= p:
                rs = f"({rs})"
        return f"{ls}{op}{rs}"
    raise AssertionError(f"unreachable node {node!r}")  # pragma: no cover


# --------------------------------------------------------------------------
# Parser

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    """Return (kind, text, byte_offset) triples, terminated by ('end', '', n)."""
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}",
                             _byte_offset(text, pos))
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), _byte_offset(text, pos)))
        pos = m.end()
    tokens.append(("end", "", _byte_offset(text, len(text))))
    return tokens


def _byte_offset(text: str, char_index: int) -> int:
    return len(text[:char_index].encode("utf-8"))


class _Parser:
    def __init__(self, text: str, coords: Sequence[str]):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.coords = frozenset(coords)

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, symbol: str):
        kind, text, offset = self.peek()
        if kind == "op" and text == symbol:
            return self.advance()
        raise ParseError(f"expected {symbol!r}", offset)

    def parse(self) -> Node:
        node = self.expression()
        kind, text, offset = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected trailing input {text!r}", offset)
        return node

    def expression(self) -> Node:
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                rhs = self.term()
                node = add(node, rhs) if text == "+" else sub(node, rhs)
            else:
                return node

    def term(self) -> Node:
        node = self.factor()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                rhs = self.factor()
                node = mul(node, rhs) if text == "*" else div(node, rhs)
            else:
                return node

    def factor(self) -> Node:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return neg(self.factor())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            return power(base, self.factor())
        return base

    def atom(self) -> Node:
        kind, text, offset = self.advance()
        if kind == "num":
            return Num(float(text))
        if kind == "ident":
            nxt_kind, nxt_text, _ = self.peek()
            if nxt_kind == "op" and nxt_text == "(":
                if text not in _FUNCTIONS:
                    raise UnknownIdentifier(text, offset)
                self.advance()
                arg = self.expression()
                self.expect_op(")")
                return fun(text, arg)
            if text in self.coords:
                return Var(text)
            if text == "pi":
                return Num(math.pi)
            raise UnknownIdentifier(text, offset)
        if kind == "op" and text == "(":
            node = self.expression()
            self.expect_op(")")
            return node
        if kind == "end":
            raise ParseError("unexpected end of input", offset)
        raise ParseError(f"unexpected token {text!r}", offset)


_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def _check_coords(coords: Iterable[str]) -> tuple[str, ...]:
    coords = tuple(coords)
    seen = set()
    for c in coords:
        if not _IDENT_RE.match(c):
            raise ParseError(f"invalid coordinate name {c!r}", 0)
        if c in seen:
            raise ParseError(f"duplicate coordinate name {c!r}", 0)
        seen.add(c)
    return coords


# --------------------------------------------------------------------------
# Public wrapper

class Expression:
    """A symbolic function of an ordered coordinate tuple.

    Immutable.  Supports arithmetic operators (`+ - * / **`, unary `-`) with
    other Expressions over the same coordinates or with plain numbers, exact
    differentiation via :meth:`diff`, and evaluation by calling it with a
    point (one value per coordinate, in order).
    """

    __slots__ = ("root", "coords")

    def __init__(self, root: Node, coords: Sequence[str]):
        self.root = root
        self.coords = tuple(coords)

    # construction helpers -------------------------------------------------
    @classmethod
    def number(cls, value: float, coords: Sequence[str]) -> "Expression":
        return cls(Num(float(value)), coords)

    @classmethod
    def coordinate(cls, name: str, coords: Sequence[str]) -> "Expression":
        if name not in coords:
            raise UnknownIdentifier(name)
        return cls(Var(name), coords)

    # calculus --------------------------------------------------------------
    def diff(self, name: str) -> "Expression":
        if name not in self.coords:
            raise UnknownIdentifier(name)
        return Expression(diff_node(self.root, name), self.coords)

    def __call__(self, point: Sequence[float]) -> float:
        if len(point) != len(self.coords):
            raise DomainError(
                f"point has {len(point)} components, expected {len(self.coords)}")
        env = dict(zip(self.coords, (float(v) for v in point)))
        return eval_node(self.root, env)

    # arithmetic ------------------------------------------------------------
    def _coerce(self, other) -> Node:
        if isinstance(other, Expression):
            if other.coords != self.coords:
                raise DomainError("cannot combine expressions over different coordinates")
            return other.root
        if isinstance(other, (int, float)):
            return Num(float(other))
        return NotImplemented

    def _binary(self, other, build, swap=False):
        rhs = self._coerce(other)
        if rhs is NotImplemented:
            return NotImplemented
        a, b = (rhs, self.root) if swap else (self.root, rhs)
        return Expression(build(a, b), self.coords)

    def __add__(self, other):
        return self._binary(other, add)

    def __radd__(self, other):
        return self._binary(other, add, swap=True)

    def __sub__(self, other):
        return self._binary(other, sub)

    def __rsub__(self, other):
        return self._binary(other, sub, swap=True)

    def __mul__(self, other):
        return self._binary(other, mul)

    def __rmul__(self, other):
        return self._binary(other, mul, swap=True)

    def __truediv__(self, other):
        return self._binary(other, div)

    def __rtruediv__(self, other):
        return self._binary(other, div, swap=True)

    def __pow__(self, other):
        return self._binary(other, power)

    def __neg__(self):
        return Expression(neg(self.root), self.coords)

    # identity ----------------------------------------------------------------
    def __eq__(self, other):
        return (isinstance(other, Expression)
                and self.coords == other.coords and self.root == other.root)

    def __hash__(self):
        return hash((self.root, self.coords))

    def __str__(self):
        return to_string(self.root)

    def __repr__(self):
        return f"Expression({to_string(self.root)!r}, coords={self.coords!r})"


def parse(text: str, coords: Sequence[str]) -> Expression:
    """Parse infix `text` into an Expression over the given coordinate names."""
    coords = _check_coords(coords)
    return Expression(_Parser(text, coords).parse(), coords)


def differentiate(expression: Expression, name: str) -> Expression:
    """Exact symbolic partial derivative along the declared coordinate `name`."""
    return expression.diff(name)


def evaluate(expression: Expression, point: Sequence[float]) -> float:
    """Evaluate at a point (one value per coordinate, in declaration order)."""
    return expression(point)
