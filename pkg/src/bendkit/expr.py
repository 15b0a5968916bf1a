"""Scalar expressions in the two chart parameters ``u`` and ``v``.

Trees are immutable. :func:`parse` builds the tree exactly as written;
:func:`derive` returns a new tree built through light constant folding so
that repeated differentiation does not blow up with ``0*x`` terms.

Grammar::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := primary ('^' unary)?
    primary := NUMBER | 'u' | 'v' | 'pi' | FUNC '(' expr ')' | '(' expr ')'

``^`` is right associative and binds tighter than unary minus, so
``-u^2`` is ``-(u^2)`` and ``u^-1`` is ``u^(-1)``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

from .errors import DomainError, EmptyExpressionError, ExprSyntaxError, UnknownIdentifierError

VARIABLES = ("u", "v")
FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh")
NAMED_CONSTANTS = {"pi": math.pi}


class Expr:
    """Base node. Supports Python arithmetic for building trees in code."""

    __slots__ = ()

    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __pow__(self, other):
        return power(self, as_expr(other))

    def __neg__(self):
        return neg(self)

    def __call__(self, u, v):
        return evaluate(self, u, v)

    def diff(self, var: str) -> "Expr":
        return derive(self, var)

    def __str__(self):
        return to_string(self)


@dataclass(frozen=True, eq=False, repr=False)
class Const(Expr):
    value: float

    def __repr__(self):
        return f"Const({self.value!r})"


@dataclass(frozen=True, eq=False, repr=False)
class NamedConst(Expr):
    name: str

    @property
    def value(self) -> float:
        return NAMED_CONSTANTS[self.name]

    def __repr__(self):
        return f"NamedConst({self.name!r})"


@dataclass(frozen=True, eq=False, repr=False)
class Var(Expr):
    name: str

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True, eq=False, repr=False)
class Neg(Expr):
    arg: Expr

    def __repr__(self):
        return f"Neg({self.arg!r})"


@dataclass(frozen=True, eq=False, repr=False)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    def __repr__(self):
        return f"BinOp({self.op!r}, {self.left!r}, {self.right!r})"


@dataclass(frozen=True, eq=False, repr=False)
class Call(Expr):
    func: str
    arg: Expr

    def __repr__(self):
        return f"Call({self.func!r}, {self.arg!r})"


U = Var("u")
V = Var("v")
ZERO = Const(0.0)
ONE = Const(1.0)
PI = NamedConst("pi")

ExprLike = Union[Expr, float, int, str]


def as_expr(x: ExprLike) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, str):
        return parse(x)
    return Const(float(x))


# ---------------------------------------------------------------------------
# folding constructors

def _const_value(e: Expr):
    if isinstance(e, (Const, NamedConst)):
        return e.value
    return None


def _fold(value: float, fallback: Expr) -> Expr:
    return Const(value) if math.isfinite(value) else fallback


def neg(a: Expr) -> Expr:
    ca = _const_value(a)
    if ca is not None and isinstance(a, Const):
        return Const(-ca)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def add(a: Expr, b: Expr) -> Expr:
    ca, cb = _const_value(a), _const_value(b)
    if ca == 0.0:
        return b
    if cb == 0.0:
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return _fold(ca + cb, BinOp("+", a, b))
    return BinOp("+", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    ca, cb = _const_value(a), _const_value(b)
    if cb == 0.0:
        return a
    if ca == 0.0:
        return neg(b)
    if isinstance(a, Const) and isinstance(b, Const):
        return _fold(ca - cb, BinOp("-", a, b))
    return BinOp("-", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    ca, cb = _const_value(a), _const_value(b)
    if ca == 0.0 or cb == 0.0:
        return ZERO
    if ca == 1.0:
        return b
    if cb == 1.0:
        return a
    if ca == -1.0:
        return neg(b)
    if cb == -1.0:
        return neg(a)
    if isinstance(a, Const) and isinstance(b, Const):
        return _fold(ca * cb, BinOp("*", a, b))
    return BinOp("*", a, b)


def div(a: Expr, b: Expr) -> Expr:
    ca, cb = _const_value(a), _const_value(b)
    if cb == 1.0:
        return a
    if ca == 0.0 and cb != 0.0:
        return ZERO
    if isinstance(a, Const) and isinstance(b, Const) and cb != 0.0:
        return _fold(ca / cb, BinOp("/", a, b))
    return BinOp("/", a, b)


def power(a: Expr, b: Expr) -> Expr:
    cb = _const_value(b)
    if cb == 1.0:
        return a
    if cb == 0.0:
        return ONE
    return BinOp("^", a, b)


def call(func: str, a: Expr) -> Expr:
    if func not in FUNCTIONS:
        raise ValueError(f"unknown function {func!r}")
    return Call(func, a)


def sin(a): return call("sin", as_expr(a))  # noqa: E704
def cos(a): return call("cos", as_expr(a))  # noqa: E704
def tan(a): return call("tan", as_expr(a))  # noqa: E704
def exp(a): return call("exp", as_expr(a))  # noqa: E704
def log(a): return call("log", as_expr(a))  # noqa: E704
def sqrt(a): return call("sqrt", as_expr(a))  # noqa: E704
def sinh(a): return call("sinh", as_expr(a))  # noqa: E704
def cosh(a): return call("cosh", as_expr(a))  # noqa: E704


# ---------------------------------------------------------------------------
# parser

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []  # (kind, value, char offset)
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                raise ExprSyntaxError(f"unexpected character {text[pos]!r}",
                                      self._byte_offset(pos), text)
            kind = m.lastgroup
            if kind != "ws":
                self.tokens.append((kind, m.group(), pos))
            pos = m.end()
        self.tokens.append(("end", "", len(text)))
        self.i = 0

    def _byte_offset(self, char_pos):
        return len(self.text[:char_pos].encode("utf-8"))

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ExprSyntaxError(message, self._byte_offset(tok[2]), self.text)

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.peek()
        if tok[1] != value or tok[0] != "op":
            found = "end of input" if tok[0] == "end" else repr(tok[1])
            raise self.error(f"expected {value!r}, found {found}")
        return self.next()

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return e

    def expr(self):
        e = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.next()[1]
            e = BinOp(op, e, self.term())
        return e

    def term(self):
        e = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.next()[1]
            e = BinOp(op, e, self.unary())
        return e

    def unary(self):
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.next()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.primary()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.next()
            return BinOp("^", base, self.unary())
        return base

    def primary(self):
        tok = self.next()
        kind, value, _ = tok
        if kind == "num":
            return Const(float(value))
        if kind == "name":
            if value in VARIABLES:
                return Var(value)
            if value in NAMED_CONSTANTS:
                return NamedConst(value)
            if value in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(value, arg)
            raise UnknownIdentifierError(value, self._byte_offset(tok[2]), self.text)
        if kind == "op" and value == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "end":
            raise self.error("unexpected end of input", tok)
        raise self.error(f"unexpected token {value!r}", tok)


def parse(text: str) -> Expr:
    """Parse ``text`` into an :class:`Expr`.

    Raises :class:`EmptyExpressionError` for blank input,
    :class:`UnknownIdentifierError` for names outside the grammar and
    :class:`ExprSyntaxError` otherwise; all carry a byte ``offset``.
    """
    if not text or not text.strip():
        raise EmptyExpressionError(text)
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# printing

def to_string(e: Expr) -> str:
    """Fully parenthesised serialisation; ``parse(to_string(e))`` evaluates like ``e``."""
    if isinstance(e, Const):
        r = repr(e.value)
        return f"({r})" if e.value < 0 or r.startswith("-") else r
    if isinstance(e, (Var, NamedConst)):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_string(e.arg)})"
    if isinstance(e, BinOp):
        return f"({to_string(e.left)} {e.op} {to_string(e.right)})"
    if isinstance(e, Call):
        return f"{e.func}({to_string(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# structure helpers

def variables(e: Expr) -> frozenset:
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, (Const, NamedConst)):
        return frozenset()
    if isinstance(e, (Neg, Call)):
        return variables(e.arg)
    return variables(e.left) | variables(e.right)


def is_constant(e: Expr) -> bool:
    return not variables(e)


# ---------------------------------------------------------------------------
# differentiation

def derive(e: Expr, var: str) -> Expr:
    """Exact symbolic partial derivative of ``e`` with respect to ``var``."""
    if var not in VARIABLES:
        raise ValueError(f"can only differentiate with respect to u or v, got {var!r}")
    return _derive(e, var, {})


def _derive(e, var, memo):
    key = id(e)
    hit = memo.get(key)
    if hit is not None:
        return hit[1]
    d = _derive_node(e, var, memo)
    memo[key] = (e, d)  # keep e alive so its id stays unique
    return d


def _derive_node(e, var, memo):
    if isinstance(e, (Const, NamedConst)):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == var else ZERO
    if isinstance(e, Neg):
        return neg(_derive(e.arg, var, memo))
    if isinstance(e, Call):
        a = e.arg
        da = _derive(a, var, memo)
        if _const_value(da) == 0.0:
            return ZERO
        f = e.func
        if f == "sin":
            outer = Call("cos", a)
        elif f == "cos":
            outer = neg(Call("sin", a))
        elif f == "tan":
            outer = div(ONE, power(Call("cos", a), Const(2.0)))
        elif f == "exp":
            outer = e
        elif f == "log":
            return div(da, a)
        elif f == "sqrt":
            return div(da, mul(Const(2.0), e))
        elif f == "sinh":
            outer = Call("cosh", a)
        elif f == "cosh":
            outer = Call("sinh", a)
        else:  # pragma: no cover - grammar is closed
            raise ValueError(f)
        return mul(outer, da)

    a, b = e.left, e.right
    da = _derive(a, var, memo)
    db = _derive(b, var, memo)
    op = e.op
    if op == "+":
        return add(da, db)
    if op == "-":
        return sub(da, db)
    if op == "*":
        return add(mul(da, b), mul(a, db))
    if op == "/":
        return sub(div(da, b), div(mul(a, db), power(b, Const(2.0))))
    if op == "^":
        if var not in variables(b):
            # n * a^(n-1) * a'
            cb = _const_value(b)
            n_minus_1 = Const(cb - 1.0) if cb is not None else sub(b, ONE)
            return mul(mul(b, power(a, n_minus_1)), da)
        # a^b * (b' log a + b a'/a)
        return mul(e, add(mul(db, Call("log", a)), div(mul(b, da), a)))
    raise ValueError(f"unknown operator {op!r}")  # pragma: no cover


# ---------------------------------------------------------------------------
# evaluation

_MATH = {
    "sin": math.sin, "cos": math.cos, "tan": math.tan, "exp": math.exp,
    "log": math.log, "sqrt": math.sqrt, "sinh": math.sinh, "cosh": math.cosh,
}


def _checked(x: float, what: str) -> float:
    if not math.isfinite(x):
        raise DomainError(f"{what} produced a non-finite value")
    return x


def eval_scalar(e: Expr, u: float, v: float) -> float:
    """Evaluate at a single point using :mod:`math`. Non-finite results raise DomainError."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, NamedConst):
        return e.value
    if isinstance(e, Var):
        return u if e.name == "u" else v
    if isinstance(e, Neg):
        return -eval_scalar(e.arg, u, v)
    if isinstance(e, Call):
        x = eval_scalar(e.arg, u, v)
        try:
            return _checked(_MATH[e.func](x), e.func)
        except (ValueError, OverflowError) as exc:
            raise DomainError(f"{e.func}({x!r}) is outside the domain") from exc
    a = eval_scalar(e.left, u, v)
    b = eval_scalar(e.right, u, v)
    op = e.op
    try:
        if op == "+":
            r = a + b
        elif op == "-":
            r = a - b
        elif op == "*":
            r = a * b
        elif op == "/":
            r = a / b
        else:
            r = math.pow(a, b)
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise DomainError(f"{a!r} {op} {b!r} is outside the domain") from exc
    return _checked(r, op)


def evaluate(e: Expr, u, v):
    """Evaluate ``e`` at scalar or array-valued ``(u, v)``.

    Scalars go through :func:`eval_scalar`; arrays are broadcast together and
    run through the compiled program backend.
    """
    if isinstance(u, (int, float)) and isinstance(v, (int, float)):
        return eval_scalar(e, float(u), float(v))
    from .program import Program
    return Program([e])(u, v)[0]
