"""Closed-form scalar expressions over chart coordinates.

Expressions are small immutable trees.  They can be parsed from text,
printed back, differentiated symbolically and evaluated on numpy arrays.

Grammar (whitespace ignored)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"

``^`` binds tighter than unary minus, so ``-x^2`` is ``-(x^2)`` and
``r^-2`` is ``r^(-2)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial

from .errors import ExprSyntaxError, UnknownIdentifier

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "bump")

# every chart variable of every model manifold, plus time
CHART_VARIABLES = frozenset(
    {"eta", "xi1", "xi2", "phi", "psi", "x", "y", "z", "r", "theta", "t"}
)

_BUMP_DERIV = re.compile(r"bump_d(\d+)$")


class Expr:
    """Base class of all expression nodes."""

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

    def __str__(self):
        return to_string(self)

    def __call__(self, **env):
        return evaluate(self, env)


@dataclass(frozen=True, slots=True)
class Num(Expr):
    value: float


@dataclass(frozen=True, slots=True)
class Pi(Expr):
    pass


@dataclass(frozen=True, slots=True)
class Var(Expr):
    name: str


@dataclass(frozen=True, slots=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True, slots=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Call(Expr):
    fn: str
    arg: Expr


@dataclass(frozen=True, slots=True)
class BumpDeriv(Expr):
    """``order``-th derivative of the standard bump, applied to ``arg``."""

    order: int
    arg: Expr


@dataclass(frozen=True, slots=True)
class Integral(Expr):
    """Integral of ``integrand(var)`` from the constant ``lower`` to ``upper``.

    The integrand may only depend on ``var``; the derivative with respect
    to any chart variable is then exact (fundamental theorem of calculus),
    while evaluation uses composite Gauss-Legendre quadrature.
    """

    integrand: Expr
    var: str
    lower: float
    upper: Expr


def as_expr(value):
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, float, np.floating, np.integer)):
        return Num(float(value))
    raise TypeError(f"cannot convert {type(value).__name__} to Expr")


ZERO = Num(0.0)
ONE = Num(1.0)


def _is_num(e, value=None):
    return isinstance(e, Num) and (value is None or e.value == value)


# smart constructors: fold constants and drop neutral elements


def add(a, b):
    if _is_num(a) and _is_num(b):
        return Num(a.value + b.value)
    if _is_num(a, 0.0):
        return b
    if _is_num(b, 0.0):
        return a
    if isinstance(b, Neg):
        return BinOp("-", a, b.arg)
    return BinOp("+", a, b)


def sub(a, b):
    if _is_num(a) and _is_num(b):
        return Num(a.value - b.value)
    if _is_num(b, 0.0):
        return a
    if _is_num(a, 0.0):
        return neg(b)
    return BinOp("-", a, b)


def mul(a, b):
    if _is_num(a) and _is_num(b):
        return Num(a.value * b.value)
    if _is_num(a, 0.0) or _is_num(b, 0.0):
        return ZERO
    if _is_num(a, 1.0):
        return b
    if _is_num(b, 1.0):
        return a
    if _is_num(a, -1.0):
        return neg(b)
    if _is_num(b, -1.0):
        return neg(a)
    return BinOp("*", a, b)


def div(a, b):
    if _is_num(a) and _is_num(b) and b.value != 0.0:
        return Num(a.value / b.value)
    if _is_num(a, 0.0):
        return ZERO
    if _is_num(b, 1.0):
        return a
    return BinOp("/", a, b)


def power(a, b):
    if _is_num(b, 0.0):
        return ONE
    if _is_num(b, 1.0):
        return a
    if _is_num(a) and _is_num(b) and (a.value > 0 or float(b.value).is_integer()):
        return Num(a.value ** b.value)
    return BinOp("^", a, b)


def neg(a):
    if _is_num(a):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def call(fn, a):
    if fn not in FUNCTIONS:
        raise UnknownIdentifier(fn)
    return Call(fn, a)


def var(name):
    return Var(name)


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()−]))"
)


def _tokenize(text):
    tokens = []
    pos = 0
    data = text.encode("utf-8")
    # offsets are byte offsets into the UTF-8 encoding
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", _byte(text, pos))
        kind = m.lastgroup
        value = m.group(kind)
        start = m.start(kind)
        if value == "−":
            value = "-"
        tokens.append((kind, value, _byte(text, start)))
        pos = m.end()
    tokens.append(("end", "", len(data)))
    return tokens


def _byte(text, index):
    return len(text[:index].encode("utf-8"))


class _Parser:
    def __init__(self, text, variables):
        self.tokens = _tokenize(text)
        self.i = 0
        self.variables = variables

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, off = self.peek()
        if val != value or kind == "end":
            got = "end of input" if kind == "end" else repr(val)
            raise ExprSyntaxError(f"expected {value!r}, got {got}", off)
        self.take()

    def parse(self):
        e = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {val!r}", off)
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            e = BinOp(op, e, self.term())
        return e

    def term(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            e = BinOp(op, e, self.unary())
        return e

    def unary(self):
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, val, off = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "ident":
            if val in FUNCTIONS or _BUMP_DERIV.match(val):
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                m = _BUMP_DERIV.match(val)
                if m:
                    return BumpDeriv(int(m.group(1)), arg)
                return Call(val, arg)
            if val == "pi":
                return Pi()
            if val not in self.variables:
                raise UnknownIdentifier(f"{val!r} at offset {off}")
            return Var(val)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect(")")
            return e
        got = "end of input" if kind == "end" else repr(val)
        raise ExprSyntaxError(f"unexpected {got}", off)


def parse(text, variables=None):
    """Parse ``text`` into an expression.

    ``variables`` restricts the allowed identifiers; by default every chart
    variable of every model manifold is accepted.
    """
    allowed = CHART_VARIABLES if variables is None else frozenset(variables)
    return _Parser(text, allowed).parse()


# ---------------------------------------------------------------------------
# printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


def _fmt_num(v):
    if float(v).is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def _prec(e):
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Num) and e.value < 0:
        return 3
    return 5


def _wrap(e, minimum):
    s = to_string(e)
    return f"({s})" if _prec(e) < minimum else s


def to_string(e):
    """Render an expression in the parser's grammar with minimal parentheses."""
    if isinstance(e, Num):
        return ("-" + _fmt_num(-e.value)) if e.value < 0 else _fmt_num(e.value)
    if isinstance(e, Pi):
        return "pi"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, 3)
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        if e.op == "^":
            return f"{_wrap(e.left, 5)}^{_wrap(e.right, 3)}"
        return f"{_wrap(e.left, p)}{e.op}{_wrap(e.right, p + 1)}"
    if isinstance(e, Call):
        return f"{e.fn}({to_string(e.arg)})"
    if isinstance(e, BumpDeriv):
        return f"bump_d{e.order}({to_string(e.arg)})"
    if isinstance(e, Integral):
        return f"integral[{e.var}={_fmt_num(e.lower)}..{to_string(e.upper)}]({to_string(e.integrand)})"
    raise TypeError(e)


# ---------------------------------------------------------------------------
# structure


def free_vars(e):
    if isinstance(e, Var):
        return frozenset({e.name})
    if isinstance(e, (Num, Pi)):
        return frozenset()
    if isinstance(e, Neg):
        return free_vars(e.arg)
    if isinstance(e, BinOp):
        return free_vars(e.left) | free_vars(e.right)
    if isinstance(e, (Call, BumpDeriv)):
        return free_vars(e.arg)
    if isinstance(e, Integral):
        return free_vars(e.upper)
    raise TypeError(e)


def substitute(e, mapping):
    """Replace variables by expressions (``mapping``: name -> Expr or number)."""
    mapping = {k: as_expr(v) for k, v in mapping.items()}
    return _subst(e, mapping)


def _subst(e, m):
    if isinstance(e, Var):
        return m.get(e.name, e)
    if isinstance(e, (Num, Pi)):
        return e
    if isinstance(e, Neg):
        return neg(_subst(e.arg, m))
    if isinstance(e, BinOp):
        a, b = _subst(e.left, m), _subst(e.right, m)
        return {"+": add, "-": sub, "*": mul, "/": div, "^": power}[e.op](a, b)
    if isinstance(e, Call):
        return Call(e.fn, _subst(e.arg, m))
    if isinstance(e, BumpDeriv):
        return BumpDeriv(e.order, _subst(e.arg, m))
    if isinstance(e, Integral):
        return Integral(e.integrand, e.var, e.lower, _subst(e.upper, m))
    raise TypeError(e)


# ---------------------------------------------------------------------------
# differentiation


def differentiate(e, v):
    """Symbolic partial derivative of ``e`` with respect to variable ``v``."""
    if isinstance(e, (Num, Pi)):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == v else ZERO
    if isinstance(e, Neg):
        return neg(differentiate(e.arg, v))
    if isinstance(e, BinOp):
        a, b = e.left, e.right
        da, db = differentiate(a, v), differentiate(b, v)
        if e.op == "+":
            return add(da, db)
        if e.op == "-":
            return sub(da, db)
        if e.op == "*":
            return add(mul(da, b), mul(a, db))
        if e.op == "/":
            return div(sub(mul(da, b), mul(a, db)), power(b, Num(2.0)))
        if v not in free_vars(b):
            if _is_num(da, 0.0):
                return ZERO
            return mul(mul(b, power(a, sub(b, ONE))), da)
        # general power a^b = exp(b log a)
        return mul(e, add(mul(db, call("log", a)), div(mul(b, da), a)))
    if isinstance(e, Call):
        a = e.arg
        da = differentiate(a, v)
        if _is_num(da, 0.0):
            return ZERO
        if e.fn == "sin":
            outer = Call("cos", a)
        elif e.fn == "cos":
            outer = neg(Call("sin", a))
        elif e.fn == "tan":
            outer = div(ONE, power(Call("cos", a), Num(2.0)))
        elif e.fn == "exp":
            outer = e
        elif e.fn == "log":
            outer = div(ONE, a)
        elif e.fn == "sqrt":
            outer = div(ONE, mul(Num(2.0), e))
        elif e.fn == "bump":
            outer = BumpDeriv(1, a)
        else:  # pragma: no cover - guarded by call()
            raise UnknownIdentifier(e.fn)
        return mul(outer, da)
    if isinstance(e, BumpDeriv):
        da = differentiate(e.arg, v)
        if _is_num(da, 0.0):
            return ZERO
        return mul(BumpDeriv(e.order + 1, e.arg), da)
    if isinstance(e, Integral):
        du = differentiate(e.upper, v)
        if _is_num(du, 0.0):
            return ZERO
        return mul(substitute(e.integrand, {e.var: e.upper}), du)
    raise TypeError(e)


def gradient(e, variables):
    return tuple(differentiate(e, v) for v in variables)


# ---------------------------------------------------------------------------
# evaluation

_UNARY = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
}


@lru_cache(maxsize=None)
def _bump_poly(order):
    # d^k/ds^k bump(s) = bump(s) * P_k(s) / (1 - s^2)^(2k)
    s = Polynomial([0.0, 1.0])
    q = 1 - s**2
    p = Polynomial([1.0])
    for k in range(order):
        p = -2 * s * p + q**2 * p.deriv() + 4 * k * s * q * p
    return p


def bump_values(s, order=0):
    """Standard bump exp(1 - 1/(1 - s^2)) on |s| < 1 (zero outside) or a derivative."""
    s = np.asarray(s, dtype=float)
    inside = np.abs(s) < 1.0
    safe = np.where(inside, s, 0.0)
    q = 1.0 - safe**2
    base = np.exp(1.0 - 1.0 / q)
    if order:
        base = base * _bump_poly(order)(safe) / q ** (2 * order)
    return np.where(inside, base, 0.0)


_GL_CACHE = {}


def _gauss(order):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


INTEGRAL_PANELS = 16
INTEGRAL_ORDER = 24


def _integral_values(e, upper):
    upper = np.asarray(upper, dtype=float)
    flat = upper.ravel()
    uniq, inverse = np.unique(flat, return_inverse=True)
    x, w = _gauss(INTEGRAL_ORDER)
    edges = np.linspace(0.0, 1.0, INTEGRAL_PANELS + 1)
    lo = e.lower
    span = uniq - lo
    total = np.zeros_like(uniq)
    for a, b in zip(edges[:-1], edges[1:]):
        # panel [lo + a*span, lo + b*span]
        mid = lo + 0.5 * (a + b) * span
        half = 0.5 * (b - a) * span
        nodes = mid[:, None] + half[:, None] * x[None, :]
        vals = np.broadcast_to(evaluate(e.integrand, {e.var: nodes}), nodes.shape)
        total += half * (vals @ w)
    return total[inverse].reshape(upper.shape)


def evaluate(e, env):
    """Evaluate ``e`` with variables bound to scalars or numpy arrays."""
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return _ev(e, env)


def _ev(e, env):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Pi):
        return math.pi
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise UnknownIdentifier(f"no value bound for {e.name!r}") from None
    if isinstance(e, Neg):
        return -_ev(e.arg, env)
    if isinstance(e, BinOp):
        a, b = _ev(e.left, env), _ev(e.right, env)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            return np.divide(a, b)
        if isinstance(b, float) and b.is_integer():
            return np.power(a, int(b)) if b >= 0 else 1.0 / np.power(a, int(-b))
        return np.power(a, b)
    if isinstance(e, Call):
        a = _ev(e.arg, env)
        if e.fn == "bump":
            return bump_values(a)
        return _UNARY[e.fn](a)
    if isinstance(e, BumpDeriv):
        return bump_values(_ev(e.arg, env), e.order)
    if isinstance(e, Integral):
        return _integral_values(e, _ev(e.upper, env))
    raise TypeError(e)


def evaluate_on(e, env, shape):
    """Evaluate and broadcast to ``shape`` (constants become full arrays)."""
    return np.broadcast_to(np.asarray(evaluate(e, env), dtype=float), shape)
