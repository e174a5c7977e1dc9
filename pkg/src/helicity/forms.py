"""Scalar fields, vector fields and differential forms in chart coordinates.

A k-form stores one coefficient per increasing multi-index, so
``coeffs[(0, 2)]`` is the coefficient of ``dx0 ^ dx2``.  The algebra
(wedge, interior product) only needs ``+``, ``-`` and ``*`` on the
coefficients, which is why the same code runs on symbolic expressions and
on numpy arrays of values at grid nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import expr as ex
from .errors import DegreeOverflow, ManifoldMismatch, UnknownIdentifier
from .manifolds import ManifoldId, chart


def _check_vars(e, manifold, extra=()):
    allowed = set(chart(manifold).variables) | set(extra)
    unknown = ex.free_vars(e) - allowed
    if unknown:
        raise UnknownIdentifier(f"{sorted(unknown)} not chart variables of {manifold.value}")


@dataclass(frozen=True)
class ScalarField:
    manifold: ManifoldId
    expr: ex.Expr

    @classmethod
    def of(cls, manifold, text, allow_time=False):
        m = ManifoldId.parse(manifold)
        e = ex.parse(text) if isinstance(text, str) else ex.as_expr(text)
        _check_vars(e, m, ("t",) if allow_time else ())
        return cls(m, e)

    def values(self, grid, **extra):
        _same(self.manifold, grid.manifold)
        return np.array(ex.evaluate_on(self.expr, {**grid.env, **extra}, grid.weights.shape))

    def __str__(self):
        return str(self.expr)


@dataclass(frozen=True, eq=False)
class VectorField:
    """Components along the coordinate frame.

    Components are expressions, or arrays tabulated at the nodes of the
    grid given in ``grid`` (used for fields obtained by a pointwise solve).
    """

    manifold: ManifoldId
    components: tuple
    grid: object = None

    def __post_init__(self):
        if len(self.components) != chart(self.manifold).dim:
            raise ValueError("component count must equal chart dimension")

    def values(self, grid):
        _same(self.manifold, grid.manifold)
        out = []
        for c in self.components:
            if isinstance(c, ex.Expr):
                out.append(np.array(ex.evaluate_on(c, grid.env, grid.weights.shape)))
            else:
                if self.grid is not None and self.grid is not grid:
                    raise ManifoldMismatch("tabulated vector field used on a different grid")
                out.append(np.asarray(c))
        return tuple(out)


@dataclass(frozen=True, eq=False)
class KForm:
    manifold: ManifoldId
    degree: int
    coeffs: dict  # increasing index tuple -> Expr

    @classmethod
    def build(cls, manifold, degree, coeffs):
        """Form with the given coefficients; missing multi-indices are zero.

        ``coeffs`` maps index tuples, or strings of chart variable names
        separated by ``^`` (e.g. ``"eta^xi1"``), to expressions, text or numbers.
        """
        m = ManifoldId.parse(manifold)
        c = chart(m)
        names = c.variables
        full = {I: ex.ZERO for I in combinations(range(c.dim), degree)}
        for key, value in coeffs.items():
            if isinstance(key, str):
                key = tuple(names.index(k.strip()) for k in key.split("^")) if key else ()
            perm = sorted(range(len(key)), key=lambda i: key[i])
            idx = tuple(key[i] for i in perm)
            if idx not in full:
                raise ValueError(f"bad multi-index {key}")
            v = ex.parse(value) if isinstance(value, str) else ex.as_expr(value)
            full[idx] = full[idx] + (v if _perm_sign(perm) > 0 else -v)
        return cls(m, degree, full)

    def values(self, grid):
        """Coefficient arrays at grid nodes."""
        _same(self.manifold, grid.manifold)
        return {I: np.array(ex.evaluate_on(e, grid.env, grid.weights.shape)) for I, e in self.coeffs.items()}

    def __add__(self, other):
        _same(self.manifold, other.manifold)
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        return KForm(self.manifold, self.degree, {I: self.coeffs[I] + other.coeffs[I] for I in self.coeffs})

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def scale(self, factor):
        f = ex.as_expr(factor)
        return KForm(self.manifold, self.degree, {I: f * e for I, e in self.coeffs.items()})

    def __str__(self):
        names = chart(self.manifold).variables
        terms = [
            f"({e})" + ("" if not I else " d" + "^d".join(names[i] for i in I))
            for I, e in self.coeffs.items()
            if not (isinstance(e, ex.Num) and e.value == 0.0)
        ]
        return " + ".join(terms) or "0"


def _same(a, b):
    if ManifoldId.parse(a) is not ManifoldId.parse(b):
        raise ManifoldMismatch(f"{ManifoldId.parse(a).value} vs {ManifoldId.parse(b).value}")


def _perm_sign(perm):
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def _merge_sign(I, J):
    """Sign of the shuffle sorting I + J, or 0 if they overlap."""
    if set(I) & set(J):
        return 0
    inversions = sum(1 for i in I for j in J if i > j)
    return -1 if inversions % 2 else 1


def zero_form(manifold, f):
    return KForm.build(manifold, 0, {(): f})


# ---------------------------------------------------------------------------
# generic coefficient algebra (works on Expr and on ndarray)


def wedge_coeffs(a, p, b, q, dim, zero):
    out = {}
    for K in combinations(range(dim), p + q):
        acc = zero
        for I in combinations(K, p):
            J = tuple(k for k in K if k not in I)
            s = _merge_sign(I, J)
            term = a[I] * b[J]
            acc = acc + term if s > 0 else acc - term
        out[K] = acc
    return out


def contract_coeffs(X, w, k, dim, zero):
    out = {}
    for J in combinations(range(dim), k - 1):
        acc = zero
        for i in range(dim):
            if i in J:
                continue
            K = tuple(sorted((i,) + J))
            pos = K.index(i)
            term = X[i] * w[K]
            acc = acc + term if pos % 2 == 0 else acc - term
        out[J] = acc
    return out


# ---------------------------------------------------------------------------
# symbolic operations


def exterior_derivative(w):
    c = chart(w.manifold)
    if w.degree >= c.dim:
        raise DegreeOverflow(f"d of a {w.degree}-form on a {c.dim}-manifold")
    names = c.variables
    out = {K: ex.ZERO for K in combinations(range(c.dim), w.degree + 1)}
    for J, f in w.coeffs.items():
        if isinstance(f, ex.Num):
            continue
        for i in range(c.dim):
            if i in J:
                continue
            df = ex.differentiate(f, names[i])
            if isinstance(df, ex.Num) and df.value == 0.0:
                continue
            K = tuple(sorted((i,) + J))
            # dx_i ^ dx_J = (-1)^{#j < i} dx_K
            if sum(1 for j in J if j < i) % 2:
                out[K] = out[K] - df
            else:
                out[K] = out[K] + df
    return KForm(w.manifold, w.degree + 1, out)


def wedge(a, b):
    _same(a.manifold, b.manifold)
    dim = chart(a.manifold).dim
    if a.degree + b.degree > dim:
        return KForm(a.manifold, a.degree + b.degree, {})
    return KForm(a.manifold, a.degree + b.degree, wedge_coeffs(a.coeffs, a.degree, b.coeffs, b.degree, dim, ex.ZERO))


def contract(X, w):
    """Interior product of a vector field with expression components into ``w``."""
    _same(X.manifold, w.manifold)
    if w.degree == 0:
        return KForm(w.manifold, -1, {})
    if not all(isinstance(c, ex.Expr) for c in X.components):
        raise TypeError("symbolic contraction needs expression components; use contract_values")
    dim = chart(w.manifold).dim
    return KForm(w.manifold, w.degree - 1, contract_coeffs(X.components, w.coeffs, w.degree, dim, ex.ZERO))


# ---------------------------------------------------------------------------
# numeric counterparts on values at nodes


def wedge_values(a, p, b, q, dim):
    return wedge_coeffs(a, p, b, q, dim, 0.0)


def contract_values(X, w, k, dim):
    return contract_coeffs(X, w, k, dim, 0.0)


def form_from_json(data):
    """KForm from ``{"manifold": ..., "degree": k, "coefficients": {"eta^xi1": "..."}}``."""
    return KForm.build(data["manifold"], int(data["degree"]), data.get("coefficients", {}))


def field_from_json(data, allow_time=False):
    """ScalarField or VectorField from the JSON field-spec format."""
    m = ManifoldId.parse(data["manifold"])
    if "expr" in data:
        return ScalarField.of(m, data["expr"], allow_time=allow_time)
    comps = tuple(ex.parse(c) if isinstance(c, str) else ex.as_expr(c) for c in data["components"])
    for c in comps:
        _check_vars(c, m)
    return VectorField(m, comps)
