"""Helicity and relative helicity of strictly contact fields.

Two independent routes are provided: the closed-form expression in terms
of averages of the contact Hamiltonian, and direct quadrature of
``beta ^ d beta`` for an explicitly constructed primitive ``beta``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import expr as ex
from .calculus import (
    AGREEMENT_TOL,
    PRIMITIVE_TOL,
    PrimitiveReport,
    average,
    integrate,
    integrate_values,
    l2_norm_sq,
)
from .contact import contact_form, contact_residual, contact_vector_field, require_basic
from .errors import CrossCheckFailed, ManifoldMismatch, NotNullHomologous
from .forms import ScalarField, exterior_derivative, wedge
from .manifolds import ManifoldId, axis_rule, chart, make_grid, total_volume


class Method(str, enum.Enum):
    CONTACT_FORMULA = "ContactFormula"
    DIRECT_QUADRATURE = "DirectQuadrature"
    TIME_DEPENDENT_FORMULA = "TimeDependentFormula"


@dataclass
class HelicityResult:
    value: float
    method: Method
    grid: dict
    residual: float | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        out = {"value": self.value, "method": self.method.value, "residual": self.residual, "grid": self.grid}
        out.update(self.extra)
        return out


# manifolds whose contact form is regular; the averaged formulas hold only there
REGULAR = frozenset({ManifoldId.SPHERE3})


def _require_regular(grid):
    if grid.manifold not in REGULAR:
        raise ManifoldMismatch(
            f"the averaged helicity formula needs a regular contact form; {grid.manifold.value} has none"
            " (use helicity.torus on t3)"
        )


def _scalar(H, grid):
    if isinstance(H, ScalarField):
        return H
    return ScalarField.of(grid.manifold, H)


def helicity_contact(H, grid, check=True):
    """(4 c(H)^2 - 3 c(H^2)) * vol for a basic contact Hamiltonian H."""
    _require_regular(grid)
    H = _scalar(H, grid)
    if check:
        require_basic(H, grid)
    vals = H.values(grid)
    vol = total_volume(grid)
    c = integrate_values(vals, grid) / vol
    c2 = integrate_values(vals**2, grid) / vol
    return HelicityResult((4 * c * c - 3 * c2) * vol, Method.CONTACT_FORMULA, grid.summary())


def relative_helicity_contact(H, K, grid, check=True):
    _require_regular(grid)
    H, K = _scalar(H, grid), _scalar(K, grid)
    if check:
        require_basic(H, grid)
        require_basic(K, grid)
    h, k = H.values(grid), K.values(grid)
    vol = total_volume(grid)
    ch = integrate_values(h, grid) / vol
    ck = integrate_values(k, grid) / vol
    chk = integrate_values(h * k, grid) / vol
    return (4 * ch * ck - 3 * chk) * vol


def helicity_direct(X, beta, grid, tol=PRIMITIVE_TOL, agreement=AGREEMENT_TOL):
    """Helicity by quadrature of beta ^ d beta, cross-checked against int beta(X) mu."""
    if not isinstance(beta, PrimitiveReport):
        raise TypeError("beta must be a PrimitiveReport")
    beta.require(tol)
    form = beta.form
    if form.manifold is not grid.manifold:
        raise ManifoldMismatch("primitive and grid live on different manifolds")
    value = integrate(wedge(form, exterior_derivative(form)), grid)
    b = form.values(grid)
    comps = X.values(grid)
    pairing = sum(b[(i,)] * comps[i] for i in range(len(comps)))
    second = integrate_values(pairing, grid)
    if abs(value - second) > agreement * max(1.0, abs(value)):
        raise CrossCheckFailed(f"int beta^d beta = {value!r} but int beta(X) mu = {second!r}")
    return HelicityResult(value, Method.DIRECT_QUADRATURE, grid.summary(), beta.residual, {"pairing_value": second})


def helicity_direct_s3(H, grid, tol=PRIMITIVE_TOL):
    """Direct route on S^3 for a zonal H: frame-solved X_H and the explicit primitive."""
    from .calculus import beta_primitive_s3

    H = _scalar(H, grid)
    X = contact_vector_field(H, grid)
    beta = beta_primitive_s3(H, grid, X)
    return helicity_direct(X, beta, grid, tol)


def helicity_timedep(H_t, grid, time_nodes=16, rule="gauss"):
    """int_0^1 (4 c(H_t)^2 - 3 c(H_t^2)) vol dt over time slices.

    ``rule`` is ``"gauss"`` (Gauss-Legendre on [0, 1]) or ``"trapezoid"``.
    """
    if isinstance(H_t, ScalarField):
        e = H_t.expr
    else:
        e = ex.parse(H_t)
    if rule == "gauss":
        x, w = np.polynomial.legendre.leggauss(time_nodes)
        ts, ws = 0.5 * (x + 1), 0.5 * w
    elif rule == "trapezoid":
        ts = np.linspace(0.0, 1.0, time_nodes)
        ws = np.full(time_nodes, 1.0 / (time_nodes - 1))
        ws[[0, -1]] *= 0.5
    else:
        raise ValueError(f"unknown time rule {rule!r}")
    slices = []
    for t in ts:
        H = ScalarField(grid.manifold, ex.substitute(e, {"t": float(t)}))
        slices.append(helicity_contact(H, grid).value)
    value = float(np.dot(ws, slices))
    return HelicityResult(
        value, Method.TIME_DEPENDENT_FORMULA, grid.summary(), extra={"time_nodes": int(time_nodes), "rule": rule}
    )


@dataclass
class Bounds:
    lower: float
    value: float
    upper: float
    tight_lower: bool
    tight_upper: bool

    def to_dict(self):
        return dict(self.__dict__)


def bounds_check(H, grid, tol=1e-9):
    """-3 |H|^2 <= helicity <= |H|^2; equality below iff mean zero, above iff constant."""
    H = _scalar(H, grid)
    value = helicity_contact(H, grid).value
    l2 = l2_norm_sq(H, grid)
    scale = tol * max(1.0, l2)
    c = average(H, grid)
    vals = H.values(grid)
    constant = float(np.max(vals) - np.min(vals)) <= tol * max(1.0, float(np.max(np.abs(vals))))
    return Bounds(-3 * l2, value, l2, abs(c) <= scale, constant)


@dataclass
class LiftResult:
    value: float
    constant: bool


def horizontal_lift_helicity(F, grid, tol=1e-12):
    """(c(F)^2 - c(F^2)) vol(B) for the horizontal lift of X_F on the base."""
    F = _scalar(F, grid)
    vals = F.values(grid)
    vol = total_volume(grid)
    c = integrate_values(vals, grid) / vol
    c2 = integrate_values(vals**2, grid) / vol
    value = (c * c - c2) * vol
    if value > tol:
        raise CrossCheckFailed(f"lift helicity {value!r} > 0 violates Hoelder")
    constant = float(np.max(vals) - np.min(vals)) <= 1e-12 * max(1.0, float(np.max(np.abs(vals))))
    return LiftResult(value, constant)


def filling_disc_average(H, resolution=64, check_tol=1e-8, grid=None):
    """Integral of H d alpha over the disc {xi1 = 0} bounded by the Reeb circle {eta = 0}.

    The orientation is fixed so that H = 1 gives +1.  With ``grid`` the
    result is compared against the volume average of H.
    """
    H = _scalar(H, grid) if grid is not None else ScalarField.of(ManifoldId.SPHERE3, H) if isinstance(H, str) else H
    c = chart(ManifoldId.SPHERE3)
    n = resolution if np.isscalar(resolution) else resolution[0]
    eta, w_eta = axis_rule(c.axes[0], n)
    xi2, w_xi2 = axis_rule(c.axes[2], n)
    E, X2 = np.meshgrid(eta, xi2, indexing="ij")
    W = np.outer(w_eta, w_xi2)
    dalpha = exterior_derivative(contact_form(ManifoldId.SPHERE3))
    env = {"eta": E, "xi1": np.zeros_like(E), "xi2": X2}
    # pulled back to {xi1 = 0}, only the d eta ^ d xi2 coefficient survives
    coeff = np.asarray(ex.evaluate_on(dalpha.coeffs[(0, 2)], env, E.shape))
    sign = 1.0 if float(np.sum(W * coeff)) > 0 else -1.0
    h = np.asarray(ex.evaluate_on(H.expr, env, E.shape))
    value = sign * float(np.sum(W * coeff * h))
    if grid is not None:
        avg = average(H, grid)
        if abs(value - avg) > check_tol:
            raise CrossCheckFailed(f"disc integral {value!r} != average {avg!r}")
    return value


def fiber_linking(F, points):
    """-sum sign_i F(a_i) for a balanced signed point set on S^2."""
    if isinstance(F, str):
        F = ScalarField.of(ManifoldId.SPHERE2, F)
    total = sum(int(s) for _, s in points)
    if total != 0:
        raise NotNullHomologous(f"signs sum to {total}")
    value = 0.0
    for (phi, psi), s in points:
        value -= int(s) * float(ex.evaluate(F.expr, {"phi": phi, "psi": psi}))
    return value


@dataclass
class LimitResult:
    values: list
    sup_gaps: list


def helicity_limit(sequence, grid):
    """Contact-formula helicities along a sequence and sup-norm gaps between neighbours."""
    fields = [_scalar(H, grid) for H in sequence]
    values, gaps, prev = [], [], None
    for H in fields:
        values.append(helicity_contact(H, grid).value)
        cur = H.values(grid)
        gaps.append(float("nan") if prev is None else float(np.max(np.abs(cur - prev))))
        prev = cur
    return LimitResult(values, gaps)


def continuity_bound(H, K, grid):
    """Right-hand side of the sup-norm continuity estimate for helicity(H) - helicity(K)."""
    H, K = _scalar(H, grid), _scalar(K, grid)
    h, k = H.values(grid), K.values(grid)
    vol = total_volume(grid)
    cH, cK = integrate_values(h, grid) / vol, integrate_values(k, grid) / vol
    sup = lambda a: float(np.max(np.abs(a)))  # noqa: E731
    return (4 * (abs(cH) + abs(cK)) + 3 * (sup(h) + sup(k))) * sup(h - k) * vol


def verify_contact_field(H, grid):
    """Max frame-equation defect of the solved X_H (alpha(X) = H, iota_X d alpha = -dH)."""
    H = _scalar(H, grid)
    X = contact_vector_field(H, grid)
    return contact_residual(X, H, grid)


def default_grid(manifold, resolution=48):
    return make_grid(manifold, resolution)


HOPF_EXAMPLES = {"1": 1.0, "cos(2*eta)": -1.0, "cos(eta)^2": 0.0, "sin(eta)^2": 0.0}

__all__ = [
    "HOPF_EXAMPLES",
    "Bounds",
    "HelicityResult",
    "Method",
    "bounds_check",
    "continuity_bound",
    "fiber_linking",
    "filling_disc_average",
    "helicity_contact",
    "helicity_direct",
    "helicity_direct_s3",
    "helicity_limit",
    "helicity_timedep",
    "horizontal_lift_helicity",
    "relative_helicity_contact",
    "verify_contact_field",
]
