"""Suspensions of compactly supported disc isotopies and the Calabi invariant.

An isotopy is given by its Hamiltonian F(r, theta, t).  Its suspension on
the solid torus D^2 x [0, 1) is X_F + d/dt with iota_{X_F} omega = dF, and
beta = F dt + (r^2/2) dtheta is a primitive of iota_X (omega ^ dt).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .calculus import integrate, integrate_values
from .core import HelicityResult, Method
from .errors import CrossCheckFailed, NotCompactlySupported, UnknownIdentifier
from .forms import KForm, VectorField, exterior_derivative, wedge
from .manifolds import ManifoldId, make_grid, total_volume

SUPPORT_TOL = 1e-9
AGREEMENT_TOL = 1e-6
DEFAULT_RESOLUTION = (160, 16, 16)
# standard round S^3 has volume 2 pi^2; the two glued solid tori carry 2 pi
UNIT_S3_VOLUME = 2 * math.pi**2

_DISK_VARS = ("r", "theta", "t")


@dataclass(frozen=True)
class IsotopySpec:
    hamiltonian: ex.Expr
    support_radius: float = 0.9

    @classmethod
    def of(cls, text, support_radius=0.9, check=True):
        e = ex.parse(text) if isinstance(text, str) else ex.as_expr(text)
        spec = cls(e, float(support_radius))
        if check:
            spec.validate()
        return spec

    def validate(self, samples=24):
        """F and its first partials must vanish on r >= support_radius."""
        unknown = ex.free_vars(self.hamiltonian) - set(_DISK_VARS)
        if unknown:
            raise UnknownIdentifier(f"{sorted(unknown)} not among r, theta, t")
        if not 0.0 < self.support_radius < 1.0:
            raise NotCompactlySupported(f"support radius {self.support_radius} not in (0, 1)")
        r = np.linspace(self.support_radius, 1.0, samples)
        th = np.linspace(0.0, 2 * math.pi, samples, endpoint=False)
        t = np.linspace(0.0, 1.0, samples)
        R, TH, T = (a.ravel() for a in np.meshgrid(r, th, t, indexing="ij"))
        env = {"r": R, "theta": TH, "t": T}
        for e in (self.hamiltonian, *ex.gradient(self.hamiltonian, _DISK_VARS)):
            worst = float(np.max(np.abs(ex.evaluate_on(e, env, R.shape))))
            if not worst <= SUPPORT_TOL:
                raise NotCompactlySupported(f"|{e}| = {worst:.3g} outside r < {self.support_radius}")
        return self

    def scaled(self, factor):
        return IsotopySpec(ex.as_expr(factor) * self.hamiltonian, self.support_radius)


ZERO_SPEC = IsotopySpec(ex.ZERO, 0.9)


def twist_hamiltonian(rho):
    """F(r) = int_r^1 s rho(s) ds, whose flow rotates the circle of radius r by t rho(r)."""
    rho = ex.parse(rho) if isinstance(rho, str) else rho
    s = ex.Var("s")
    inner = s * ex.substitute(rho, {"r": s})
    return -ex.Integral(inner, "s", 1.0, ex.Var("r"))


def twist_spec(rho="bump(r/0.9)", support_radius=0.9):
    return IsotopySpec.of(twist_hamiltonian(rho), support_radius)


def twist_oracle(rho="bump(r/0.9)"):
    """2 pi int_0^1 r^3 rho(r) dr by adaptive quadrature."""
    from scipy.integrate import quad

    e = ex.parse(rho) if isinstance(rho, str) else rho
    val, _ = quad(lambda r: r**3 * float(ex.evaluate(e, {"r": r})), 0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
    return 2 * math.pi * val


def solid_torus_grid(resolution=DEFAULT_RESOLUTION):
    return make_grid(ManifoldId.SOLID_TORUS, resolution)


def _grid(grid):
    return solid_torus_grid() if grid is None else grid


def calabi(spec, grid=None):
    """int_0^1 int_D F_t omega dt."""
    spec.validate()
    return integrate(spec.hamiltonian, _grid(grid))


def hamiltonian_field(spec):
    """X_F on the disc (r, theta components) with iota_X omega = dF."""
    F = spec.hamiltonian
    r = ex.Var("r")
    return ex.differentiate(F, "theta") / r, -ex.differentiate(F, "r") / r


def suspension_field(spec):
    xr, xth = hamiltonian_field(spec)
    return VectorField(ManifoldId.SOLID_TORUS, (xr, xth, ex.ONE))


def suspension_primitive(spec, with_reeb=True):
    """F dt + (r^2/2) dtheta; without the lambda term for X_F alone."""
    coeffs = {"t": spec.hamiltonian}
    if with_reeb:
        coeffs["theta"] = ex.parse("r^2/2")
    return KForm.build(ManifoldId.SOLID_TORUS, 1, coeffs)


LAMBDA = KForm.build(ManifoldId.SOLID_TORUS, 1, {"theta": "r^2/2"})


def field_residual(spec, grid=None):
    """max |iota_X omega - dF| over the disc directions at grid nodes."""
    grid = _grid(grid)
    xr, xth = (np.asarray(ex.evaluate_on(c, grid.env, grid.weights.shape)) for c in hamiltonian_field(spec))
    r = grid.env["r"]
    Fr, Fth = (
        np.asarray(ex.evaluate_on(ex.differentiate(spec.hamiltonian, v), grid.env, grid.weights.shape))
        for v in ("r", "theta")
    )
    # iota_X (r dr ^ dtheta) = r X^r dtheta - r X^theta dr
    return float(max(np.max(np.abs(-r * xth - Fr)), np.max(np.abs(r * xr - Fth))))


def _top(a, b, grid):
    return integrate(wedge(a, exterior_derivative(b)), grid)


def suspension_helicity_direct(spec, grid=None, tol=AGREEMENT_TOL):
    """int beta ^ d beta on the solid torus, checked against 2 Cal."""
    grid = _grid(grid)
    spec.validate()
    beta = suspension_primitive(spec)
    value = _top(beta, beta, grid)
    cal = calabi(spec, grid)
    X = suspension_field(spec)
    b = beta.values(grid)
    pairing = integrate_values(sum(b[(i,)] * c for i, c in enumerate(X.values(grid))), grid)
    if abs(value - 2 * cal) > tol * (1 + abs(cal)) or abs(pairing - value) > tol * (1 + abs(value)):
        raise CrossCheckFailed(f"helicity {value!r}, int beta(X) {pairing!r}, 2 Cal {2 * cal!r}")
    residual = field_residual(spec, grid)
    return HelicityResult(value, Method.DIRECT_QUADRATURE, grid.summary(), residual, {"calabi": cal})


def suspension_terms(spec, grid=None):
    """H(X_F), R(X_F, d/dt) and H(d/dt) by direct quadrature."""
    grid = _grid(grid)
    bx = suspension_primitive(spec, with_reeb=False)
    return {
        "h_field": _top(bx, bx, grid),
        "relative": _top(bx, LAMBDA, grid),
        "h_reeb": _top(LAMBDA, LAMBDA, grid),
    }


def relative_helicity_suspension(spec, grid=None, tol=AGREEMENT_TOL):
    """R(X, d/dt) = int beta_X ^ d lambda, checked against Cal."""
    grid = _grid(grid)
    spec.validate()
    value = _top(suspension_primitive(spec), LAMBDA, grid)
    cal = calabi(spec, grid)
    if abs(value - cal) > tol * (1 + abs(cal)):
        raise CrossCheckFailed(f"relative helicity {value!r} != Cal {cal!r}")
    return value


# ---------------------------------------------------------------------------
# embeddings into S^3


def embed_tau(index, point):
    """Coordinates (eta, xi1, xi2) of tau^index((r, theta), t)."""
    r, theta, t = (np.asarray(p, dtype=float) for p in point)
    if index == 1:
        out = (0.5 * np.arcsin(r), theta + 2 * math.pi * t, 2 * math.pi * t)
    elif index == 2:
        out = (0.5 * (math.pi - np.arcsin(r)), 2 * math.pi * t, theta + 2 * math.pi * t)
    else:
        raise ValueError("index must be 1 or 2")
    if out[0].ndim == 0:
        return tuple(float(c) for c in out)
    return out


def tau_preimage(index, eta, xi1, xi2):
    """Inverse of embed_tau (angles reduced to [0, 2 pi), t to [0, 1))."""
    two_pi = 2 * math.pi
    if index == 1:
        r, t, theta = np.sin(2 * eta), xi2 / two_pi, xi1 - xi2
    elif index == 2:
        r, t, theta = np.sin(math.pi - 2 * eta), xi1 / two_pi, xi2 - xi1
    else:
        raise ValueError("index must be 1 or 2")
    return r, np.mod(theta, two_pi), np.mod(t, 1.0)


def pushforward(index, spec, point):
    """Components of tau^index_* (X_F + d/dt) at tau^index(point), in Hopf coordinates."""
    r, theta, t = (np.asarray(p, dtype=float) for p in point)
    env = {"r": r, "theta": theta, "t": t}
    xr, xth = (np.asarray(ex.evaluate_on(c, env, r.shape)) for c in hamiltonian_field(spec))
    with np.errstate(divide="ignore", invalid="ignore"):
        deta = np.where(xr == 0.0, 0.0, xr / (2 * np.sqrt(1 - r**2)))
    two_pi = 2 * math.pi
    if index == 1:
        return deta, xth + two_pi, np.full_like(r, two_pi)
    return -deta, np.full_like(r, two_pi), xth + two_pi


def boundary_mismatch(spec1, spec2, samples=64):
    """Largest difference of the two pushed-forward fields on {eta = pi/4}."""
    rng = np.random.default_rng(0)
    xi1 = rng.uniform(0, 2 * math.pi, samples)
    xi2 = rng.uniform(0, 2 * math.pi, samples)
    eta = np.full(samples, math.pi / 4)
    one = pushforward(1, spec1, tau_preimage(1, eta, xi1, xi2))
    two = pushforward(2, spec2, tau_preimage(2, eta, xi1, xi2))
    return float(max(np.max(np.abs(a - b)) for a, b in zip(one, two)))


@dataclass
class DoubleSuspension:
    formula_value: float
    h_sum: float
    r_reeb: float
    h_reeb: float
    termwise_value: float
    calabi: tuple

    def to_dict(self):
        return {
            "formula_value": self.formula_value,
            "termwise": {"h_sum": self.h_sum, "r_reeb": self.r_reeb, "h_reeb": self.h_reeb, "value": self.termwise_value},
            "calabi": list(self.calabi),
        }


def double_suspension_helicity(spec1, spec2, grid=None, s3_grid=None):
    """Helicity of the double suspension on S^3 for the round volume 2 pi^2.

    The termwise value follows the decomposition X = X_1 + X_2 + R_alpha
    in the glued volume mu (total volume 2 pi), then rescales by
    (2 pi^2 / vol mu)^2.
    """
    from .core import helicity_contact

    grid = _grid(grid)
    s3_grid = make_grid(ManifoldId.SPHERE3, 24) if s3_grid is None else s3_grid
    cals = (calabi(spec1, grid), calabi(spec2, grid))
    formula = 2 * math.pi**2 * (cals[0] + cals[1] + 2 * math.pi**2)

    terms = [suspension_terms(s.validate(), grid) for s in (spec1, spec2)]
    h_sum = terms[0]["h_field"] + terms[1]["h_field"]
    r_reeb = terms[0]["relative"] + terms[1]["relative"]
    vol_mu = 2 * total_volume(grid)
    # R_alpha in mu = vol_mu * (alpha ^ d alpha): helicity scales quadratically
    h_reeb = (vol_mu / total_volume(s3_grid)) ** 2 * helicity_contact("1", s3_grid).value
    scale = UNIT_S3_VOLUME / vol_mu
    termwise = scale**2 * (h_sum + 2 * r_reeb + h_reeb)
    return DoubleSuspension(formula, h_sum, r_reeb, h_reeb, termwise, cals)


def calabi_sequence(specs, grid=None):
    """Calabi invariants along a sequence of isotopies."""
    grid = _grid(grid)
    return [calabi(s, grid) for s in specs]
