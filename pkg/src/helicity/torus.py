"""Strictly contact fields on T^3 with alpha = cos z dx - sin z dy.

Basic Hamiltonians depend on z only and are handled through their Fourier
spectrum.  The closed-form helicity carries a normalisation constant
``kappa`` that is not assumed: it is measured by direct quadrature for
H = 1 and stored in ``data/kappa.json``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from .calculus import FourierSpectrum, PRIMITIVE_TOL, integrate, integrate_values, torus_primitives
from .core import HelicityResult, Method
from .errors import CrossCheckFailed, NotExact
from .forms import exterior_derivative, wedge
from .manifolds import ManifoldId, make_grid

EXACT_TOL = 1e-12
REDUCED_TOL = 1e-8
DEFAULT_RESOLUTION = 32


@dataclass(frozen=True)
class TorusHamiltonian:
    spectrum: FourierSpectrum

    def __post_init__(self):
        if not self.spectrum.is_real():
            raise ValueError("spectrum must satisfy c_{-n} = conj(c_n)")

    @classmethod
    def real(cls, coeffs):
        """From ``{n: c_n}`` for n >= 0."""
        return cls(FourierSpectrum.real(coeffs))

    @classmethod
    def from_json(cls, data):
        return cls(FourierSpectrum.from_json(data))

    @property
    def expr(self):
        return self.spectrum.to_expr("z")


@dataclass(frozen=True)
class Flux:
    a1: float
    b1: float
    exact: bool

    def to_dict(self):
        return {"a1": self.a1, "b1": self.b1, "exact": self.exact}


def torus_flux(h):
    """Cohomology class a1 [dy^dz] + b1 [dx^dz] of iota_{X_H} mu."""
    c1 = complex(h.spectrum[1])
    return Flux(2 * c1.real, -2 * c1.imag, abs(c1) <= EXACT_TOL)


def mode_weight(n):
    """Weight w_n in  sum_n w_n |c_n|^2,  w_n = -(3 + 4/(n^2 - 1)); w_0 = +1."""
    if abs(n) == 1:
        raise NotExact("the n = +-1 modes carry flux")
    return -(3.0 + 4.0 / (n * n - 1))


assert mode_weight(0) == 1.0


def fourier_bracket(h):
    """c_0^2 - 2 sum_{n>0} (3 + 4/(n^2 - 1)) |c_n|^2 for an exact spectrum."""
    flux = torus_flux(h)
    if not flux.exact:
        raise NotExact(f"c_1 = {h.spectrum[1]:.6g} != 0 (a1 = {flux.a1:.6g}, b1 = {flux.b1:.6g})")
    s = h.spectrum
    return float(sum(mode_weight(n) * abs(s[n]) ** 2 for n in s.indices.tolist() if abs(n) != 1))


def _kappa_path():
    return resources.files("helicity").joinpath("data/kappa.json")


@lru_cache(maxsize=1)
def kappa():
    """Stored normalisation constant (see ``calibrate_kappa``)."""
    return float(json.loads(_kappa_path().read_text())["kappa"])


def calibrate_kappa(resolution=DEFAULT_RESOLUTION):
    """kappa = direct helicity of X_1 divided by the bracket value 1."""
    h = TorusHamiltonian.real({0: 1.0})
    direct = torus_helicity_direct(h, make_grid(ManifoldId.TORUS3, resolution)).value
    return direct / fourier_bracket(h)


def torus_helicity_fourier(h, kappa_value=None):
    k = kappa() if kappa_value is None else kappa_value
    return k * fourier_bracket(h)


def reduced_integrand(h, F, G, grid):
    """Values of 2H(F cos z - G sin z) - 3H^2 at the nodes."""
    from . import expr as ex

    env = grid.env
    shape = grid.weights.shape
    H = np.asarray(ex.evaluate_on(h.expr, env, shape))
    Fv = np.asarray(ex.evaluate_on(F, env, shape))
    Gv = np.asarray(ex.evaluate_on(G, env, shape))
    z = env["z"]
    return 2 * H * (Fv * np.cos(z) - Gv * np.sin(z)) - 3 * H**2


def torus_helicity_direct(h, grid=None, tol=PRIMITIVE_TOL):
    """int beta ^ d beta over T^3 for beta = F dx + G dy - H alpha, checked two ways."""
    if grid is None:
        grid = make_grid(ManifoldId.TORUS3, DEFAULT_RESOLUTION)
    prim = torus_primitives(h.spectrum, grid)
    prim.report.require(tol)
    value = integrate(wedge(prim.beta, exterior_derivative(prim.beta)), grid)
    reduced = integrate_values(reduced_integrand(h, prim.F, prim.G, grid), grid)
    if abs(value - reduced) > REDUCED_TOL * max(1.0, abs(value)):
        raise CrossCheckFailed(f"int beta^d beta = {value!r} but reduced integrand gives {reduced!r}")
    return HelicityResult(value, Method.DIRECT_QUADRATURE, grid.summary(), prim.residual, {"reduced_value": reduced})


def plancherel_ratio(h, grid=None):
    """Grid L^2 norm of H over sum |c_n|^2; equals the volume (2 pi)^3."""
    if grid is None:
        grid = make_grid(ManifoldId.TORUS3, DEFAULT_RESOLUTION)
    from . import expr as ex

    vals = np.asarray(ex.evaluate_on(h.expr, grid.env, grid.weights.shape))
    return integrate_values(vals**2, grid) / h.spectrum.plancherel()


def random_exact_spectrum(rng, N=8, scale=1.0):
    """Random real spectrum of bandwidth N with c_1 = 0."""
    coeffs = {0: scale * rng.normal()}
    for n in range(2, N + 1):
        coeffs[n] = scale * complex(rng.normal(), rng.normal()) / 2
    return TorusHamiltonian.real(coeffs)


__all__ = [
    "Flux",
    "TorusHamiltonian",
    "calibrate_kappa",
    "fourier_bracket",
    "kappa",
    "mode_weight",
    "plancherel_ratio",
    "random_exact_spectrum",
    "torus_flux",
    "torus_helicity_direct",
    "torus_helicity_fourier",
]
