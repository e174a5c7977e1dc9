"""Quadrature, averages, Fourier spectra and explicit primitive one-forms."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .contact import contact_form, contact_vector_field
from .errors import ManifoldMismatch, NotExact, NotTopDegree, NotZonal, ResidualTooLarge
from .forms import KForm, ScalarField, contract_values, exterior_derivative
from .manifolds import ManifoldId, chart, make_grid, total_volume

PRIMITIVE_TOL = 1e-6
AGREEMENT_TOL = 1e-6
ZONAL_TOL = 1e-10


def _as_scalar(f, grid):
    if isinstance(f, ScalarField):
        if f.manifold is not grid.manifold:
            raise ManifoldMismatch(f"{f.manifold.value} field on {grid.manifold.value} grid")
        return f
    if isinstance(f, ex.Expr):
        return ScalarField(grid.manifold, f)
    if isinstance(f, str):
        return ScalarField.of(grid.manifold, f)
    return ScalarField(grid.manifold, ex.as_expr(f))


def integrate(f, grid):
    """Integral of a scalar (against the canonical volume) or of a top-degree form."""
    if isinstance(f, KForm):
        if f.manifold is not grid.manifold:
            raise ManifoldMismatch(f"{f.manifold.value} form on {grid.manifold.value} grid")
        dim = chart(grid.manifold).dim
        if f.degree != dim:
            raise NotTopDegree(f"degree {f.degree} form on a {dim}-manifold")
        (coeff,) = f.values(grid).values()
        return float(grid.weights @ coeff)
    f = _as_scalar(f, grid)
    return float(grid.weights @ (grid.density * f.values(grid)))


def integrate_values(values, grid, top_form=False):
    """Same as :func:`integrate` for values already tabulated at the nodes."""
    w = grid.weights if top_form else grid.weights * grid.density
    return float(w @ values)


def average(f, grid):
    return integrate(f, grid) / total_volume(grid)


def l2_norm_sq(f, grid):
    f = _as_scalar(f, grid)
    return integrate_values(f.values(grid) ** 2, grid)


# ---------------------------------------------------------------------------
# Fourier spectra


@dataclass(frozen=True, eq=False)
class FourierSpectrum:
    """Coefficients c_n, -N <= n <= N, of sum c_n exp(i n z)."""

    N: int
    coeffs: np.ndarray  # index n + N

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (2 * self.N + 1,):
            raise ValueError(f"expected {2 * self.N + 1} coefficients, got {c.shape}")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_dict(cls, coeffs, N=None):
        """Spectrum from ``{n: c_n}``; pass one sign of each mode and the mirror is filled for real input."""
        N = N if N is not None else max((abs(n) for n in coeffs), default=0)
        arr = np.zeros(2 * N + 1, dtype=complex)
        for n, c in coeffs.items():
            arr[n + N] = c
        return cls(N, arr)

    @classmethod
    def real(cls, coeffs, N=None):
        """Real function from one-sided coefficients {n >= 0: c_n}; c_-n = conj(c_n)."""
        N = N if N is not None else max((abs(n) for n in coeffs), default=0)
        arr = np.zeros(2 * N + 1, dtype=complex)
        for n, c in coeffs.items():
            if n < 0:
                raise ValueError("give non-negative indices only")
            arr[N + n] = c
            arr[N - n] = np.conj(c)
        if abs(arr[N].imag) > 0:
            raise ValueError("c_0 must be real for a real function")
        return cls(N, arr)

    def __getitem__(self, n):
        return self.coeffs[n + self.N] if abs(n) <= self.N else 0.0j

    @property
    def indices(self):
        return np.arange(-self.N, self.N + 1)

    def is_real(self, tol=1e-12):
        return bool(np.max(np.abs(self.coeffs - np.conj(self.coeffs[::-1])), initial=0.0) <= tol)

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        phase = np.exp(1j * np.multiply.outer(z, self.indices))
        return phase @ self.coeffs

    def real_values(self, z):
        return np.real(self(z))

    def plancherel(self):
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def truncate(self, N):
        if N >= self.N:
            return self
        return FourierSpectrum(N, self.coeffs[self.N - N : self.N + N + 1])

    def to_expr(self, variable="z", drop=0.0):
        """Real trigonometric expression a_0 + sum a_n cos(nz) + b_n sin(nz)."""
        z = ex.Var(variable)
        out = ex.Num(float(self[0].real))
        for n in range(1, self.N + 1):
            c = self[n]
            a, b = 2.0 * c.real, -2.0 * c.imag
            arg = ex.mul(ex.Num(float(n)), z)
            if abs(a) > drop:
                out = out + ex.Num(a) * ex.Call("cos", arg)
            if abs(b) > drop:
                out = out + ex.Num(b) * ex.Call("sin", arg)
        return out

    def to_json(self):
        return {"N": int(self.N), "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs]}

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        N = int(data["N"])
        return cls(N, np.array([complex(re, im) for re, im in data["coeffs"]]))


def fourier_coeffs(f, N, samples=None, variable="z"):
    """Spectrum of a 2 pi-periodic function from uniform samples.

    ``f`` is an expression (or its text) in ``variable``, a callable, or an array of
    samples at z_j = 2 pi j / M.  At least 4N samples are used.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if isinstance(f, np.ndarray) or isinstance(f, (list, tuple)):
        vals = np.asarray(f, dtype=complex)
        M = vals.size
        if M < 2 * N + 1:
            raise ValueError("not enough samples for the requested N")
    else:
        M = samples or 4 * N
        z = 2 * math.pi * np.arange(M) / M
        if isinstance(f, str):
            f = ex.parse(f)
        if isinstance(f, ex.Expr):
            vals = np.asarray(ex.evaluate_on(f, {variable: z}, z.shape), dtype=complex)
        else:
            vals = np.asarray(f(z), dtype=complex)
    c = np.fft.fft(vals) / M
    n = np.arange(-N, N + 1)
    return FourierSpectrum(N, c[n % M])


# ---------------------------------------------------------------------------
# primitives


@dataclass(frozen=True, eq=False)
class PrimitiveReport:
    form: KForm
    residual: float

    def require(self, tol=PRIMITIVE_TOL):
        if not self.residual <= tol:
            raise ResidualTooLarge(f"residual {self.residual:.3g} > {tol:.3g}")
        return self


def _max_diff(a, b):
    return max(float(np.max(np.abs(a[k] - b[k]))) for k in a)


def zonal_profile(F, grid):
    """Check that F depends only on phi and return its expression."""
    if F.manifold is not ManifoldId.SPHERE2:
        raise ManifoldMismatch("zonal functions live on s2")
    vals = F.values(grid).reshape(grid.shape)
    spread = float(np.max(np.abs(vals - vals[:, :1])))
    if spread > ZONAL_TOL * (1.0 + float(np.max(np.abs(vals)))):
        raise NotZonal(f"{F.expr} varies with psi (spread {spread:.3g})")
    return F.expr


def zonal_coefficient(F_expr, c_F):
    """a(phi) = (1/4pi) int_0^phi (F - c_F) sin s ds as an exactly differentiable expression."""
    s = ex.Var("s")
    integrand = (ex.substitute(F_expr, {"phi": s, "psi": 0.0}) - c_F) * ex.Call("sin", s) / (4 * ex.Pi())
    return ex.Integral(integrand, "s", 0.0, ex.Var("phi"))


def zonal_primitive(F, grid):
    """gamma = a(phi) dpsi with d gamma = (F - c_F) omega, for zonal F on S^2.

    The residual is the larger of the pointwise defect of d gamma at the
    nodes and |a(pi)|, the closing condition at the south pole that makes
    gamma a smooth form on the sphere.
    """
    F_expr = zonal_profile(F, grid)
    c_F = average(F, grid)
    a = zonal_coefficient(F_expr, c_F)
    gamma = KForm.build(ManifoldId.SPHERE2, 1, {"psi": a})
    target = ((F_expr - c_F) * chart(ManifoldId.SPHERE2).density)
    dgamma = exterior_derivative(gamma).values(grid)
    want = KForm.build(ManifoldId.SPHERE2, 2, {(0, 1): target}).values(grid)
    closing = abs(float(ex.evaluate(a, {"phi": math.pi})))
    return PrimitiveReport(gamma, max(_max_diff(dgamma, want), closing))


def iota_volume_values(X, grid):
    """Values of iota_X mu at the nodes for the canonical volume of the chart."""
    dim = chart(grid.manifold).dim
    mu = {tuple(range(dim)): grid.density}
    return contract_values(X.values(grid), mu, dim, dim)


def _s2_grid_for(grid):
    n_eta, n_xi1, n_xi2 = grid.shape
    return make_grid(ManifoldId.SPHERE2, (n_eta, max(n_xi1, n_xi2)))


def beta_primitive_s3(H, grid, X=None):
    """Primitive of iota_{X_H} mu on S^3 for a zonal basic H = F o p.

    beta = 2 p^* gamma + (2 c_H - H) alpha.  The residual compares d beta
    (symbolic) with iota_X mu built from the frame-solved field X_H.
    """
    if H.manifold is not ManifoldId.SPHERE3 or grid.manifold is not ManifoldId.SPHERE3:
        raise ManifoldMismatch("beta_primitive_s3 needs an S^3 field and grid")
    vals = H.values(grid).reshape(grid.shape)
    if float(np.max(np.abs(vals - vals[:, :1, :1]))) > ZONAL_TOL * (1 + float(np.max(np.abs(vals)))):
        raise NotZonal(f"{H.expr} depends on xi1 or xi2")
    F = ScalarField(ManifoldId.SPHERE2, ex.substitute(H.expr, {"eta": ex.Var("phi") / 2, "xi1": 0.0, "xi2": 0.0}))
    zonal_profile(F, _s2_grid_for(grid))
    c_H = average(H, grid)
    a = zonal_coefficient(F.expr, c_H)
    a_pull = ex.substitute(a, {"phi": 2 * ex.Var("eta")})
    alpha = contact_form(ManifoldId.SPHERE3)
    k = 2 * c_H - H.expr
    beta = KForm.build(
        ManifoldId.SPHERE3,
        1,
        {
            "xi1": 2 * a_pull + k * alpha.coeffs[(1,)],
            "xi2": -2 * a_pull + k * alpha.coeffs[(2,)],
        },
    )
    if X is None:
        X = contact_vector_field(H, grid)
    residual = _max_diff(exterior_derivative(beta).values(grid), iota_volume_values(X, grid))
    closing = abs(float(ex.evaluate(a, {"phi": math.pi})))
    return PrimitiveReport(beta, max(residual, closing))


@dataclass(frozen=True, eq=False)
class TorusPrimitives:
    F: ex.Expr
    G: ex.Expr
    beta: KForm
    residual: float

    @property
    def report(self):
        return PrimitiveReport(self.beta, self.residual)


def torus_fg_spectra(spec):
    """Spectra of the real functions F, G with F' = -2H sin z, G' = -2H cos z."""
    if abs(spec[1]) > 1e-12 or abs(spec[-1]) > 1e-12:
        raise NotExact(f"c_1 = {spec[1]:.6g} != 0")
    M = spec.N + 1
    Fh = np.zeros(2 * M + 1, dtype=complex)
    Gh = np.zeros(2 * M + 1, dtype=complex)
    for m in range(-M, M + 1):
        if m == 0:
            continue
        lo, hi = spec[m - 1], spec[m + 1]
        Fh[m + M] = (lo - hi) / m
        Gh[m + M] = 1j * (lo + hi) / m
    return FourierSpectrum(M, Fh), FourierSpectrum(M, Gh)


def torus_primitives(spec, grid=None):
    """F, G and beta = F dx + G dy - H alpha on T^3, with d beta = iota_{X_H} mu."""
    Fs, Gs = torus_fg_spectra(spec)
    H = spec.to_expr("z")
    F, G = Fs.to_expr("z"), Gs.to_expr("z")
    alpha = contact_form(ManifoldId.TORUS3)
    beta = KForm.build(
        ManifoldId.TORUS3,
        1,
        {"x": F - H * alpha.coeffs[(0,)], "y": G - H * alpha.coeffs[(1,)]},
    )
    if grid is None:
        grid = make_grid(ManifoldId.TORUS3, (4, 4, max(32, 4 * spec.N + 8)))
    X = contact_vector_field(ScalarField(ManifoldId.TORUS3, H), grid, check_basic=False)
    residual = _max_diff(exterior_derivative(beta).values(grid), iota_volume_values(X, grid))
    return TorusPrimitives(F, G, beta, residual)
