"""Skew products on T^2, the splitting equation, and twist homeomorphisms of the disc.

Points of T^2 are stored as angle pairs (u, v) in [0, 1)^2 standing for
(x, y) = (e^{2 pi i u}, e^{2 pi i v}).  A function f on the circle is a
FourierSpectrum in the variable z = 2 pi u.

The rotation number ``theta`` may be a float or a ``fractions.Fraction``;
with a Fraction, the phases n*theta mod 1 that enter the small divisors are
computed exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from . import expr as ex
from .calculus import FourierSpectrum
from .errors import InsufficientPairs, NotFlat, PrecisionExhausted, ResonantDivisor

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
RESONANCE_TOL = 1e-12
RESIDUAL_POINTS = 4096
R_FLOOR = 1e-8
STRICT_MAX_K = 3
RELAXED_MAX_K = 12


def parse_theta(text):
    if isinstance(text, (int, float, Fraction)):
        return text
    if str(text).lower() == "golden":
        return GOLDEN
    return float(text)


def frac_phase(n, theta):
    """n * theta mod 1 (exact for Fraction theta)."""
    if isinstance(theta, Fraction):
        return float((n * theta) % 1)
    return float(np.mod(n * float(theta), 1.0))


def one_minus_rotation(n, theta):
    """1 - e^{2 pi i n theta}, written as -2i sin(pi x) e^{i pi x} to keep tiny values accurate."""
    x = frac_phase(n, theta)
    return -2j * math.sin(math.pi * x) * complex(math.cos(math.pi * x), math.sin(math.pi * x))


def _nonzero(spec, tol=0.0):
    idx = spec.indices
    mask = np.abs(spec.coeffs) > tol
    return idx[mask], spec.coeffs[mask]


def eval_circle(spec, u):
    """Real part of sum c_n e^{2 pi i n u}, summing only nonzero modes."""
    u = np.asarray(u, dtype=float)
    n, c = _nonzero(spec)
    if n.size == 0:
        return np.zeros_like(u)
    return np.real(np.exp(2j * math.pi * np.multiply.outer(u, n)) @ c)


def spectrum_derivative_values(spec, u):
    """d/du of eval_circle."""
    u = np.asarray(u, dtype=float)
    n, c = _nonzero(spec)
    if n.size == 0:
        return np.zeros_like(u)
    return np.real(np.exp(2j * math.pi * np.multiply.outer(u, n)) @ (2j * math.pi * n * c))


# ---------------------------------------------------------------------------
# Furstenberg maps


@dataclass(frozen=True, eq=False)
class FurstenbergMap:
    theta: float | Fraction
    d: int
    f: FourierSpectrum | None = None

    def __call__(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        shift = 0.0 if self.f is None else eval_circle(self.f, u)
        return np.mod(u + float(self.theta), 1.0), np.mod(self.d * u + v + shift, 1.0)


def furstenberg_apply(m, point, iterations):
    """Orbit (u_j, v_j), j = 0..iterations, starting from ``point``."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    out = np.empty((iterations + 1, 2))
    u, v = float(point[0]), float(point[1])
    out[0] = u, v
    for j in range(1, iterations + 1):
        u, v = (float(a) for a in m(u, v))
        out[j] = u, v
    return out


def jacobian_det(m, points, h=1e-6):
    """Central-difference Jacobian determinant of the lifted map at angle points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    u, v = pts[:, 0], pts[:, 1]

    def lift(a, b):
        # the lift (u, v) -> (u + theta, d u + v + f(u)) without reduction mod 1
        shift = 0.0 if m.f is None else eval_circle(m.f, a)
        return a + float(m.theta), m.d * a + b + shift

    du = [(p - q) / (2 * h) for p, q in zip(lift(u + h, v), lift(u - h, v))]
    dv = [(p - q) / (2 * h) for p, q in zip(lift(u, v + h), lift(u, v - h))]
    return du[0] * dv[1] - du[1] * dv[0]


def torus_distance(a, b):
    """Max over the two angles of the circular distance."""
    d = np.abs(np.mod(np.asarray(a) - np.asarray(b) + 0.5, 1.0) - 0.5)
    return np.max(d, axis=0) if d.ndim > 1 else d


# ---------------------------------------------------------------------------
# splitting


@dataclass
class SplitReport:
    g_spectrum: FourierSpectrum
    eta: float
    residual_sup: float
    c0_partial_sums: list
    c1_partial_sums: list
    small_divisor_min: float

    def to_dict(self):
        return {
            "eta": self.eta,
            "residual_sup": self.residual_sup,
            "small_divisor_min": self.small_divisor_min,
            "g": self.g_spectrum.to_json(),
            "c0_partial_sums": self.c0_partial_sums,
            "c1_partial_sums": self.c1_partial_sums,
        }


def split_residual(f, g, theta, eta, points=RESIDUAL_POINTS):
    """sup_u |g(u) - g(u + theta) - f(u) + eta| on a uniform grid."""
    u = np.arange(points) / points
    lhs = eval_circle(g, u) - eval_circle(g, np.mod(u + float(theta), 1.0))
    return float(np.max(np.abs(lhs - eval_circle(f, u) + eta)))


def split_function(f, theta, N=None):
    """Solve g(x) - g(e^{2 pi i theta} x) = f(x) - eta coefficientwise for |n| <= N."""
    N = f.N if N is None else int(N)
    if N > f.N:
        raise ValueError(f"N = {N} exceeds the spectrum size {f.N}")
    f = f.truncate(N)
    g = np.zeros(2 * N + 1, dtype=complex)
    smallest = math.inf
    for n in range(1, N + 1):
        for s in (n, -n):
            div = one_minus_rotation(s, theta)
            smallest = min(smallest, abs(div))
            if abs(div) < RESONANCE_TOL:
                raise ResonantDivisor(f"|1 - e^(2 pi i {s} theta)| = {abs(div):.3g}")
            g[s + N] = f[s] / div
    gs = FourierSpectrum(N, g)
    eta = float(f[0].real)
    mags = np.abs(g)
    c0 = [float(np.sum(mags[N - m : N + m + 1])) for m in range(1, N + 1)]
    weighted = mags * np.abs(gs.indices)
    c1 = [float(np.sum(weighted[N - m : N + m + 1])) for m in range(1, N + 1)]
    return SplitReport(gs, eta, split_residual(f, gs, theta, eta), c0, c1, float(smallest))


# ---------------------------------------------------------------------------
# Furstenberg's example


def continued_fraction(partials):
    """[a0; a1, a2, ...] as an exact Fraction."""
    value = Fraction(partials[-1])
    for a in reversed(partials[:-1]):
        value = a + 1 / value
    return value


def _meets_bound(theta, freqs, strict):
    for k, n in enumerate(freqs, start=1):
        x = (n * theta) % 1
        bound = Fraction(1, 2**n) if strict else Fraction(1, 2**k)
        if not 0 < x <= bound:
            return False
    return True


def furstenberg_theta(K, strict=True, tail=40):
    """theta = [0; 1, 1, A, 1, 1, ...] with A the least power of two meeting the bounds.

    theta is then slightly above 1/2, so every 2^k theta sits just above an
    integer.  The golden tail keeps the continued fraction from terminating.
    """
    freqs = [2**k for k in range(1, K + 1)]
    for j in range(1, 4 * freqs[-1] + 8):
        theta = continued_fraction([0, 1, 1, 2**j] + [1] * tail)
        if _meets_bound(theta, freqs, strict):
            return theta, freqs
    raise PrecisionExhausted(f"no theta found for K = {K}")


@dataclass
class FurstenbergExample:
    theta: Fraction
    n_k: list
    f: FourierSpectrum
    g: FourierSpectrum
    strict: bool
    c0_partial_sums: list = field(default_factory=list)
    c1_partial_sums: list = field(default_factory=list)

    def to_dict(self):
        return {
            "theta": float(self.theta),
            "theta_exact": f"{self.theta.numerator}/{self.theta.denominator}",
            "n_k": self.n_k,
            "mode": "strict" if self.strict else "relaxed",
            "c0_partial_sums": self.c0_partial_sums,
            "c1_partial_sums": self.c1_partial_sums,
        }


def furstenberg_example(K, mode="strict"):
    """f with f_{+-n_k} = (1 - e^{+-2 pi i n_k theta})/k^2 and g with g_{+-n_k} = 1/k^2.

    ``strict`` enforces 0 < {n_k theta} <= 2^{-n_k} (K <= 3); ``relaxed``
    uses the weaker bound 2^{-k} (K <= 12).  Partial sums run over k:
    sum |g_n| (bounded, so g is continuous) and sum |n g_n| (unbounded,
    so g is not C^1).
    """
    strict = mode == "strict"
    if mode not in ("strict", "relaxed"):
        raise ValueError(f"unknown mode {mode!r}")
    limit = STRICT_MAX_K if strict else RELAXED_MAX_K
    if K < 1:
        raise ValueError("K must be >= 1")
    if K > limit:
        raise PrecisionExhausted(f"{mode} mode supports K <= {limit}, got {K}")
    theta, freqs = furstenberg_theta(K, strict)
    N = freqs[-1]
    fc = np.zeros(2 * N + 1, dtype=complex)
    gc = np.zeros(2 * N + 1, dtype=complex)
    c0, c1 = [], []
    s0 = s1 = 0.0
    for k, n in enumerate(freqs, start=1):
        for s in (n, -n):
            fc[s + N] = one_minus_rotation(s, theta) / k**2
            gc[s + N] = 1.0 / k**2
        s0 += 2.0 / k**2
        s1 += 2.0 * n / k**2
        c0.append(s0)
        c1.append(s1)
    return FurstenbergExample(theta, freqs, FourierSpectrum(N, fc), FourierSpectrum(N, gc), strict, c0, c1)


# ---------------------------------------------------------------------------
# conjugacies


def kodaka_psi(g, theta, eta, d=1, m=0, k=0):
    """psi(u, v) = (u + (m theta + eta + k)/d, m u + v + g(u)) in angle coordinates."""
    shift = (m * float(theta) + eta + k) / d

    def psi(u, v):
        u = np.asarray(u, dtype=float)
        return np.mod(u + shift, 1.0), np.mod(m * u + np.asarray(v, dtype=float) + eval_circle(g, u), 1.0)

    return psi


def conjugacy_check(psi, phi_a, phi_b, points, metric="torus"):
    """sup over points of dist(psi(phi_a(p)), phi_b(psi(p)))."""
    u, v = points
    left = psi(*phi_a(u, v))
    right = phi_b(*psi(u, v))
    if metric == "torus":
        return float(np.max(torus_distance(np.stack(left), np.stack(right))))
    return float(np.max(np.hypot(left[0] - right[0], left[1] - right[1])))


def torus_points(n):
    g = np.arange(n) / n
    U, V = np.meshgrid(g, g, indexing="ij")
    return U.ravel(), V.ravel()


def orbit_discrepancy(m, start, n, cells):
    """max over k x k boxes of |visit frequency - 1/k^2| for the first n orbit points."""
    if n < cells * cells:
        raise ValueError("need at least k^2 orbit points")
    orbit = furstenberg_apply(m, start, n - 1) if n > 1 else np.asarray([start], dtype=float)
    idx = np.minimum((orbit * cells).astype(int), cells - 1)
    counts = np.zeros((cells, cells))
    np.add.at(counts, (idx[:, 0], idx[:, 1]), 1.0)
    return float(np.max(np.abs(counts / n - 1.0 / cells**2)))


# ---------------------------------------------------------------------------
# twist homeomorphisms of the disc


def _smooth_step(s):
    """0 for s <= 0, 1 for s >= 1, C-infinity in between."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
        b = np.where(s < 1, np.exp(-1.0 / np.where(s < 1, 1.0 - s, 1.0)), 0.0)
    return a / (a + b)


@dataclass(frozen=True, eq=False)
class TwistHomeo:
    """(r, theta) -> (r, theta + rho(r)); rho equals ``profile`` on (0, cutoff] and vanishes at r = 1."""

    profile: ex.Expr
    exponent: float
    cutoff: float = 0.9

    @classmethod
    def power(cls, a, cutoff=0.9):
        return cls(ex.parse(f"r^(-{a!r})"), float(a), cutoff)

    @classmethod
    def of(cls, text, exponent, cutoff=0.9):
        return cls(ex.parse(text), float(exponent), cutoff)

    def profile_values(self, r):
        r = np.asarray(r, dtype=float)
        return np.asarray(ex.evaluate_on(self.profile, {"r": r}, r.shape))

    def rho(self, r):
        r = np.asarray(r, dtype=float)
        taper = _smooth_step((1.0 - r) / (1.0 - self.cutoff)) if self.cutoff < 1 else 1.0
        return self.profile_values(r) * taper

    def rho_prime(self, r):
        r = np.asarray(r, dtype=float)
        return np.asarray(ex.evaluate_on(ex.differentiate(self.profile, "r"), {"r": r}, r.shape))

    def growth_ratio(self, radii=(1e-6, 1e-5, 1e-4, 1e-3, 1e-2)):
        """max/min of rho(r) r^a over small radii (bounded above and below near 0)."""
        vals = np.abs(self.profile_values(np.asarray(radii)) * np.asarray(radii) ** self.exponent)
        return float(np.max(vals) / np.min(vals))

    def __call__(self, x, y, sign=1.0):
        r = np.hypot(x, y)
        th = np.arctan2(y, x) + sign * np.where(r > 0, self.rho(np.maximum(r, R_FLOOR)), 0.0)
        return r * np.cos(th), r * np.sin(th)

    def inverse(self, x, y):
        return self(x, y, sign=-1.0)


ZERO_TWIST = TwistHomeo(ex.ZERO, 1.0, 0.9)

NINE_F = "exp(-4/(r^2*(1+15*cos(theta)^2)))"


@dataclass
class ConjugatedHamiltonian:
    H: Callable
    partials_at_origin: list


def _polar(F):
    F = ex.parse(F) if isinstance(F, str) else F

    def fn(r, th):
        r = np.asarray(r, dtype=float)
        return np.asarray(ex.evaluate_on(F, {"r": r, "theta": th}, np.broadcast(r, th).shape))

    return F, fn


def check_flat(F, radii=(1e-1, 3e-2, 1e-2), samples=64):
    """Require |F| <= exp(-c/r^2) with a uniform c > 0 on small circles."""
    _, fn = _polar(F)
    th = 2 * math.pi * np.arange(samples) / samples
    for r in radii:
        vals = np.abs(fn(np.full_like(th, r), th))
        worst = float(np.max(vals))
        if worst == 0.0:
            continue
        c = -math.log(worst) * r * r
        if not c > 1e-3:
            raise NotFlat(f"|F| = {worst:.3g} at r = {r}: no exp(-c/r^2) decay")


def _stencil_partials(H, x, y, h, order):
    """All order-``order`` partials of H at (x, y) by tensor central differences."""
    # central first-difference weights applied ``order`` times
    out = []
    for i in range(order + 1):
        nx, ny = order - i, i
        acc = 0.0
        for a in range(nx + 1):
            for b in range(ny + 1):
                w = math.comb(nx, a) * math.comb(ny, b) * (-1) ** (a + b)
                acc = acc + w * H(x + (nx / 2 - a) * h, y + (ny / 2 - b) * h)
        out.append(acc / h**order)
    return out


def twist_conjugated_hamiltonian(F, tw, radii=(1e-1, 1e-2, 1e-3, 1e-4), samples=16):
    """H = F o phi_rho and finite-difference partials of orders 1..3 on small circles."""
    check_flat(F)
    _, fn = _polar(F)

    def H(x, y):
        r = np.hypot(x, y)
        th = np.arctan2(y, x)
        rho = np.where(r > 0, tw.rho(np.maximum(r, R_FLOOR)), 0.0)
        return fn(r, th + rho)

    partials = []
    th = 2 * math.pi * np.arange(samples) / samples
    for r in radii:
        x, y = r * np.cos(th), r * np.sin(th)
        rp = float(np.max(np.abs(tw.rho_prime(np.array([r]))))) if tw.profile != ex.ZERO else 0.0
        h = 1e-2 * r / (1.0 + r * rp)
        entry = {"r": r, "h": h}
        for order in (1, 2, 3):
            entry[f"order{order}"] = float(np.max(np.abs(_stencil_partials(H, x, y, h, order))))
        partials.append(entry)
    return ConjugatedHamiltonian(H, partials)


@dataclass
class LipschitzPair:
    n: int
    r: float
    r_prime: float
    L: float
    ratio: float  # (r - r'/4)/(r - r'), the sharper bound

    def row(self):
        return (self.n, self.r, self.r_prime, self.L)


def _solve_level(tw, level):
    """r in [R_FLOOR, cutoff] with profile(r) = level, or None."""
    lo, hi = R_FLOOR, tw.cutoff
    g = lambda r: float(tw.profile_values(np.array(r))) - level  # noqa: E731
    glo, ghi = g(lo), g(hi)
    if glo * ghi > 0:
        return None
    return brentq(g, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


def lipschitz_lower_bounds(tw, n_max, scan=None):
    """Pairs r_n > r'_n with rho(r_n) = pi/2, rho(r'_n) = pi (mod 2 pi) and r_n - r'_n < r_n^2.

    For level index n the radii solve rho = pi/2 + 2 pi n and rho = pi + 2 pi n
    (the next pi-level inward, since rho decreases).  L_n = (3/r_n + 1)/4.
    """
    if n_max <= 0:
        return []
    scan = scan or 10 * n_max + 100
    pairs, skipped = [], []
    for n in range(1, scan + 1):
        r = _solve_level(tw, math.pi / 2 + 2 * math.pi * n)
        rp = _solve_level(tw, math.pi + 2 * math.pi * n)
        if r is None or rp is None:
            skipped.append(n)
            continue
        if not (rp < r and r - rp < r * r):
            skipped.append(n)
            continue
        pairs.append(LipschitzPair(n, r, rp, 0.25 * (3.0 / r + 1.0), (r - rp / 4) / (r - rp)))
        if len(pairs) == n_max:
            return pairs
    raise InsufficientPairs(f"found {len(pairs)} of {n_max} pairs (skipped levels {skipped[:10]})")


def lipschitz_closed_form(n, a=2.0):
    """r_n and L_n for rho = r^(-a)."""
    r = (math.pi / 2 + 2 * math.pi * n) ** (-1.0 / a)
    return r, 0.25 * (3.0 / r + 1.0)
