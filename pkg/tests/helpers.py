"""Shared generators and property checks for the helicity functionals on S^3."""

import math

import numpy as np

from helicity import core
from helicity.calculus import average, l2_norm_sq
from helicity.expr import parse, substitute, to_string
from helicity.forms import ScalarField
from helicity.manifolds import ManifoldId, total_volume

S3 = ManifoldId.SPHERE3

# smooth basic functions on S^3: invariant under the Reeb flow, which shifts xi1 and xi2 together
BASIC_BASIS = [
    "1",
    "cos(2*eta)",
    "cos(2*eta)^2",
    "sin(2*eta)*cos(xi1-xi2)",
    "sin(2*eta)*sin(xi1-xi2)",
    "sin(2*eta)^2*cos(2*(xi1-xi2))",
]


def basic_text(coeffs):
    return "+".join(f"({float(c)!r})*{b}" for c, b in zip(coeffs, BASIC_BASIS))


def basic_field(coeffs):
    return ScalarField.of(S3, basic_text(coeffs))


def random_basic(rng, scale=2.0):
    return basic_field(rng.uniform(-scale, scale, len(BASIC_BASIS)))


def h(H, grid):
    return core.helicity_contact(H, grid).value


def check_bilinearity(H, K, grid, tol=1e-10):
    for sign in (1.0, -1.0):
        HK = ScalarField(S3, H.expr + sign * K.expr)
        lhs = h(HK, grid)
        rhs = h(H, grid) + sign * 2 * core.relative_helicity_contact(H, K, grid) + h(K, grid)
        assert abs(lhs - rhs) <= tol * (1 + abs(lhs)), (lhs, rhs)


def check_shift(H, c, grid, tol=1e-10):
    vol = total_volume(grid)
    cH = average(H, grid)
    shifted = h(ScalarField(S3, H.expr - c), grid)
    want = h(H, grid) - 2 * c * cH * vol + c * c * vol
    assert abs(shifted - want) <= tol * (1 + abs(want)), (shifted, want)
    # the shift is a quadratic in c minimised at c = c_H
    at_min = h(ScalarField(S3, H.expr - cH), grid)
    assert at_min <= shifted + tol * (1 + abs(shifted))


def check_l2_identity(H, K, grid, tol=1e-10):
    # move K to the mean of H, where the identity is purely algebraic
    K = ScalarField(S3, K.expr - average(K, grid) + average(H, grid))
    lhs = h(H, grid) - h(K, grid)
    rhs = 3 * (l2_norm_sq(K, grid) - l2_norm_sq(H, grid))
    assert abs(lhs - rhs) <= tol * (1 + abs(lhs)), (lhs, rhs)


def check_bounds(H, grid, tol=1e-10):
    b = core.bounds_check(H, grid)
    slack = tol * (1 + b.upper)
    assert b.lower - slack <= b.value <= b.upper + slack
    assert b.tight_lower == (abs(average(H, grid)) <= 1e-9 * max(1.0, b.upper))
    # the mean-zero part attains the lower bound, a constant attains the upper one
    zero_mean = ScalarField(S3, H.expr - average(H, grid))
    bz = core.bounds_check(zero_mean, grid)
    assert bz.tight_lower and abs(bz.value - bz.lower) <= slack
    const = ScalarField(S3, parse(repr(float(average(H, grid)))))
    bc = core.bounds_check(const, grid)
    assert bc.tight_upper and abs(bc.value - bc.upper) <= slack


def check_continuity(H, K, grid):
    gap = abs(h(H, grid) - h(K, grid))
    assert gap <= core.continuity_bound(H, K, grid) * (1 + 1e-12) + 1e-14


def check_rotation_invariance(H, c, grid, tol=1e-10):
    rotated = ScalarField(S3, substitute(H.expr, {"xi1": parse(f"xi1+{float(c)!r}")}))
    assert abs(h(rotated, grid) - h(H, grid)) <= tol * (1 + abs(h(H, grid)))


PROPERTIES = {
    "bilinearity": lambda rng, g: check_bilinearity(random_basic(rng), random_basic(rng), g),
    "shift identity": lambda rng, g: check_shift(random_basic(rng), rng.uniform(-3, 3), g),
    "L2 identity": lambda rng, g: check_l2_identity(random_basic(rng), random_basic(rng), g),
    "L2 bounds": lambda rng, g: check_bounds(random_basic(rng), g),
    "continuity bound": lambda rng, g: check_continuity(random_basic(rng), random_basic(rng, 0.5), g),
    "xi1 rotation": lambda rng, g: check_rotation_invariance(random_basic(rng), rng.uniform(0, 2 * math.pi), g),
}


# smooth monomials on the disc (x = r cos theta, y = r sin theta) times powers of t
DISC_BASIS = ["1", "r*cos(theta)", "r*sin(theta)", "r^2", "r^2*sin(2*theta)", "t", "t*r*cos(theta)", "t^2*r^2"]


def random_isotopy(rng, support_radius=0.9, scale=1.0):
    """Compactly supported Hamiltonian: a random disc polynomial damped by a bump."""
    from helicity.suspension import IsotopySpec

    c = rng.uniform(-scale, scale, len(DISC_BASIS))
    poly = "+".join(f"({float(a)!r})*{b}" for a, b in zip(c, DISC_BASIS))
    return IsotopySpec.of(f"bump(r/{support_radius!r})*({poly})", support_radius)


def text_of(H):
    return to_string(H.expr)


def numpy_rng(seed):
    return np.random.default_rng(seed)
