import math

import numpy as np
import pytest

from helicity.contact import (
    basic_defect,
    contact_form,
    contact_residual,
    contact_vector_field,
    reeb_field,
    reeb_flow,
    require_basic,
)
from helicity.errors import ManifoldMismatch, NotBasic
from helicity.forms import ScalarField
from helicity.manifolds import ManifoldId, make_grid

S3 = ManifoldId.SPHERE3
T3 = ManifoldId.TORUS3
TWO_PI = 2 * math.pi


@pytest.mark.parametrize(
    "H, expected",
    [
        ("1", (0.0, TWO_PI, TWO_PI)),
        ("cos(2*eta)", (0.0, -TWO_PI, TWO_PI)),
        ("cos(eta)^2", (0.0, 0.0, TWO_PI)),
        ("sin(eta)^2", (0.0, TWO_PI, 0.0)),
    ],
)
def test_hopf_fields(H, expected, s3_coarse):
    X = contact_vector_field(ScalarField.of(S3, H), s3_coarse)
    for comp, want in zip(X.values(s3_coarse), expected):
        np.testing.assert_allclose(comp, want, atol=1e-12)


def test_constant_field_is_reeb(s3_coarse):
    X = contact_vector_field(ScalarField.of(S3, "1"), s3_coarse)
    R = reeb_field(S3).values(s3_coarse)
    for a, b in zip(X.values(s3_coarse), R):
        np.testing.assert_allclose(a, b, atol=1e-12)


@pytest.mark.parametrize(
    "manifold, H",
    [
        (S3, "cos(2*eta)+sin(2*eta)*cos(xi1-xi2)"),
        (S3, "exp(sin(2*eta)*sin(xi1-xi2))"),
        (T3, "cos(2*z)+0.3*sin(3*z)"),
        (T3, "exp(cos(z))"),
    ],
)
def test_frame_equations_hold(manifold, H):
    grid = make_grid(manifold, 16)
    F = ScalarField.of(manifold, H)
    X = contact_vector_field(F, grid)
    assert contact_residual(X, F, grid) < 1e-8
    alpha = contact_form(manifold).values(grid)
    comps = X.values(grid)
    a_of_x = sum(alpha[(i,)] * comps[i] for i in range(3))
    np.testing.assert_allclose(a_of_x, F.values(grid), atol=1e-10)


@pytest.mark.parametrize("manifold, H", [(S3, "cos(xi1)"), (S3, "eta*cos(xi2)"), (T3, "cos(x)"), (T3, "sin(y+z)")])
def test_non_basic_rejected(manifold, H):
    grid = make_grid(manifold, 8)
    F = ScalarField.of(manifold, H)
    assert basic_defect(F, grid) > 1e-3
    with pytest.raises(NotBasic):
        require_basic(F, grid)
    with pytest.raises(NotBasic):
        contact_vector_field(F, grid)


def test_reeb_flow_preserves_basic_functions():
    F = ScalarField.of(S3, "sin(2*eta)*cos(xi1-xi2)")
    pts = (np.array([0.3, 1.1]), np.array([0.2, 4.0]), np.array([1.0, 2.0]))
    moved = reeb_flow(S3, pts, 0.37)
    from helicity import expr as ex

    a = ex.evaluate_on(F.expr, dict(zip(("eta", "xi1", "xi2"), pts)), (2,))
    b = ex.evaluate_on(F.expr, dict(zip(("eta", "xi1", "xi2"), moved)), (2,))
    np.testing.assert_allclose(a, b, atol=1e-14)


def test_no_contact_form_on_s2():
    with pytest.raises(ManifoldMismatch):
        contact_form(ManifoldId.SPHERE2)
