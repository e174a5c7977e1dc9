import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import iv

from helicity import expr as ex
from helicity.calculus import (
    FourierSpectrum,
    PrimitiveReport,
    average,
    beta_primitive_s3,
    fourier_coeffs,
    integrate,
    l2_norm_sq,
    torus_primitives,
    zonal_coefficient,
    zonal_primitive,
)
from helicity.contact import contact_form
from helicity.errors import ManifoldMismatch, NotExact, NotZonal, ResidualTooLarge
from helicity.forms import KForm, ScalarField, exterior_derivative, wedge
from helicity.manifolds import ManifoldId, make_grid

S2 = ManifoldId.SPHERE2
S3 = ManifoldId.SPHERE3


@pytest.mark.parametrize(
    "f, expected, tol",
    [("1", 1.0, 1e-12), ("cos(2*eta)", 0.0, 1e-10), ("cos(2*eta)^2", 1 / 3, 1e-9)],
)
def test_integrate_on_s3(f, expected, tol, s3_grid):
    assert integrate(f, s3_grid) == pytest.approx(expected, abs=tol)


def test_average_and_norm(s3_grid, s2_grid):
    assert average("1", s3_grid) == pytest.approx(1.0, abs=1e-13)
    assert average("cos(phi)", s2_grid) == pytest.approx(0.0, abs=1e-14)
    assert l2_norm_sq("cos(2*eta)", s3_grid) == pytest.approx(1 / 3, abs=1e-12)


def test_integrate_manifold_mismatch(s3_grid):
    with pytest.raises(ManifoldMismatch):
        integrate(ScalarField.of(S2, "cos(phi)"), s3_grid)


def test_fourier_cos2z():
    s = fourier_coeffs(ex.parse("cos(2*z)"), 4)
    want = np.zeros(9)
    want[4 + 2] = want[4 - 2] = 0.5
    np.testing.assert_allclose(s.coeffs, want, atol=1e-12)


def test_fourier_constant():
    s = fourier_coeffs(ex.parse("7+0*z"), 3)
    assert s[0] == pytest.approx(7.0, abs=1e-14)
    assert max(abs(s[n]) for n in (1, 2, 3, -1, -2, -3)) < 1e-14


def test_fourier_exp_cos_against_oracle():
    s = fourier_coeffs(ex.parse("exp(cos(z))"), 16)
    oracle = fourier_coeffs(lambda z: np.exp(np.cos(z)), 16, samples=4096)
    np.testing.assert_allclose(s.coeffs, oracle.coeffs, atol=1e-10)
    # and against the modified Bessel functions I_n(1)
    np.testing.assert_allclose(s.coeffs.real, iv(np.abs(np.arange(-16, 17)), 1.0), atol=1e-10)


def test_fourier_rejects_bad_input():
    with pytest.raises(ValueError):
        fourier_coeffs(ex.parse("cos(z)"), 0)
    with pytest.raises(ValueError):
        fourier_coeffs(np.ones(4), 4)


spectra = st.integers(1, 8).flatmap(
    lambda N: st.lists(st.tuples(st.floats(-2, 2), st.floats(-2, 2)), min_size=N + 1, max_size=N + 1).map(
        lambda cs: FourierSpectrum.real({n: complex(a, b if n else 0.0) for n, (a, b) in enumerate(cs)})
    )
)


@settings(max_examples=50)
@given(spectra)
def test_plancherel_and_reality(s):
    assert s.is_real()
    z = 2 * math.pi * np.arange(256) / 256
    vals = s(z)
    assert np.max(np.abs(vals.imag)) < 1e-12
    assert np.mean(np.abs(vals) ** 2) == pytest.approx(s.plancherel(), rel=1e-12, abs=1e-12)
    again = fourier_coeffs(s.to_expr("z"), s.N)
    np.testing.assert_allclose(again.coeffs, s.coeffs, atol=1e-12)


@settings(max_examples=30)
@given(spectra)
def test_spectrum_json_round_trip(s):
    back = FourierSpectrum.from_json(s.to_json())
    assert back.N == s.N
    np.testing.assert_array_equal(back.coeffs, s.coeffs)


def test_spectrum_truncate_and_index():
    s = FourierSpectrum.real({0: 1.0, 2: 0.5, 3: 0.25j})
    assert s[-3] == pytest.approx(-0.25j)
    assert s[7] == 0
    t = s.truncate(2)
    assert t.N == 2 and t[2] == 0.5
    assert list(s.indices) == list(range(-3, 4))


def test_zonal_coefficient_cos_phi(s2_grid):
    rep = zonal_primitive(ScalarField.of(S2, "cos(phi)"), s2_grid)
    assert rep.residual < 1e-10
    a = rep.form.coeffs[(1,)]
    for phi in (0.3, 1.2, 2.5):
        assert ex.evaluate(a, {"phi": phi}) == pytest.approx(math.sin(phi) ** 2 / (8 * math.pi), abs=1e-14)
    assert abs(ex.evaluate(a, {"phi": math.pi})) < 1e-14


def test_zonal_constant_gives_zero(s2_grid):
    rep = zonal_primitive(ScalarField.of(S2, "3+0*phi"), s2_grid)
    vals = rep.form.values(s2_grid)
    assert max(float(np.max(np.abs(v))) for v in vals.values()) < 1e-14


def test_zonal_closing_condition(s2_grid):
    F = ScalarField.of(S2, "cos(phi)^2")
    a = zonal_coefficient(F.expr, average(F, s2_grid))
    assert abs(ex.evaluate(a, {"phi": math.pi})) < 1e-12


def test_non_zonal_rejected(s2_grid):
    with pytest.raises(NotZonal):
        zonal_primitive(ScalarField.of(S2, "cos(psi)*sin(phi)"), s2_grid)


def test_beta_for_constant_is_alpha(s3_coarse):
    rep = beta_primitive_s3(ScalarField.of(S3, "1"), s3_coarse)
    alpha = contact_form(S3).values(s3_coarse)
    vals = rep.form.values(s3_coarse)
    assert max(float(np.max(np.abs(vals[k] - alpha[k]))) for k in vals) < 1e-13


def test_beta_residual_cos2eta(s3_grid):
    rep = beta_primitive_s3(ScalarField.of(S3, "cos(2*eta)"), s3_grid)
    assert rep.residual < 1e-6


def test_beta_helicity_for_cos_squared(s3_grid):
    rep = beta_primitive_s3(ScalarField.of(S3, "cos(eta)^2"), s3_grid).require()
    value = integrate(wedge(rep.form, exterior_derivative(rep.form)), s3_grid)
    assert value == pytest.approx(0.0, abs=1e-6)


def test_beta_rejects_non_zonal(s3_coarse):
    with pytest.raises(NotZonal):
        beta_primitive_s3(ScalarField.of(S3, "cos(xi1-xi2)*sin(2*eta)"), s3_coarse)


def test_primitive_report_require():
    form = KForm.build(S3, 1, {})
    assert PrimitiveReport(form, 1e-9).require(1e-6).residual == 1e-9
    with pytest.raises(ResidualTooLarge):
        PrimitiveReport(form, 1e-3).require(1e-6)
    with pytest.raises(ResidualTooLarge):
        PrimitiveReport(form, float("nan")).require(1e-6)


@pytest.mark.parametrize("coeffs", [{0: 1.0}, {0: 2.5}, {2: 0.5}, {0: 0.3, 2: 0.5, 3: 0.2 - 0.1j}])
def test_torus_primitives_residual(coeffs, t3_grid):
    prim = torus_primitives(FourierSpectrum.real(coeffs), t3_grid)
    assert prim.residual < 1e-9


def test_torus_primitives_reject_flux():
    with pytest.raises(NotExact):
        torus_primitives(FourierSpectrum.real({0: 1.0, 1: 0.3}))


def test_torus_primitives_real():
    prim = torus_primitives(FourierSpectrum.real({0: 0.4, 2: 0.5j, 3: 0.2}))
    z = np.linspace(0, 2 * math.pi, 17)
    for e in (prim.F, prim.G):
        vals = ex.evaluate_on(e, {"z": z}, z.shape)
        assert np.all(np.isfinite(vals)) and np.asarray(vals).dtype.kind == "f"


def test_integration_converges_on_grids():
    # Gauss in eta, trapezoid in the angles: exact for this band-limited integrand at 16
    e = "cos(2*eta)^2*cos(xi1-xi2)^2"
    vals = [integrate(e, make_grid(S3, n)) for n in (16, 32)]
    assert vals[0] == pytest.approx(vals[1], abs=1e-13)
