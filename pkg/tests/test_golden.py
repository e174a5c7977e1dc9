"""Regression against values frozen from their oracle runs (commands stored next to each value)."""

import json
import math
from pathlib import Path

import pytest

from helicity import conjugacy as C
from helicity import suspension as su
from helicity import torus as T

GOLDEN = json.loads((Path(__file__).parent / "golden.json").read_text())

FRESH = {
    "twist_helicity": lambda: su.suspension_helicity_direct(su.twist_spec()).value,
    "torus_cos2z": lambda: T.torus_helicity_fourier(T.TorusHamiltonian.real({2: 0.5})),
    "double_suspension_zero": lambda: su.double_suspension_helicity(su.ZERO_SPEC, su.ZERO_SPEC).termwise_value,
    "discrepancy_minimal_golden_1e5_k8": lambda: C.orbit_discrepancy(C.FurstenbergMap(C.GOLDEN, 1), (0.0, 0.0), 100_000, 8),
    "discrepancy_rotation_golden_1e5_k8": lambda: C.orbit_discrepancy(C.FurstenbergMap(C.GOLDEN, 0), (0.0, 0.0), 100_000, 8),
    "relaxed_c1_partial_sum_K12": lambda: C.furstenberg_example(12, "relaxed").c1_partial_sums[-1],
    "lipschitz_L20": lambda: C.lipschitz_lower_bounds(C.TwistHomeo.power(2.0), 20)[-1].L,
}


def test_every_golden_value_has_a_check():
    assert set(FRESH) == set(GOLDEN)


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_golden(name):
    entry = GOLDEN[name]
    assert FRESH[name]() == pytest.approx(entry["value"], rel=entry["rtol"])


def test_golden_cross_facts():
    assert GOLDEN["double_suspension_zero"]["value"] == pytest.approx(4 * math.pi**4, rel=1e-15)
    assert GOLDEN["torus_cos2z"]["value"] == pytest.approx(-T.kappa() * 13 / 6, rel=1e-8)
    assert GOLDEN["discrepancy_minimal_golden_1e5_k8"]["value"] < 0.02
    # the rotation orbit stays in one row of cells: 1/8 - 1/64 in the limit
    assert GOLDEN["discrepancy_rotation_golden_1e5_k8"]["value"] == pytest.approx(7 / 64, abs=1e-3)
