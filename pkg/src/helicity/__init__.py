"""Helicity of strictly contact fields and suspensions on model 3-manifolds.

Closed-form values are paired with direct quadrature of ``beta ^ d beta``
for explicit primitives, so each number can be checked two ways.
"""

from .calculus import FourierSpectrum, fourier_coeffs, integrate, integrate_values
from .conjugacy import (
    FurstenbergMap,
    TwistHomeo,
    conjugacy_check,
    furstenberg_example,
    kodaka_psi,
    lipschitz_lower_bounds,
    split_function,
)
from .contact import contact_form, contact_vector_field, reeb_field
from .core import (
    HelicityResult,
    Method,
    bounds_check,
    fiber_linking,
    filling_disc_average,
    helicity_contact,
    helicity_direct,
    helicity_direct_s3,
    helicity_limit,
    helicity_timedep,
    horizontal_lift_helicity,
    relative_helicity_contact,
)
from .errors import HelicityError
from .expr import parse
from .forms import KForm, ScalarField, VectorField
from .manifolds import ManifoldId, make_grid
from .suspension import IsotopySpec, calabi, double_suspension_helicity, suspension_helicity_direct
from .torus import TorusHamiltonian, torus_flux, torus_helicity_direct, torus_helicity_fourier

__version__ = "0.1.0"

__all__ = [
    "FourierSpectrum",
    "FurstenbergMap",
    "HelicityError",
    "HelicityResult",
    "IsotopySpec",
    "KForm",
    "ManifoldId",
    "Method",
    "ScalarField",
    "TorusHamiltonian",
    "TwistHomeo",
    "VectorField",
    "bounds_check",
    "calabi",
    "conjugacy_check",
    "contact_form",
    "contact_vector_field",
    "double_suspension_helicity",
    "fiber_linking",
    "filling_disc_average",
    "fourier_coeffs",
    "furstenberg_example",
    "helicity_contact",
    "helicity_direct",
    "helicity_direct_s3",
    "helicity_limit",
    "helicity_timedep",
    "horizontal_lift_helicity",
    "integrate",
    "integrate_values",
    "kodaka_psi",
    "lipschitz_lower_bounds",
    "make_grid",
    "parse",
    "reeb_field",
    "relative_helicity_contact",
    "split_function",
    "suspension_helicity_direct",
    "torus_flux",
    "torus_helicity_direct",
    "torus_helicity_fourier",
]
