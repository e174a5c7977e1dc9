import pytest
from hypothesis import HealthCheck, settings

from helicity.manifolds import ManifoldId, make_grid

settings.register_profile(
    "numeric",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("numeric")


@pytest.fixture(scope="session")
def s3_grid():
    return make_grid(ManifoldId.SPHERE3, 48)


@pytest.fixture(scope="session")
def s3_coarse():
    return make_grid(ManifoldId.SPHERE3, 24)


@pytest.fixture(scope="session")
def s2_grid():
    return make_grid(ManifoldId.SPHERE2, (48, 48))


@pytest.fixture(scope="session")
def t3_grid():
    return make_grid(ManifoldId.TORUS3, 32)
