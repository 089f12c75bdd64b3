import math

import pytest

from cone_capacity.components.cone_geometry import ConeSpec, SigmaCurve
from cone_capacity.components.identity_audit import IdentityAuditor
from cone_capacity.components.p_energy_solver import SolverConfig, truncation_study

HALF_SPACE = math.pi / 2
R_OUT = [8.0, 16.0, 32.0]


@pytest.fixture(scope="session")
def half_cone():
    return ConeSpec(n=3, half_angle=HALF_SPACE)


@pytest.fixture(scope="session")
def sector_cone():
    return ConeSpec(n=3, half_angle=math.pi / 3)


@pytest.fixture(scope="session")
def unit_cap():
    return SigmaCurve.sphere(1.0, HALF_SPACE)


@pytest.fixture(scope="session")
def perturbed_cap():
    """g = 1 + 0.2 cos(2 theta) on the half-space cone"""
    return SigmaCurve.cosine_series(1.0, [0.2], HALF_SPACE)


def _study(curve, cone, p, n_theta, n_rho):
    return truncation_study(curve, cone, SolverConfig(p=p), R_OUT, n_theta=n_theta, n_rho=n_rho)


@pytest.fixture(scope="session")
def sphere_study(unit_cap, half_cone):
    return _study(unit_cap, half_cone, 2.0, 8, 48)


@pytest.fixture(scope="session")
def sphere_study_p15(unit_cap, half_cone):
    return _study(unit_cap, half_cone, 1.5, 8, 48)


@pytest.fixture(scope="session")
def perturbed_study(perturbed_cap, half_cone):
    return _study(perturbed_cap, half_cone, 2.0, 32, 48)


@pytest.fixture(scope="session")
def sphere_audit(sphere_study):
    return IdentityAuditor().audit(sphere_study.outermost, sphere_study.capacity)


@pytest.fixture(scope="session")
def perturbed_audit(perturbed_study):
    return IdentityAuditor().audit(perturbed_study.outermost, perturbed_study.capacity)
