import math

import numpy as np
import pytest

from cone_capacity.components.cone_geometry import ConeSpec, SigmaCurve
from cone_capacity.components.meridian_mesh import build_mesh, refine
from cone_capacity.components.p_energy_solver import energy_gradient_hessian
from cone_capacity.components.reference_solutions import (
    fundamental_solution,
    model_boundary_gradient,
    model_capacity,
    model_gamma,
    model_table,
    radial_model,
    truncated_radial_solution,
)
from cone_capacity.core.errors import InvalidArgument


@pytest.mark.parametrize("n, p, x, expected", [(3, 2.0, 2.0, 0.5), (4, 2.0, 2.0, 0.25), (3, 1.5, 2.0, 0.125)])
def test_fundamental_solution_values(n, p, x, expected):
    value, derivative = fundamental_solution(x, n, p)
    assert value == pytest.approx(expected)
    kappa = (n - p) / (p - 1)
    assert derivative == pytest.approx(-kappa * expected / x)


@pytest.mark.parametrize("n, p", [(2, 1.5), (3, 2.0), (5, 4.2)])
def test_fundamental_solution_at_unit_radius(n, p):
    assert fundamental_solution(1.0, n, p)[0] == 1.0


def test_fundamental_solution_domain():
    with pytest.raises(InvalidArgument):
        fundamental_solution(0.0, 3, 2.0)
    with pytest.raises(InvalidArgument):
        fundamental_solution(1.0, 3, 3.0)


def test_radial_model():
    x = np.geomspace(1.0, 50.0, 7)
    np.testing.assert_allclose(radial_model(x, 1.0, 3, 2.0), fundamental_solution(x, 3, 2.0)[0])
    assert radial_model(4.0, 2.0, 3, 2.0) == pytest.approx(0.5)
    assert model_boundary_gradient(1.0, 3, 2.0) == pytest.approx(1.0)
    assert model_gamma(2.0, 3, 2.0) == pytest.approx(2.0)
    with pytest.raises(InvalidArgument):
        radial_model(0.5, 1.0, 3, 2.0)


def test_truncated_profile():
    exact = truncated_radial_solution(1.0, 2.0, 3, 2.0)
    assert exact.profile(math.sqrt(2.0)) == pytest.approx(math.sqrt(2.0) - 1.0, rel=1e-14)
    assert exact.profile(1.0) == pytest.approx(1.0)
    assert exact.profile(2.0) == pytest.approx(0.0, abs=1e-15)


def test_truncated_profile_approaches_model():
    rho = np.geomspace(1.0, 10.0, 9)
    far = truncated_radial_solution(1.0, 1e9, 3, 2.0)
    np.testing.assert_allclose(far.profile(rho), radial_model(rho, 1.0, 3, 2.0), rtol=1e-8)


def test_truncated_flux_is_constant():
    exact = truncated_radial_solution(1.0, 20.0, 3, 1.5)
    rho = np.geomspace(1.0, 20.0, 11)
    du = exact.derivative(rho)
    flux = rho ** 2 * np.abs(du) ** (1.5 - 2) * du
    np.testing.assert_allclose(flux, flux[0], rtol=1e-12)


@pytest.mark.parametrize("p", [1.5, 2.0, 2.5])
@pytest.mark.parametrize("r_out", [4.0, 16.0, 256.0])
def test_truncated_capacity_exceeds_exterior(p, r_out):
    cone = ConeSpec(n=3)
    assert truncated_radial_solution(1.0, r_out, 3, p).capacity(cone) > model_capacity(1.0, cone, p)


@pytest.mark.parametrize("half_angle, expected", [(math.pi / 2, math.pi), (math.pi / 3, math.pi / 2)])
def test_model_capacity(half_angle, expected):
    assert model_capacity(1.0, ConeSpec(n=3, half_angle=half_angle), 2.0) == pytest.approx(expected)


def test_model_capacity_p15():
    assert model_capacity(1.0, ConeSpec(n=3), 1.5) == pytest.approx(4 * math.sqrt(3) * math.pi / 3)


def test_model_gradient_is_tangent_to_every_wall():
    """grad of a radial profile has no theta component, so the wall flux is zero exactly."""
    cone = ConeSpec(n=3, half_angle=math.pi / 3)
    mesh = build_mesh(SigmaCurve.sphere(1.0, cone.theta_max), cone, 8.0, 6, 12)
    grad = mesh.gradient_at_qp(radial_model(mesh.rho, 1.0, 3, 2.0))
    assert np.abs(grad[..., 1]).max() <= 1e-13


def test_discrete_energy_of_truncated_profile_converges():
    cone = ConeSpec(n=3)
    exact = truncated_radial_solution(1.0, 8.0, 3, 1.5)
    mesh = build_mesh(SigmaCurve.sphere(1.0, cone.theta_max), cone, 8.0, 4, 24, quad_order=3)
    errors = []
    for _ in range(3):
        energy = energy_gradient_hessian(mesh, exact.profile(mesh.rho), 1.5, 0.0, with_hessian=False).energy
        errors.append(abs(energy - exact.capacity(cone)))
        mesh = refine(mesh)
    orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert orders.min() >= 1.9


def test_model_table_columns():
    columns, constants = model_table(1.0, ConeSpec(n=3), 2.0, 16.0, n_points=5)
    assert columns['rho'][0] == 1.0 and columns['rho'][-1] == pytest.approx(16.0)
    np.testing.assert_allclose(columns['model'], columns['fundamental'])
    assert columns['truncated'][-1] == pytest.approx(0.0, abs=1e-15)
    assert constants['capacity'] == pytest.approx(math.pi)
    assert constants['truncated_capacity'] > constants['capacity']
