import numpy as np
import pytest

from cone_capacity.components.meridian_mesh import BoundaryTag, build_mesh
from cone_capacity.components.p_energy_solver import energy_gradient_hessian, initial_guess


@pytest.fixture(scope="module")
def small_mesh(half_cone, perturbed_cap):
    return build_mesh(perturbed_cap, half_cone, 4.0, 6, 6)


@pytest.fixture(scope="module")
def rough_field(small_mesh):
    rng = np.random.default_rng(11)
    u = initial_guess(small_mesh)
    u[small_mesh.free_mask] += 0.1 * rng.normal(size=np.count_nonzero(small_mesh.free_mask))
    return u


def _shifted(mesh, u, direction, step):
    shifted = u.copy()
    shifted[mesh.free_mask] += step * direction
    return shifted


@pytest.mark.parametrize("p, eps", [(1.5, 1e-3), (2.0, 1e-6), (2.5, 1e-2)])
def test_gradient_matches_finite_differences(small_mesh, rough_field, p, eps):
    _, grad, _ = energy_gradient_hessian(small_mesh, rough_field, p, eps)
    rng = np.random.default_rng(5)
    step = 1e-6
    for _ in range(50):
        direction = rng.normal(size=grad.size)
        plus = energy_gradient_hessian(small_mesh, _shifted(small_mesh, rough_field, direction, step),
                                       p, eps, with_hessian=False).energy
        minus = energy_gradient_hessian(small_mesh, _shifted(small_mesh, rough_field, direction, -step),
                                        p, eps, with_hessian=False).energy
        fd = (plus - minus) / (2 * step)
        scale = np.linalg.norm(grad) * np.linalg.norm(direction)
        assert abs(fd - grad @ direction) <= 1e-5 * scale


def test_hessian_matches_gradient_differences(small_mesh, rough_field):
    p, eps = 1.5, 1e-2
    _, _, hess = energy_gradient_hessian(small_mesh, rough_field, p, eps)
    direction = np.random.default_rng(2).normal(size=hess.shape[0])
    step = 1e-6
    g_plus = energy_gradient_hessian(small_mesh, _shifted(small_mesh, rough_field, direction, step),
                                     p, eps, with_hessian=False).gradient
    g_minus = energy_gradient_hessian(small_mesh, _shifted(small_mesh, rough_field, direction, -step),
                                      p, eps, with_hessian=False).gradient
    expected = hess @ direction
    np.testing.assert_allclose((g_plus - g_minus) / (2 * step), expected,
                               atol=1e-5 * np.linalg.norm(expected))


@pytest.mark.parametrize("p", [1.2, 1.5, 2.0, 2.8])
def test_hessian_symmetric_positive_definite(half_cone, perturbed_cap, p):
    mesh = build_mesh(perturbed_cap, half_cone, 4.0, 4, 5)
    u = initial_guess(mesh)
    _, _, hess = energy_gradient_hessian(mesh, u, p, 1e-2)
    dense = hess.toarray()
    np.testing.assert_allclose(dense, dense.T, rtol=0, atol=1e-12 * np.abs(dense).max())
    assert np.linalg.eigvalsh(dense).min() > 0.0


def test_quadratic_energy_has_constant_hessian(small_mesh, rough_field):
    _, _, h1 = energy_gradient_hessian(small_mesh, rough_field, 2.0, 1e-3)
    _, _, h2 = energy_gradient_hessian(small_mesh, initial_guess(small_mesh), 2.0, 1e-3)
    assert abs(h1 - h2).max() <= 1e-12 * abs(h1).max()


def test_quadratic_energy_equals_bilinear_form(small_mesh):
    u = initial_guess(small_mesh)
    everything = np.ones(small_mesh.n_nodes, dtype=bool)
    energy, grad, stiffness = energy_gradient_hessian(small_mesh, u, 2.0, 0.0, free=everything)
    assert energy == pytest.approx(0.5 * u @ (stiffness @ u), rel=1e-12)
    np.testing.assert_allclose(grad, stiffness @ u, atol=1e-12 * np.abs(grad).max())


def test_constant_field_without_outer_constraint(small_mesh):
    p, eps = 1.5, 0.1
    u = np.ones(small_mesh.n_nodes)
    free = small_mesh.tags != BoundaryTag.SIGMA
    energy, grad, _ = energy_gradient_hessian(small_mesh, u, p, eps, free=free)
    assert energy == pytest.approx(eps ** p * small_mesh.total_measure() / p, rel=1e-12)
    np.testing.assert_allclose(grad, 0.0, atol=1e-12)


def test_threaded_assembly(small_mesh, rough_field):
    serial = energy_gradient_hessian(small_mesh, rough_field, 1.5, 1e-3)
    first = energy_gradient_hessian(small_mesh, rough_field, 1.5, 1e-3, threads=4, deterministic=True)
    second = energy_gradient_hessian(small_mesh, rough_field, 1.5, 1e-3, threads=4, deterministic=True)
    assert first.energy == second.energy
    np.testing.assert_array_equal(first.gradient, second.gradient)
    assert first.energy == pytest.approx(serial.energy, rel=1e-13)
    np.testing.assert_allclose(first.hessian.toarray(), serial.hessian.toarray(), rtol=1e-13, atol=1e-14)
