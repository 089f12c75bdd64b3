"""Recovery of |grad u| on Sigma from a converged field."""
from typing import NamedTuple

import numpy as np
from scipy.interpolate import CubicSpline

from .solver import PotentialField


class SigmaGradient(NamedTuple):
    theta: np.ndarray
    magnitude: np.ndarray

    def interpolator(self) -> CubicSpline:
        """Clamped spline in theta; the profile is even about the axis and the wall."""
        return CubicSpline(self.theta, self.magnitude, bc_type='clamped')


def _one_sided_derivative(rho: np.ndarray, u: np.ndarray) -> np.ndarray:
    """d/drho at rho[:, 0] of the quadratic through the first three points of each row."""
    r0, r1, r2 = rho[:, 0], rho[:, 1], rho[:, 2]
    u0, u1, u2 = u[:, 0], u[:, 1], u[:, 2]
    return (u0 * (2 * r0 - r1 - r2) / ((r0 - r1) * (r0 - r2))
            + u1 * (r0 - r2) / ((r1 - r0) * (r1 - r2))
            + u2 * (r0 - r1) / ((r2 - r0) * (r2 - r1)))


def boundary_gradient_on_sigma(field: PotentialField) -> SigmaGradient:
    """
    |grad u| at the SIGMA nodes, ordered by theta.

    u is constant on Sigma, so the tangential derivative vanishes and the
    gradient is normal: u_rho = -|grad u| g / sqrt(g^2 + g'^2).
    """
    mesh = field.mesh
    rays = np.arange(mesh.n_theta + 1)
    nodes = mesh.node_index(rays[:, None], np.arange(3)[None, :])
    u_rho = _one_sided_derivative(mesh.rho[nodes], field.u[nodes])

    theta = mesh.ray_theta
    g, dg, _ = mesh.curve.evaluate(theta)
    magnitude = -u_rho * np.sqrt(g * g + dg * dg) / g
    return SigmaGradient(np.array(theta), magnitude)
