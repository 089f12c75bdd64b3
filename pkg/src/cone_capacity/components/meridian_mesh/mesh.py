"""
Structured meridian meshes of the truncated exterior section.

Nodes live on rays theta_j and are spaced in the radial direction between
g(theta_j) and r_out. Elements are bilinear quadrilaterals in the
computational plane (t, theta) with t = log(rho); the map to physical space
is the exact polar transform, so only the Sigma side is approximated
(piecewise linearly in log(g)).
"""
import logging
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Literal, NamedTuple, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from cone_capacity.components.cone_geometry import ConeSpec, SigmaCurve
from cone_capacity.core.errors import InvalidArgument, InvalidTruncation

logger = logging.getLogger('MeridianMesh')

# r_out must exceed max g by this factor
MIN_TRUNCATION_RATIO = 1.5


class BoundaryTag(IntEnum):
    INTERIOR = 0
    SIGMA = 1
    OUTER = 2
    WALL = 3
    AXIS = 4


class Grading(BaseModel):
    """Radial node placement along each ray."""
    model_config = ConfigDict(frozen=True)

    kind: Literal['geometric', 'uniform'] = 'geometric'

    def fractions_to_radii(self, inner: np.ndarray, outer: float, s: np.ndarray) -> np.ndarray:
        inner = inner[:, None]
        if self.kind == 'geometric':
            return inner * (outer / inner) ** s[None, :]
        return inner + (outer - inner) * s[None, :]


@dataclass(frozen=True)
class MeridianMesh:
    curve: SigmaCurve
    cone: ConeSpec
    r_out: float
    n_theta: int
    n_rho: int
    grading: Grading
    quad_order: int
    rho: np.ndarray
    theta: np.ndarray
    tags: np.ndarray
    elements: np.ndarray
    qp_shape: np.ndarray
    qp_grad: np.ndarray
    qp_weight: np.ndarray
    qp_rho: np.ndarray
    qp_theta: np.ndarray
    det_jacobian: np.ndarray
    center_grad: np.ndarray
    center_rho: np.ndarray
    center_theta: np.ndarray
    summary: dict = field(default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return self.rho.size

    @property
    def n_elements(self) -> int:
        return self.elements.shape[0]

    def node_index(self, j, i):
        """Node on ray j (theta index) at radial position i."""
        return np.asarray(j) * (self.n_rho + 1) + np.asarray(i)

    def ray_nodes(self, j: int) -> np.ndarray:
        return self.node_index(j, np.arange(self.n_rho + 1))

    @property
    def sigma_nodes(self) -> np.ndarray:
        """SIGMA nodes ordered by theta."""
        return self.node_index(np.arange(self.n_theta + 1), 0)

    @property
    def ray_theta(self) -> np.ndarray:
        return self.theta[self.sigma_nodes]

    @property
    def element_layer(self) -> np.ndarray:
        """Radial element index i (0 touches Sigma)."""
        return np.arange(self.n_elements) % self.n_rho

    @property
    def element_sector(self) -> np.ndarray:
        """Angular element index j (0 touches the axis)."""
        return np.arange(self.n_elements) // self.n_rho

    @property
    def dirichlet_mask(self) -> np.ndarray:
        return (self.tags == BoundaryTag.SIGMA) | (self.tags == BoundaryTag.OUTER)

    @property
    def free_mask(self) -> np.ndarray:
        return ~self.dirichlet_mask

    def dirichlet_values(self, outer_value: float = 0.0) -> np.ndarray:
        """Nodal vector with u = 1 on SIGMA, outer_value on OUTER, 0 elsewhere."""
        u = np.zeros(self.n_nodes)
        u[self.tags == BoundaryTag.SIGMA] = 1.0
        u[self.tags == BoundaryTag.OUTER] = outer_value
        return u

    def interpolate_to_qp(self, nodal: np.ndarray) -> np.ndarray:
        return np.einsum('qa,ea->eq', self.qp_shape, nodal[self.elements])

    def gradient_at_qp(self, nodal: np.ndarray) -> np.ndarray:
        """(radial, angular) components of grad u at quadrature points."""
        return np.einsum('eqad,ea->eqd', self.qp_grad, nodal[self.elements])

    def values_at_centers(self, nodal: np.ndarray) -> np.ndarray:
        return nodal[self.elements].mean(axis=1)

    def gradient_at_centers(self, nodal: np.ndarray) -> np.ndarray:
        """Element-center gradients, second-order accurate on the structured grid."""
        return np.einsum('ead,ea->ed', self.center_grad, nodal[self.elements])

    @property
    def element_measure(self) -> np.ndarray:
        return self.qp_weight.sum(axis=1)

    def total_measure(self) -> float:
        return float(self.qp_weight.sum())

    def describe(self) -> dict:
        return {
            'n_theta': self.n_theta,
            'n_rho': self.n_rho,
            'r_out': self.r_out,
            'grading': self.grading.kind,
            'quad_order': self.quad_order,
            'nodes': self.n_nodes,
            'elements': self.n_elements
        }

    def to_csv(self, directory) -> None:
        """Dump node and element lists for debugging."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        pd.DataFrame({
            'rho': self.rho,
            'theta': self.theta,
            'z': self.rho * np.cos(self.theta),
            'r': self.rho * np.sin(self.theta),
            'tag': [BoundaryTag(t).name for t in self.tags]
        }).to_csv(directory / 'mesh_nodes.csv', index_label='node', lineterminator="\r\n")
        pd.DataFrame(self.elements, columns=['n0', 'n1', 'n2', 'n3']).to_csv(
            directory / 'mesh_elements.csv', index_label='element', lineterminator="\r\n")


_ARRAY_FIELDS = ('rho', 'theta', 'tags', 'elements', 'qp_grad', 'qp_weight', 'qp_rho', 'qp_theta',
                 'det_jacobian', 'center_grad', 'center_rho', 'center_theta')

# reference square corners in element order: (xi, eta) with xi radial, eta angular
_CORNERS = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])


def _reference_rule(order: int):
    """Tensor Gauss rule on [-1, 1]^2 with bilinear shapes and their derivatives."""
    x, w = np.polynomial.legendre.leggauss(order)
    xi, eta = [a.ravel() for a in np.meshgrid(x, x, indexing='ij')]
    weights = np.outer(w, w).ravel()

    shape = 0.25 * (1 + np.outer(xi, _CORNERS[:, 0])) * (1 + np.outer(eta, _CORNERS[:, 1]))
    d_xi = 0.25 * _CORNERS[None, :, 0] * (1 + np.outer(eta, _CORNERS[:, 1]))
    d_eta = 0.25 * _CORNERS[None, :, 1] * (1 + np.outer(xi, _CORNERS[:, 0]))
    return shape, np.stack([d_xi, d_eta], axis=-1), weights


class _Operators(NamedTuple):
    shape: np.ndarray
    grad: np.ndarray
    weight: np.ndarray
    rho: np.ndarray
    theta: np.ndarray
    det: np.ndarray


def _element_operators(coords: np.ndarray, cone: ConeSpec, order: int) -> _Operators:
    """Physical shape gradients and weighted quadrature for computational coords (t, theta)."""
    shape, d_ref, ref_weights = _reference_rule(order)
    jac = np.einsum('eac,qar->eqcr', coords, d_ref)                          # dX_c / dxi_r
    det = jac[..., 0, 0] * jac[..., 1, 1] - jac[..., 0, 1] * jac[..., 1, 0]
    if det.min() <= 0.0:
        raise InvalidArgument("mesh has an element with nonpositive Jacobian")

    inv = np.empty_like(jac)
    inv[..., 0, 0] = jac[..., 1, 1] / det
    inv[..., 1, 1] = jac[..., 0, 0] / det
    inv[..., 0, 1] = -jac[..., 0, 1] / det
    inv[..., 1, 0] = -jac[..., 1, 0] / det
    d_comp = np.einsum('eqrc,qar->eqac', inv, d_ref)                        # dN / d(t, theta)

    qp_coords = np.einsum('qa,eac->eqc', shape, coords)
    qp_rho = np.exp(qp_coords[..., 0])
    qp_theta = qp_coords[..., 1]

    # grad u = (u_t, u_theta) / rho in the (e_rho, e_theta) frame
    grad = d_comp / qp_rho[..., None, None]
    weight = (cone.solid_angle_factor * qp_rho ** cone.n * np.sin(qp_theta) ** (cone.n - 2)
              * det * ref_weights[None, :])
    return _Operators(shape, grad, weight, qp_rho, qp_theta, det)


def _tag_nodes(n_theta: int, n_rho: int, full_space: bool) -> np.ndarray:
    tags = np.full((n_theta + 1, n_rho + 1), BoundaryTag.INTERIOR, dtype=np.int8)
    tags[0, :] = BoundaryTag.AXIS
    tags[-1, :] = BoundaryTag.AXIS if full_space else BoundaryTag.WALL
    # Dirichlet sides win at corners
    tags[:, 0] = BoundaryTag.SIGMA
    tags[:, -1] = BoundaryTag.OUTER
    return tags.ravel()


def build_mesh(curve: SigmaCurve, cone: ConeSpec, r_out: float, n_theta: int, n_rho: int,
               grading: Optional[Grading] = None, quad_order: int = 2) -> MeridianMesh:
    """Transfinite tagged mesh of {g(theta) <= rho <= r_out, 0 <= theta <= theta_max}."""
    if n_theta < 4 or n_rho < 4:
        raise InvalidArgument(f"n_theta and n_rho must be >= 4, got {n_theta} x {n_rho}")
    if quad_order < 1:
        raise InvalidArgument(f"quad_order must be positive, got {quad_order}")
    if abs(curve.theta_max - cone.theta_max) > 1e-12:
        raise InvalidArgument("curve and cone disagree on the meridian angle range")
    if r_out <= MIN_TRUNCATION_RATIO * curve.max_radius:
        raise InvalidTruncation(
            f"r_out = {r_out} must exceed {MIN_TRUNCATION_RATIO} x max g = "
            f"{MIN_TRUNCATION_RATIO * curve.max_radius:.6g}"
        )
    grading = grading or Grading()

    theta_rays = np.linspace(0.0, cone.theta_max, n_theta + 1)
    fractions = np.linspace(0.0, 1.0, n_rho + 1)
    radii = grading.fractions_to_radii(curve.g(theta_rays), float(r_out), fractions)
    radii[:, -1] = r_out

    rho = radii.ravel()
    theta = np.repeat(theta_rays, n_rho + 1)
    tags = _tag_nodes(n_theta, n_rho, cone.full_space)

    j, i = [a.ravel() for a in np.meshgrid(np.arange(n_theta), np.arange(n_rho), indexing='ij')]
    k0 = j * (n_rho + 1) + i
    elements = np.stack([k0, k0 + 1, k0 + n_rho + 2, k0 + n_rho + 1], axis=1)

    coords = np.stack([np.log(rho), theta], axis=-1)[elements]              # (e, a, c)
    ops = _element_operators(coords, cone, quad_order)
    centers = _element_operators(coords, cone, 1)

    mesh = MeridianMesh(
        curve=curve, cone=cone, r_out=float(r_out), n_theta=n_theta, n_rho=n_rho,
        grading=grading, quad_order=quad_order, rho=rho, theta=theta, tags=tags,
        elements=elements, qp_shape=ops.shape, qp_grad=ops.grad, qp_weight=ops.weight,
        qp_rho=ops.rho, qp_theta=ops.theta, det_jacobian=ops.det,
        center_grad=centers.grad[:, 0], center_rho=centers.rho[:, 0],
        center_theta=centers.theta[:, 0]
    )
    for name in _ARRAY_FIELDS:
        getattr(mesh, name).setflags(write=False)
    mesh.summary.update(mesh.describe())
    logger.debug(f"Built mesh {n_theta}x{n_rho} ({mesh.n_nodes} nodes), r_out={r_out}")
    return mesh


def refine(mesh: MeridianMesh) -> MeridianMesh:
    """Uniform 2x refinement in both directions; new Sigma nodes lie on the true curve."""
    return build_mesh(mesh.curve, mesh.cone, mesh.r_out, 2 * mesh.n_theta, 2 * mesh.n_rho,
                      mesh.grading, mesh.quad_order)


def quadrature_integral(mesh: MeridianMesh, integrand) -> float:
    """
    Weighted integral over the truncated exterior section.

    The integrand is a nodal vector (interpolated bilinearly), a callable
    f(rho, theta) evaluated at quadrature points, or a scalar constant.
    """
    if callable(integrand):
        values = np.asarray(integrand(mesh.qp_rho, mesh.qp_theta), dtype=float)
        values = np.broadcast_to(values, mesh.qp_weight.shape)
    elif np.ndim(integrand) == 0:
        values = np.full(mesh.qp_weight.shape, float(integrand))
    else:
        nodal = np.asarray(integrand, dtype=float)
        if nodal.shape != (mesh.n_nodes,):
            raise InvalidArgument(f"nodal integrand needs {mesh.n_nodes} values, got {nodal.shape}")
        values = mesh.interpolate_to_qp(nodal)
    return float(np.sum(mesh.qp_weight * values))


def annulus_measure(cone: ConeSpec, inner: float, outer: float) -> float:
    """Measure of C cap (B_outer minus B_inner); reference for sphere meshes."""
    from cone_capacity.components.cone_geometry import cone_unit_ball_volume
    return cone_unit_ball_volume(cone) * (outer ** cone.n - inner ** cone.n)
