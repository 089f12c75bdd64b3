"""P-function u^(-p(n-1)/(n-p)) |grad u|^p and its maximum principle."""
import logging

import numpy as np

from cone_capacity.components.cone_geometry import ConeSpec, cone_unit_ball_volume
from cone_capacity.components.p_energy_solver import (
    PotentialField,
    boundary_gradient_on_sigma,
    capacity_of,
)
from cone_capacity.core.errors import InvalidArgument, MaximumPrincipleViolation
from cone_capacity.models.reports import PFunctionSummary

from .identities import overdetermined_constant, rigidity_capacity_formula

logger = logging.getLogger('PFunction')


def p_exponent(n: int, p: float) -> float:
    return p * (n - 1) / (n - p)


def p_function_values(field: PotentialField) -> np.ndarray:
    """P at element centers."""
    mesh = field.mesh
    u = mesh.values_at_centers(field.u)
    grad = np.linalg.norm(mesh.gradient_at_centers(field.u), axis=-1)
    with np.errstate(divide='ignore', invalid='ignore'):
        return u ** -p_exponent(field.n, field.p) * grad ** field.p


def infinity_limit(capacity: float, cone: ConeSpec, p: float) -> float:
    """Limit of P along rays: (n omega / p)^(p/(n-p)) kappa^(p(n-1)/(n-p)) Cap^(-p/(n-p))."""
    n = cone.n
    kappa = (n - p) / (p - 1.0)
    omega = cone_unit_ball_volume(cone)
    return ((n * omega / p) ** (p / (n - p)) * kappa ** p_exponent(n, p)
            * capacity ** (-p / (n - p)))


def p_function_audit(field: PotentialField, cone: ConeSpec, capacity: float = None,
                     sigma_layers: int = 2, outer_layers: int = 2, slack: float = 0.02,
                     strict: bool = False) -> PFunctionSummary:
    """
    Compare the interior and wall maxima of P with its maximum on Sigma and its limit.

    Elements within `sigma_layers` of Sigma and `outer_layers` of the truncation
    boundary are left out of the interior maximum.
    """
    mesh = field.mesh
    capacity = capacity_of(field) if capacity is None else capacity
    if sigma_layers < 0 or outer_layers < 0:
        raise InvalidArgument("exclusion layer counts must be nonnegative")
    # at least one layer must stay in the interior maximum
    sigma_layers = min(sigma_layers, (mesh.n_rho - 1) // 2)
    outer_layers = min(outer_layers, mesh.n_rho - 1 - sigma_layers)
    values = p_function_values(field)
    layer = mesh.element_layer
    kept = (layer >= sigma_layers) & (layer < mesh.n_rho - outer_layers)
    interior_max = float(np.nanmax(values[kept]))

    wall_max = None
    if cone.has_wall:
        at_wall = kept & (mesh.element_sector == mesh.n_theta - 1)
        wall_max = float(np.nanmax(values[at_wall]))

    sigma_max = float(np.max(boundary_gradient_on_sigma(field).magnitude ** field.p))
    limit = infinity_limit(capacity, cone, field.p)
    ceiling = sigma_max * (1.0 + slack)

    location = 'sigma'
    if interior_max > sigma_max:
        location = 'wall' if wall_max is not None and wall_max >= interior_max else 'interior'
    passed = interior_max <= ceiling and limit <= ceiling and (wall_max is None or wall_max <= ceiling)

    summary = PFunctionSummary(
        interior_max=interior_max,
        sigma_max=sigma_max,
        wall_max=wall_max,
        infinity_limit=limit,
        max_location=location,
        overdetermined_value=overdetermined_constant(mesh.curve, cone, field.p) ** field.p,
        geometric_limit=infinity_limit(rigidity_capacity_formula(mesh.curve, cone, field.p), cone, field.p),
        slack=slack,
        passed=passed
    )
    if not passed:
        message = (f"P exceeds its Sigma maximum {sigma_max:.6g}: interior {interior_max:.6g}, "
                   f"wall {wall_max}, limit {limit:.6g}")
        logger.warning(message)
        if strict:
            raise MaximumPrincipleViolation(message, record=summary.model_dump())
    return summary
