"""Far-field constant gamma of the exterior potential, u ~ gamma Gamma_p at infinity."""
import logging
from typing import Sequence, Tuple

import numpy as np

from cone_capacity.components.cone_geometry import ConeSpec, cone_unit_ball_volume
from cone_capacity.components.p_energy_solver import PotentialField
from cone_capacity.core.errors import FarFieldTooNoisy, InvalidArgument
from cone_capacity.models.reports import GammaEstimates

logger = logging.getLogger('FarField')

DEFAULT_SHELL = (0.4, 0.7)


def _shell_elements(field: PotentialField, shell: Sequence[float]) -> np.ndarray:
    lo, hi = shell
    if not (0.0 < lo < hi < 1.0):
        raise InvalidArgument(f"shell must satisfy 0 < lo < hi < 1, got {shell}")
    rho = field.mesh.center_rho
    mask = (rho >= lo * field.r_out) & (rho <= hi * field.r_out)
    if not mask.any():
        raise InvalidArgument("no elements in the far shell")
    return mask


def pointwise_gamma(field: PotentialField, shell: Sequence[float] = DEFAULT_SHELL) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Per-element gamma from the value and from the gradient, with element measures.

    A truncated field (outer_value 0) is modelled as
    u_R = gamma (Gamma_p - x) / (1 - gamma x), x = Gamma_p(r_out); a corrected
    field as gamma Gamma_p.
    """
    mesh = field.mesh
    kappa = (field.n - field.p) / (field.p - 1.0)
    mask = _shell_elements(field, shell)

    rho = mesh.center_rho[mask]
    u = mesh.values_at_centers(field.u)[mask]
    grad = np.linalg.norm(mesh.gradient_at_centers(field.u)[mask], axis=-1)
    a = rho ** -kappa
    grad_a = kappa * rho ** (-kappa - 1.0)
    x = field.r_out ** -kappa if field.outer_value == 0.0 else 0.0

    gamma_value = u / (a - x + u * x)
    gamma_grad = grad / (grad_a + x * grad)
    return gamma_value, gamma_grad, mesh.element_measure[mask]


def capacity_gamma(capacity: float, cone: ConeSpec, p: float) -> float:
    """gamma = (p Cap / (n omega))^(1/(p-1)) / kappa."""
    n = cone.n
    kappa = (n - p) / (p - 1.0)
    return (p * capacity / (n * cone_unit_ball_volume(cone))) ** (1.0 / (p - 1.0)) / kappa


def gamma_estimates(field: PotentialField, cap: float, cone: ConeSpec,
                    shell: Sequence[float] = DEFAULT_SHELL, noise_tol: float = 0.10,
                    spread_tol: float = None) -> GammaEstimates:
    """Three estimates of gamma: far-field values, far-field gradients and the capacity."""
    values, grads, weights = pointwise_gamma(field, shell)
    gamma_value = float(np.average(values, weights=weights))
    gamma_grad = float(np.average(grads, weights=weights))
    gamma_formula = capacity_gamma(cap, cone, field.p)

    noise = float((values.max() - values.min()) / gamma_value)
    if noise > noise_tol:
        raise FarFieldTooNoisy(
            f"u / Gamma_p varies by {noise:.1%} across the shell {list(shell)} (limit {noise_tol:.0%})"
        )

    estimates = [gamma_value, gamma_grad, gamma_formula]
    spread = (max(estimates) - min(estimates)) / min(estimates)
    logger.info(f"gamma: value {gamma_value:.6f}, gradient {gamma_grad:.6f}, "
                f"capacity {gamma_formula:.6f} (spread {spread:.2%})")
    return GammaEstimates(
        gamma_value=gamma_value,
        gamma_grad=gamma_grad,
        gamma_formula=gamma_formula,
        spread=spread,
        shell=list(shell),
        shell_noise=noise,
        tolerance=spread_tol,
        passed=spread_tol is None or spread <= spread_tol
    )


def far_field_correction(field: PotentialField, gamma: float) -> PotentialField:
    """
    m + (1 - m) u_R with m = gamma Gamma_p(r_out).

    Affine maps preserve p-harmonicity, so this matches the exterior
    potential up to the error of the far-field asymptotics.
    """
    if field.outer_value != 0.0:
        raise InvalidArgument("field is already corrected")
    kappa = (field.n - field.p) / (field.p - 1.0)
    m = gamma * field.r_out ** -kappa
    return field.with_values(m + (1.0 - m) * field.u, outer_value=m, gamma=gamma)
