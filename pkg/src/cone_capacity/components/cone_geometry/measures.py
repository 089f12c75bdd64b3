"""
Exact-quadrature measures of Sigma and Omega cap C.

Every integral is a one-dimensional integral in the meridian angle evaluated
with adaptive Gauss-Kronrod quadrature at relative tolerance 1e-12, so that
geometric error stays far below the discretization error of the PDE solve.
"""
import math
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate

from cone_capacity.core.config.defaults import ORTHOGONALITY_THRESHOLD, QUAD_EPSREL, QUAD_LIMIT
from cone_capacity.core.errors import (
    DegenerateCurve,
    InadmissibleCurve,
    InvalidArgument,
    NonPositiveCurvature,
)

from .cone import ConeSpec, cone_unit_ball_volume
from .curve import SigmaCurve

# below this |sin(theta)| the rotational curvature uses its axis limit
AXIS_EPS = 1e-8


class CurvatureProfile(NamedTuple):
    theta: np.ndarray
    H: np.ndarray


class OrthogonalityResidual(NamedTuple):
    wall: float
    axis: float


def _quad(func: Callable[[float], float], a: float, b: float) -> float:
    value, _ = integrate.quad(func, a, b, epsabs=0.0, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT)
    return float(value)


def _check_pair(curve: SigmaCurve, cone: ConeSpec) -> None:
    if abs(curve.theta_max - cone.theta_max) > 1e-12:
        raise InvalidArgument(
            f"curve spans [0, {curve.theta_max}] but the cone needs [0, {cone.theta_max}]"
        )


def sigma_integral(curve: SigmaCurve, cone: ConeSpec, density: Callable[[float], float]) -> float:
    """c_n int_0^alpha f(theta) (g sin theta)^(n-2) sqrt(g^2 + g'^2) dtheta."""
    _check_pair(curve, cone)
    n = cone.n

    def integrand(t):
        g, dg, _ = curve.evaluate(t)
        return float(density(t) * (g * math.sin(t)) ** (n - 2) * math.sqrt(g * g + dg * dg))

    return cone.solid_angle_factor * _quad(integrand, 0.0, curve.theta_max)


def sigma_area(curve: SigmaCurve, cone: ConeSpec) -> float:
    """Relative perimeter P(Omega; C) = H^(n-1)(Sigma)."""
    return sigma_integral(curve, cone, lambda t: 1.0)


def enclosed_volume(curve: SigmaCurve, cone: ConeSpec) -> float:
    """H^n(Omega cap C) = (c_n / n) int g^n sin^(n-2)."""
    _check_pair(curve, cone)
    n = cone.n

    def integrand(t):
        return float(curve.g(t) ** n * math.sin(t) ** (n - 2))

    return cone.solid_angle_factor / n * _quad(integrand, 0.0, curve.theta_max)


def mean_curvature(curve: SigmaCurve, n: int, theta) -> np.ndarray:
    """
    H = k_merid + (n - 2) k_rot with respect to the normal pointing away from Omega.

    k_rot = <nu, e_cyl> / (g sin theta); on the axis the symmetric limit
    k_rot -> k_merid is used.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    g, dg, d2g = curve.evaluate(theta)
    speed2 = g * g + dg * dg
    if np.any(speed2 <= 1e-300):
        raise DegenerateCurve("g^2 + g'^2 vanishes, the meridian curve has no tangent")

    speed = np.sqrt(speed2)
    k_merid = (g * g + 2.0 * dg * dg - g * d2g) / speed ** 3

    sin_t = np.sin(theta)
    on_axis = np.abs(sin_t) < AXIS_EPS
    safe_sin = np.where(on_axis, 1.0, sin_t)
    k_rot = (g * sin_t - dg * np.cos(theta)) / (speed * g * safe_sin)
    k_rot = np.where(on_axis, k_merid, k_rot)
    return k_merid + (n - 2) * k_rot


def mean_curvature_profile(curve: SigmaCurve, cone: ConeSpec, n_points: int = 0) -> CurvatureProfile:
    """H_Sigma on the curve's sample grid (or a uniform grid of n_points)."""
    _check_pair(curve, cone)
    theta = curve.theta_samples if n_points <= 0 else np.linspace(0.0, curve.theta_max, n_points)
    return CurvatureProfile(theta=theta, H=mean_curvature(curve, cone.n, theta))


def orthogonality_residual(curve: SigmaCurve) -> OrthogonalityResidual:
    """|g'| where Sigma meets the cone wall, and on the axis."""
    dg = curve.dg(np.array([curve.theta_max, 0.0]))
    return OrthogonalityResidual(wall=float(abs(dg[0])), axis=float(abs(dg[1])))


def check_admissible(curve: SigmaCurve, threshold: float = ORTHOGONALITY_THRESHOLD) -> OrthogonalityResidual:
    residual = orthogonality_residual(curve)
    if residual.wall > threshold:
        raise InadmissibleCurve(
            f"Sigma does not meet the cone wall orthogonally: |g'(alpha)| = {residual.wall:.3e} > {threshold:g}"
        )
    if residual.axis > threshold:
        raise InadmissibleCurve(
            f"Sigma is not smooth across the axis: |g'(0)| = {residual.axis:.3e} > {threshold:g}"
        )
    return residual


def isoperimetric_deficit(curve: SigmaCurve, cone: ConeSpec) -> float:
    """P / vol^((n-1)/n) - n (omega_n^C)^(1/n); zero exactly for vertex-centered caps."""
    n = cone.n
    area = sigma_area(curve, cone)
    volume = enclosed_volume(curve, cone)
    return area / volume ** ((n - 1) / n) - n * cone_unit_ball_volume(cone) ** (1.0 / n)


def heintze_karcher_deficit(curve: SigmaCurve, cone: ConeSpec) -> float:
    """int_Sigma (n-1)/H - n vol(Omega cap C); needs H > 0."""
    n = cone.n
    sampled = mean_curvature(curve, n, np.linspace(0.0, curve.theta_max, 4097))
    if sampled.min() <= 0.0:
        raise NonPositiveCurvature(
            f"min H_Sigma = {sampled.min():.6g} <= 0, the Heintze-Karcher inequality does not apply"
        )

    def density(t):
        return (n - 1) / mean_curvature(curve, n, t)[0]

    return sigma_integral(curve, cone, density) - n * enclosed_volume(curve, cone)
