"""Integral identities on Sigma and the closed-form rigidity predictions."""
import numpy as np

from cone_capacity.components.cone_geometry import (
    ConeSpec,
    SigmaCurve,
    enclosed_volume,
    mean_curvature,
    mean_curvature_profile,
    sigma_area,
    sigma_integral,
)
from cone_capacity.components.p_energy_solver import (
    PotentialField,
    boundary_gradient_on_sigma,
    capacity_of,
)
from cone_capacity.models.reports import CurvatureMargin, DeviationSummary, IdentityRecord


def relative_mismatch(measured: float, predicted: float) -> float:
    return abs(measured - predicted) / max(abs(predicted), 1e-300)


def make_record(name: str, provenance: str, measured: float, predicted: float,
                tolerance=None) -> IdentityRecord:
    mismatch = relative_mismatch(measured, predicted)
    return IdentityRecord(
        name=name, provenance=provenance, measured=measured, predicted=predicted,
        relative_mismatch=mismatch, tolerance=tolerance,
        passed=tolerance is None or mismatch <= tolerance
    )


def surface_capacity_identity(field: PotentialField, capacity: float = None,
                              tolerance: float = None) -> IdentityRecord:
    """p Cap = int_Sigma |grad u|^(p-1)."""
    capacity = capacity_of(field) if capacity is None else capacity
    spline = boundary_gradient_on_sigma(field).interpolator()
    p = field.p
    measured = sigma_integral(field.mesh.curve, field.mesh.cone, lambda t: spline(t) ** (p - 1.0))
    return make_record('surface_capacity', 'flux identity: p Cap = int_Sigma |grad u|^(p-1)',
                       measured, p * capacity, tolerance)


def pohozaev_identity(field: PotentialField, capacity: float = None,
                      tolerance: float = None) -> IdentityRecord:
    """(p - 1) int_Sigma |grad u|^p <x, nu> = (n - p) p Cap."""
    capacity = capacity_of(field) if capacity is None else capacity
    spline = boundary_gradient_on_sigma(field).interpolator()
    curve, cone, p = field.mesh.curve, field.mesh.cone, field.p

    def density(t):
        g, dg, _ = curve.evaluate(t)
        # <x, nu> = g^2 / sqrt(g^2 + g'^2)
        return spline(t) ** p * g * g / np.sqrt(g * g + dg * dg)

    measured = (p - 1.0) * sigma_integral(curve, cone, density)
    return make_record('pohozaev', 'Rellich-Pohozaev identity on Sigma',
                       measured, (cone.n - p) * p * capacity, tolerance)


def overdetermined_constant(curve: SigmaCurve, cone: ConeSpec, p: float) -> float:
    """C = (n - p) / (n (p - 1)) P(Omega; C) / vol(Omega cap C)."""
    n = cone.n
    return (n - p) / (n * (p - 1.0)) * sigma_area(curve, cone) / enclosed_volume(curve, cone)


def rigidity_capacity_formula(curve: SigmaCurve, cone: ConeSpec, p: float) -> float:
    """Capacity forced by the overdetermined condition, from perimeter and volume."""
    n = cone.n
    kappa = (n - p) / (p - 1.0)
    area = sigma_area(curve, cone)
    volume = enclosed_volume(curve, cone)
    return kappa ** (p - 1.0) * area ** p / (n * volume) ** (p - 1.0) / p


def overdetermined_deviation(field: PotentialField) -> DeviationSummary:
    """Area-weighted mean and spread of |grad u| on Sigma."""
    curve, cone = field.mesh.curve, field.mesh.cone
    spline = boundary_gradient_on_sigma(field).interpolator()
    area = sigma_area(curve, cone)
    mean = sigma_integral(curve, cone, spline) / area
    variance = sigma_integral(curve, cone, lambda t: (spline(t) - mean) ** 2) / area
    std = float(np.sqrt(max(variance, 0.0)))
    return DeviationSummary(
        mean=mean,
        std=std,
        relative_std=std / mean,
        predicted_constant=overdetermined_constant(curve, cone, field.p),
        min_gradient=float(field.gradient_norm_at_qp().min())
    )


def curvature_bound_audit(curve: SigmaCurve, cone: ConeSpec, p: float, n_points: int = 0) -> CurvatureMargin:
    """H_Sigma - (n-1)(p-1)/(n-p) C along Sigma, plus the integrated form of the bound."""
    n = cone.n
    bound = (n - 1) * (p - 1.0) / (n - p) * overdetermined_constant(curve, cone, p)
    profile = mean_curvature_profile(curve, cone, n_points)
    margin = profile.H - bound

    inverse_integral = None
    if profile.H.min() > 0.0:
        inverse_integral = sigma_integral(curve, cone, lambda t: 1.0 / mean_curvature(curve, n, t)[0])
    return CurvatureMargin(
        theta=profile.theta.tolist(),
        margin=margin.tolist(),
        max_abs_margin=float(np.abs(margin).max()),
        inverse_curvature_integral=inverse_integral,
        volume_bound=n / (n - 1.0) * enclosed_volume(curve, cone)
    )
