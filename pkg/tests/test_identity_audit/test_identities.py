import math

import numpy as np
import pytest

from cone_capacity.components.cone_geometry import (
    ConeSpec,
    SigmaCurve,
    heintze_karcher_deficit,
    isoperimetric_deficit,
)
from cone_capacity.components.identity_audit import (
    IdentityAuditor,
    curvature_bound_audit,
    far_field_correction,
    overdetermined_constant,
    pohozaev_identity,
    rigidity_capacity_formula,
    surface_capacity_identity,
)
from cone_capacity.components.meridian_mesh import build_mesh
from cone_capacity.components.p_energy_solver import PotentialField, SolverConfig, truncation_study
from cone_capacity.components.reference_solutions import model_capacity, radial_model


def _model_field(radius, cone, p, n_theta=4, n_rho=192):
    """Nodal interpolant of the exterior radial model on a cap of the given radius."""
    cap = SigmaCurve.sphere(radius, cone.theta_max)
    r_out = 8.0 * radius
    mesh = build_mesh(cap, cone, r_out, n_theta, n_rho)
    u = radial_model(mesh.rho, radius, cone.n, p)
    outer = float(radial_model(r_out, radius, cone.n, p))
    return PotentialField(mesh=mesh, u=u, p=p, eps_min=0.0, converged=True, outer_value=outer)


@pytest.mark.parametrize("radius, n, p, half_angle", [
    (1.0, 3, 2.0, math.pi / 2), (2.0, 3, 2.0, math.pi / 2), (1.0, 3, 1.5, math.pi / 2),
    (0.7, 4, 2.5, math.pi / 4), (1.3, 2, 1.5, math.pi / 2),
])
def test_overdetermined_constant_for_caps(radius, n, p, half_angle):
    cone = ConeSpec(n=n, half_angle=half_angle)
    cap = SigmaCurve.sphere(radius, half_angle)
    assert overdetermined_constant(cap, cone, p) == pytest.approx((n - p) / ((p - 1) * radius), rel=1e-12)


def test_overdetermined_constant_examples(unit_cap, half_cone):
    assert overdetermined_constant(unit_cap, half_cone, 2.0) == pytest.approx(1.0)
    assert overdetermined_constant(unit_cap, half_cone, 1.5) == pytest.approx(3.0)


@pytest.mark.parametrize("half_angle, expected", [(math.pi / 2, math.pi), (math.pi / 3, math.pi / 2)])
def test_rigidity_capacity_formula_for_caps(half_angle, expected):
    cone = ConeSpec(n=3, half_angle=half_angle)
    assert rigidity_capacity_formula(SigmaCurve.sphere(1.0, half_angle), cone, 2.0) == pytest.approx(expected)


@pytest.mark.parametrize("n, p, half_angle", [(3, 2.0, math.pi / 2), (3, 1.5, math.pi / 3), (4, 3.2, 1.0)])
def test_curvature_margin_vanishes_for_caps(n, p, half_angle):
    cone = ConeSpec(n=n, half_angle=half_angle)
    margin = curvature_bound_audit(SigmaCurve.sphere(1.7, half_angle), cone, p)
    assert margin.max_abs_margin <= 1e-8
    assert margin.inverse_curvature_integral == pytest.approx(margin.volume_bound, rel=1e-9)


def test_sphere_identities(sphere_audit):
    surface = sphere_audit.record('surface_capacity')
    assert surface.measured == pytest.approx(2 * math.pi, rel=0.02)
    assert surface.relative_mismatch <= 0.02
    pohozaev = sphere_audit.record('pohozaev')
    assert pohozaev.measured == pytest.approx(2 * math.pi, rel=0.02)
    assert pohozaev.relative_mismatch <= 0.02
    assert sphere_audit.record('capacity_formula').relative_mismatch <= 0.02
    assert sphere_audit.passed


def test_perturbed_identities(perturbed_audit):
    assert perturbed_audit.record('surface_capacity').relative_mismatch <= 0.03
    assert perturbed_audit.record('pohozaev').relative_mismatch <= 0.03


def test_p15_surface_identity(sphere_study_p15, half_cone):
    field = sphere_study_p15.outermost
    exterior = far_field_correction(field, 1.0)
    record = surface_capacity_identity(exterior, sphere_study_p15.capacity)
    assert record.predicted == pytest.approx(1.5 * model_capacity(1.0, half_cone, 1.5), rel=0.02)
    assert record.relative_mismatch <= 0.03
    assert pohozaev_identity(exterior, sphere_study_p15.capacity).relative_mismatch <= 0.03


def test_sphere_gamma(sphere_audit):
    gamma = sphere_audit.gamma
    for value in (gamma.gamma_value, gamma.gamma_grad, gamma.gamma_formula):
        assert value == pytest.approx(1.0, rel=0.03)
    assert gamma.spread <= 0.03
    assert sphere_audit.correction_gamma == gamma.gamma_value


def test_perturbed_gamma(perturbed_audit):
    gamma = perturbed_audit.gamma
    assert gamma.gamma_value == pytest.approx(gamma.gamma_formula, rel=0.03)
    assert gamma.spread <= 0.03


def test_gamma_scales_with_radius(half_cone):
    cap = SigmaCurve.sphere(2.0, half_cone.theta_max)
    study = truncation_study(cap, half_cone, SolverConfig(p=2.0), [16.0, 32.0, 64.0], n_theta=4, n_rho=48)
    report = IdentityAuditor().audit(study.outermost, study.capacity)
    assert report.gamma.gamma_value == pytest.approx(2.0, rel=0.03)
    pohozaev = report.record('pohozaev')
    assert pohozaev.predicted == pytest.approx(2.0 * model_capacity(2.0, half_cone, 2.0), rel=0.02)
    assert pohozaev.relative_mismatch <= 0.02
    assert report.deviation.mean == pytest.approx(0.5, rel=0.02)


def test_sphere_deviation(sphere_audit):
    deviation = sphere_audit.deviation
    assert deviation.mean == pytest.approx(1.0, rel=0.02)
    assert deviation.predicted_constant == pytest.approx(1.0)
    assert deviation.relative_std <= 0.02
    assert sphere_audit.record('overdetermined_constant').relative_mismatch <= 0.02


def test_no_critical_points(sphere_audit, perturbed_audit):
    assert sphere_audit.deviation.min_gradient > 0.0
    assert perturbed_audit.deviation.min_gradient > 0.0


def test_rigidity_chain(sphere_audit, perturbed_audit, unit_cap, perturbed_cap, half_cone):
    assert abs(isoperimetric_deficit(unit_cap, half_cone)) <= 1e-8
    assert abs(heintze_karcher_deficit(unit_cap, half_cone)) <= 1e-8
    assert sphere_audit.deviation.relative_std <= 0.02
    assert sphere_audit.curvature.max_abs_margin <= 1e-8
    assert sphere_audit.record('capacity_formula').relative_mismatch <= 0.02

    assert isoperimetric_deficit(perturbed_cap, half_cone) > 0.0
    assert heintze_karcher_deficit(perturbed_cap, half_cone) > 0.0
    assert perturbed_audit.deviation.relative_std >= 0.05
    assert perturbed_audit.curvature.max_abs_margin > 0.01
    formula = perturbed_audit.record('capacity_formula')
    assert formula.predicted > formula.measured


def test_sandwich_bound(perturbed_study, perturbed_audit, perturbed_cap):
    exterior = far_field_correction(perturbed_study.outermost, perturbed_audit.correction_gamma)
    mesh = exterior.mesh
    r1, r2 = perturbed_cap.min_radius, perturbed_cap.max_radius
    far = mesh.rho >= r2
    ratio = exterior.u[far] * mesh.rho[far]      # u / Gamma_p with kappa = 1
    assert ratio.min() >= r1 * 0.98
    assert ratio.max() <= r2 * 1.02


def _refined_audits(curve, cone, levels=((16, 24), (32, 48), (64, 96))):
    reports = []
    for n_theta, n_rho in levels:
        study = truncation_study(curve, cone, SolverConfig(p=2.0), [8.0, 16.0, 32.0],
                                 n_theta=n_theta, n_rho=n_rho)
        reports.append(IdentityAuditor().audit(study.outermost, study.capacity))
    return reports


@pytest.mark.slow
@pytest.mark.parametrize("geometry", ["sphere", "perturbed"])
def test_identities_converge_under_refinement(geometry, unit_cap, perturbed_cap, half_cone):
    curve = unit_cap if geometry == "sphere" else perturbed_cap
    reports = _refined_audits(curve, half_cone)
    for name in ('surface_capacity', 'pohozaev'):
        values = [report.record(name).relative_mismatch for report in reports]
        assert values[0] <= 0.03
        assert math.log2(values[0] / values[2]) / 2 >= 1.0

    deviations = [report.deviation.relative_std for report in reports]
    if geometry == "perturbed":
        assert min(deviations) >= 0.05
        assert abs(deviations[-1] - deviations[-2]) <= 0.2 * deviations[-1]


def test_sphere_deviation_halves_under_refinement(sphere_audit, unit_cap, half_cone):
    study = truncation_study(unit_cap, half_cone, SolverConfig(p=2.0), [8.0, 16.0, 32.0],
                             n_theta=16, n_rho=96)
    refined = IdentityAuditor().audit(study.outermost, study.capacity)
    base = sphere_audit.deviation.relative_std
    assert base <= 0.02
    # the discrete sphere solution is radial, so both can sit at roundoff
    assert refined.deviation.relative_std <= max(0.5 * base, 1e-8)
    assert refined.deviation.mean == pytest.approx(1.0, rel=0.01)


@pytest.mark.parametrize("p", [1.5, 2.0])
@pytest.mark.parametrize("radius", [1.0, 2.0, 3.0])
def test_identities_on_model_potential(half_cone, radius, p):
    field = _model_field(radius, half_cone, p)
    capacity = model_capacity(radius, half_cone, p)
    pohozaev = pohozaev_identity(field, capacity)
    assert pohozaev.predicted == pytest.approx((3 - p) * p * capacity)
    assert pohozaev.relative_mismatch <= 5e-3
    assert surface_capacity_identity(field, capacity).relative_mismatch <= 5e-3
