"""Pipeline orchestration: geometry checks, truncation study, audit and reporting."""
import logging
import math
import time
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd

from cone_capacity.components.cone_geometry import (
    SigmaCurve,
    check_admissible,
    enclosed_volume,
    heintze_karcher_deficit,
    isoperimetric_deficit,
    mean_curvature_profile,
    sigma_area,
)
from cone_capacity.components.identity_audit import IdentityAuditor, far_field_correction
from cone_capacity.components.p_energy_solver import TruncationStudy, truncation_study
from cone_capacity.components.reference_solutions import model_capacity, model_table
from cone_capacity.core.errors import ConfigError, NonPositiveCurvature
from cone_capacity.core.tracking import RunTracker
from cone_capacity.models.config import ScenarioConfig
from cone_capacity.models.reports import GeometryReport, ScenarioReport
from cone_capacity.storage import ReportStorage

EXIT_OK = 0
EXIT_AUDIT_FAILURE = 4


class ScenarioOrchestrator:
    """Coordinate one scenario across components."""

    def __init__(self, config: ScenarioConfig, output_dir, base_dir: Optional[Path] = None,
                 tracker: Optional[RunTracker] = None):
        self.config = config
        self.storage = ReportStorage(output_dir)
        self.base_dir = base_dir
        self.tracker = tracker
        self.timing: Dict = {}
        self.logger = logging.getLogger('ScenarioOrchestrator')

    # -- stages -----------------------------------------------------------

    def _scenario_summary(self) -> Dict:
        return self.config.model_dump(mode='json', exclude={'output'})

    def _curve(self) -> SigmaCurve:
        curve = self.config.build_curve(self.base_dir)
        check_admissible(curve)
        return curve

    def geometry_report(self, curve: SigmaCurve) -> GeometryReport:
        cone = self.config.cone
        residual = check_admissible(curve)
        try:
            hk_deficit = heintze_karcher_deficit(curve, cone)
        except NonPositiveCurvature as exc:
            self.logger.warning(str(exc))
            hk_deficit = None
        profile = mean_curvature_profile(curve, cone)
        return GeometryReport(
            curve=curve.describe(),
            n=cone.n,
            theta_max=cone.theta_max,
            area=sigma_area(curve, cone),
            volume=enclosed_volume(curve, cone),
            isoperimetric_deficit=isoperimetric_deficit(curve, cone),
            heintze_karcher_deficit=hk_deficit,
            orthogonality_residual=residual._asdict(),
            curvature_theta=profile.theta.tolist(),
            curvature=profile.H.tolist()
        )

    def _study(self, curve: SigmaCurve, level: int = 0) -> TruncationStudy:
        cfg = self.config
        factor = 2 ** level
        start = time.perf_counter()
        study = truncation_study(
            curve, cfg.cone, cfg.solver, cfg.truncation.r_out,
            n_theta=cfg.mesh.n_theta * factor, n_rho=cfg.mesh.n_rho * factor,
            grading=cfg.mesh.grading, quad_order=cfg.mesh.quad_order,
            scale_radial=cfg.truncation.scale_radial,
            monotonicity_tol=cfg.truncation.monotonicity_tol
        )
        self.timing[f'truncation_level_{level}'] = time.perf_counter() - start
        if self.tracker:
            for report in study.reports:
                self.tracker.track_solve(report)
        return study

    # -- commands ---------------------------------------------------------

    def geometry_only(self) -> GeometryReport:
        curve = self._curve()
        report = self.geometry_report(curve)
        self.storage.write_json('geometry.json', report)
        self.storage.write_table('curvature_profile.csv', pd.DataFrame({
            'theta': report.curvature_theta, 'H': report.curvature
        }))
        self.logger.info(f"Isoperimetric deficit {report.isoperimetric_deficit:.3e}, "
                         f"HK deficit {report.heintze_karcher_deficit}")
        return report

    def run_scenario(self, verify: bool = False) -> ScenarioReport:
        """Geometry, truncation study, audit of the outermost solve, artifacts on disk."""
        start = time.perf_counter()
        curve = self._curve()
        geometry = self.geometry_report(curve)
        study = self._study(curve)
        field = study.outermost

        audit_start = time.perf_counter()
        audit = IdentityAuditor(self.config.audit).audit(field, study.capacity)
        self.timing['audit'] = time.perf_counter() - audit_start

        status = EXIT_AUDIT_FAILURE if verify and not audit.passed else EXIT_OK
        report = ScenarioReport(
            command='verify' if verify else 'solve',
            scenario=self._scenario_summary(),
            geometry=geometry,
            truncation=study.result,
            solve=study.reports[-1],
            audit=audit,
            exit_status=status
        )
        self.timing['total'] = time.perf_counter() - start
        self.timing['solves'] = [r.wall_time for r in study.reports]

        exterior = field if field.outer_value != 0.0 else far_field_correction(field, audit.correction_gamma)
        self.storage.write_json('report.json', report, timing=self.timing)
        self.storage.write_sigma_profile(exterior, audit.curvature.theta, audit.curvature.margin)
        self.storage.write_ray_profile(exterior)
        self.storage.write_pfunction(exterior)

        self.logger.info(f"Capacity {study.capacity:.10g}; audit "
                         f"{'passed' if audit.passed else 'reported failures'}")
        return report

    def sweep_study(self) -> pd.DataFrame:
        """Convergence table over refinement levels and truncation radii."""
        levels = self.config.mesh.levels
        if not levels:
            raise ConfigError("mesh.levels must not be empty for a study")
        curve = self._curve()
        cone, p = self.config.cone, self.config.solver.p
        auditor = IdentityAuditor(self.config.audit)

        rows: List[Dict] = []
        summary_rows = []
        for level in levels:
            study = self._study(curve, level)
            audit = auditor.audit(study.outermost, study.capacity)
            for r_out, capacity in zip(study.result.r_out, study.result.capacities):
                rows.append({'level': level, 'r_out': r_out, 'capacity': capacity,
                             'extrapolated': False})
            entry = {
                'level': level,
                'r_out': math.inf,
                'capacity': study.capacity,
                'extrapolated': True,
                'surface_capacity_mismatch': audit.record('surface_capacity').relative_mismatch,
                'pohozaev_mismatch': audit.record('pohozaev').relative_mismatch,
                'relative_std': audit.deviation.relative_std,
            }
            rows.append(entry)
            summary_rows.append(entry)

        table = pd.DataFrame(rows)
        self.storage.write_table('study.csv', table)

        reference = model_capacity(curve.radius, cone, p) if curve.is_sphere else None
        orders = fitted_orders([r['capacity'] for r in summary_rows], reference)
        mismatch_orders = {
            name: fitted_orders([r[name] for r in summary_rows], 0.0)
            for name in ('surface_capacity_mismatch', 'pohozaev_mismatch')
        }
        self.storage.write_json('study.json', {
            'scenario': self._scenario_summary(),
            'levels': list(levels),
            'capacity_orders': orders,
            'mismatch_orders': mismatch_orders,
            'reference_capacity': reference,
            'rows': summary_rows,
        }, timing=self.timing)
        return table

    def model(self, r_out: Optional[float] = None, n_points: int = 33) -> Dict:
        """Closed-form radial table for the configured cap radius."""
        curve = self._curve()
        radius = curve.radius if curve.radius is not None else curve.max_radius
        r_out = r_out or self.config.truncation.r_out[-1]
        columns, constants = model_table(radius, self.config.cone, self.config.solver.p, r_out, n_points)
        self.storage.write_table('model.csv', pd.DataFrame(columns))
        self.storage.write_json('model.json', {'radius': radius, 'r_out': r_out, **constants})
        return constants


def fitted_orders(values: List[float], reference: Optional[float] = None) -> List[Optional[float]]:
    """
    Observed orders between consecutive 2x refinements.

    Against a known limit: log2(e_k / e_{k+1}). Without one, from three
    consecutive values: log2((v_k - v_{k+1}) / (v_{k+1} - v_{k+2})).
    """
    orders: List[Optional[float]] = []
    if reference is not None:
        errors = [abs(v - reference) for v in values]
        for a, b in zip(errors[:-1], errors[1:]):
            orders.append(math.log2(a / b) if a > 0 and b > 0 else None)
        return orders
    for a, b, c in zip(values[:-2], values[1:-1], values[2:]):
        d1, d2 = a - b, b - c
        orders.append(math.log2(d1 / d2) if d1 * d2 > 0 else None)
    return orders
