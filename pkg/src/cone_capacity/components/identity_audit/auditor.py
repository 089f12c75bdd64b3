"""Runs every identity and rigidity check on one converged field."""
import logging
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from cone_capacity.components.cone_geometry import ConeSpec
from cone_capacity.components.p_energy_solver import PotentialField, capacity_of
from cone_capacity.core.config.defaults import AUDIT_TOLERANCES
from cone_capacity.core.errors import FarFieldTooNoisy
from cone_capacity.models.reports import IdentityReport

from .far_field import capacity_gamma, far_field_correction, gamma_estimates
from .identities import (
    curvature_bound_audit,
    make_record,
    overdetermined_constant,
    overdetermined_deviation,
    pohozaev_identity,
    rigidity_capacity_formula,
    surface_capacity_identity,
)
from .p_function import p_function_audit


class AuditConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    identity_mismatch: float = Field(AUDIT_TOLERANCES['identity_mismatch'], gt=0.0)
    gamma_spread: float = Field(AUDIT_TOLERANCES['gamma_spread'], gt=0.0)
    maximum_principle_slack: float = Field(AUDIT_TOLERANCES['maximum_principle_slack'], ge=0.0)
    far_field_noise: float = Field(AUDIT_TOLERANCES['far_field_noise'], gt=0.0)
    capacity_formula: float = Field(AUDIT_TOLERANCES['capacity_formula'], gt=0.0)
    overdetermined_relative_std: float = Field(AUDIT_TOLERANCES['overdetermined_relative_std'], gt=0.0)
    shell: Tuple[float, float] = (0.4, 0.7)
    sigma_exclusion_layers: int = Field(2, ge=0)
    outer_exclusion_layers: int = Field(2, ge=0)
    curvature_points: int = Field(0, ge=0, description="0 uses the curve's sample grid")

    @model_validator(mode='after')
    def _check_shell(self):
        lo, hi = self.shell
        if not (0.0 < lo < hi < 1.0):
            raise ValueError(f"audit shell must satisfy 0 < lo < hi < 1, got {self.shell}")
        return self


class IdentityAuditor:
    """Audits a truncated field u_R against the exterior-potential identities."""

    def __init__(self, config: Optional[AuditConfig] = None):
        self.config = config or AuditConfig()
        self.logger = logging.getLogger('IdentityAuditor')

    def audit(self, field: PotentialField, capacity: Optional[float] = None) -> IdentityReport:
        """
        `capacity` is the extrapolated capacity; it defaults to the energy of
        the field itself. Identities are evaluated on the far-field corrected
        field, whose Sigma data approximate the exterior potential.
        """
        cfg = self.config
        mesh = field.mesh
        cone: ConeSpec = mesh.cone
        curve, p = mesh.curve, field.p
        capacity = capacity_of(field) if capacity is None else capacity
        rigid = curve.is_sphere
        failures = []

        gamma = None
        try:
            gamma = gamma_estimates(field, capacity, cone, cfg.shell, cfg.far_field_noise, cfg.gamma_spread)
            correction = gamma.gamma_value
            if not gamma.passed:
                failures.append(f"gamma spread {gamma.spread:.2%} > {cfg.gamma_spread:.0%}")
        except FarFieldTooNoisy as exc:
            self.logger.warning(str(exc))
            failures.append(str(exc))
            correction = capacity_gamma(capacity, cone, p)

        exterior = field if field.outer_value != 0.0 else far_field_correction(field, correction)

        deviation = overdetermined_deviation(exterior)
        records = [
            surface_capacity_identity(exterior, capacity, cfg.identity_mismatch),
            pohozaev_identity(exterior, capacity, cfg.identity_mismatch),
            make_record('capacity_formula', 'capacity of the overdetermined problem from perimeter and volume',
                        capacity, rigidity_capacity_formula(curve, cone, p),
                        cfg.capacity_formula if rigid else None),
            make_record('overdetermined_constant', 'constant |grad u| on Sigma from perimeter and volume',
                        deviation.mean, overdetermined_constant(curve, cone, p),
                        cfg.capacity_formula if rigid else None),
        ]
        if rigid:
            if deviation.relative_std > cfg.overdetermined_relative_std:
                failures.append(f"relative std of |grad u| on a cap is {deviation.relative_std:.2%}")
        failures.extend(f"{r.name} mismatch {r.relative_mismatch:.2%} > {r.tolerance:.0%}"
                        for r in records if not r.passed)

        p_summary = p_function_audit(
            exterior, cone, capacity, cfg.sigma_exclusion_layers, cfg.outer_exclusion_layers,
            cfg.maximum_principle_slack
        )
        if not p_summary.passed:
            failures.append(f"P-function maximum not on Sigma (location {p_summary.max_location})")

        curvature = curvature_bound_audit(curve, cone, p, cfg.curvature_points)
        report = IdentityReport(
            capacity=capacity,
            correction_gamma=correction,
            records=records,
            gamma=gamma,
            p_function=p_summary,
            deviation=deviation,
            curvature=curvature,
            failures=failures
        )
        for record in records:
            self.logger.info(f"{record.name}: measured {record.measured:.8g}, "
                             f"predicted {record.predicted:.8g} ({record.relative_mismatch:.2%})")
        if failures:
            self.logger.warning(f"{len(failures)} audit failure(s): {'; '.join(failures)}")
        return report


def audit_field(field: PotentialField, capacity: Optional[float] = None,
                config: Optional[AuditConfig] = None) -> IdentityReport:
    return IdentityAuditor(config).audit(field, capacity)
