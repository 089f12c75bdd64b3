"""Truncation sequences u_R and extrapolation of their capacities to R = infinity."""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from cone_capacity.components.cone_geometry import ConeSpec, SigmaCurve
from cone_capacity.components.meridian_mesh import BoundaryTag, Grading, build_mesh
from cone_capacity.core.errors import InvalidArgument, MonotonicityViolation
from cone_capacity.models.reports import SolveReport, TruncationResult

from .solver import PotentialField, SolverConfig, solve_potential

logger = logging.getLogger('TruncationStudy')

ORDER_BRACKET = (1e-3, 20.0)


@dataclass
class TruncationStudy:
    result: TruncationResult
    fields: List[PotentialField]
    reports: List[SolveReport]

    @property
    def capacity(self) -> float:
        return self.result.extrapolated

    @property
    def outermost(self) -> PotentialField:
        return self.fields[-1]


def decay_exponent(n: int, p: float) -> float:
    """kappa = (n - p) / (p - 1)."""
    return (n - p) / (p - 1.0)


def scaled_radial_counts(curve: SigmaCurve, r_out_list: Sequence[float], n_rho: int) -> List[int]:
    """Radial counts keeping the log-spacing of the first mesh on the innermost ray."""
    base = math.log(r_out_list[0] / curve.min_radius)
    return [max(4, int(round(n_rho * math.log(r / curve.min_radius) / base))) for r in r_out_list]


def fit_truncation_order(r_out: Sequence[float], y: Sequence[float]) -> Optional[float]:
    """
    Exponent q with y(r) = y_inf - A r^(-q) through the last three points.

    Returns None when the differences do not bracket a root.
    """
    r0, r1, r2 = r_out[-3:]
    y0, y1, y2 = y[-3:]
    if (y1 - y0) == 0.0 or (y2 - y1) == 0.0:
        return None
    ratio = (y1 - y0) / (y2 - y1)

    def mismatch(q):
        return (r0 ** -q - r1 ** -q) / (r1 ** -q - r2 ** -q) - ratio

    lo, hi = ORDER_BRACKET
    if mismatch(lo) * mismatch(hi) > 0.0:
        return None
    return brentq(mismatch, lo, hi, xtol=1e-14)


def extrapolate_capacity(r_out: Sequence[float], capacities: Sequence[float], p: float,
                         order: float) -> float:
    """Limit of Cap through Cap^(-1/(p-1)), affine in r_out^(-order)."""
    y = [c ** (-1.0 / (p - 1.0)) for c in capacities]
    r1, r2 = r_out[-2:]
    slope = (y[-1] - y[-2]) / (r1 ** -order - r2 ** -order)
    y_inf = y[-1] + slope * r2 ** -order
    return y_inf ** (-(p - 1.0))


def pointwise_violation(inner: PotentialField, outer: PotentialField) -> float:
    """Largest u_inner - u_outer at nodes of the inner field; should be <= 0."""
    worst = -np.inf
    mesh = inner.mesh
    for j in range(mesh.n_theta + 1):
        nodes = mesh.ray_nodes(j)
        nodes = nodes[mesh.tags[nodes] != BoundaryTag.OUTER]
        diff = inner.u[nodes] - outer.sample_ray(j, mesh.rho[nodes])
        worst = max(worst, float(diff.max()))
    return worst


def truncation_study(curve: SigmaCurve, cone: ConeSpec, config: SolverConfig,
                     r_out_list: Sequence[float], n_theta: int = 32, n_rho: int = 48,
                     grading: Optional[Grading] = None, quad_order: int = 2,
                     scale_radial: bool = True, monotonicity_tol: float = 1e-6) -> TruncationStudy:
    """
    Solve on B_R for each R in r_out_list and extrapolate the capacity.

    n_rho applies to the first radius; with scale_radial the later meshes
    keep the same log-spacing.
    """
    r_out_list = [float(r) for r in r_out_list]
    if len(r_out_list) < 3:
        raise InvalidArgument(f"truncation study needs at least 3 radii, got {len(r_out_list)}")
    if any(b <= a for a, b in zip(r_out_list[:-1], r_out_list[1:])):
        raise InvalidArgument(f"r_out list must be increasing, got {r_out_list}")
    config.check_dimension(cone.n)

    counts = scaled_radial_counts(curve, r_out_list, n_rho) if scale_radial else [n_rho] * len(r_out_list)
    fields, reports = [], []
    for r_out, count in zip(r_out_list, counts):
        mesh = build_mesh(curve, cone, r_out, n_theta, count, grading, quad_order)
        potential, report = solve_potential(mesh, config)
        fields.append(potential)
        reports.append(report)
        logger.info(f"r_out={r_out:g} (n_rho={count}): Cap_R = {report.capacity:.10g}")

    capacities = [report.capacity for report in reports]
    for k in range(len(capacities) - 1):
        if capacities[k + 1] > capacities[k] * (1.0 + monotonicity_tol):
            raise MonotonicityViolation(
                f"capacity increased from {capacities[k]:.10g} (r_out={r_out_list[k]:g}) "
                f"to {capacities[k + 1]:.10g} (r_out={r_out_list[k + 1]:g})"
            )

    violation = max(pointwise_violation(a, b) for a, b in zip(fields[:-1], fields[1:]))
    if violation > monotonicity_tol:
        logger.warning(f"u_R not monotone in R at shared nodes: max excess {violation:.3e}")

    theoretical = decay_exponent(cone.n, config.p)
    y = [c ** (-1.0 / (config.p - 1.0)) for c in capacities]
    fitted = fit_truncation_order(r_out_list, y)
    method = 'fitted'
    if fitted is None:
        logger.warning("Could not fit the truncation order, using the radial decay exponent")
        fitted, method = theoretical, 'theoretical'
    limit = extrapolate_capacity(r_out_list, capacities, config.p, fitted)
    logger.info(f"Extrapolated Cap = {limit:.10g} (order {fitted:.4f}, radial {theoretical:.4f})")

    result = TruncationResult(
        r_out=r_out_list,
        n_rho=counts,
        capacities=capacities,
        extrapolated=limit,
        fitted_order=fitted,
        theoretical_order=theoretical,
        limit_method=method,
        pointwise_violation=violation,
        iterations=[report.iterations for report in reports]
    )
    return TruncationStudy(result=result, fields=fields, reports=reports)
