"""Serializable result records produced by solves, studies and audits."""
from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class StageRecord(BaseModel):
    eps: float
    energies: List[float]
    grad_norms: List[float]
    iterations: int
    stop: Optional[str] = Field(None, description="gradient, decrement or stagnated")
    wall_time: float = Field(0.0, exclude=True)


class SolveReport(BaseModel):
    """History of one continuation Newton solve."""
    p: float
    stages: List[StageRecord] = Field(default_factory=list)
    iterations: int = 0
    final_grad_norm: float = float('nan')
    converged: bool = False
    capacity: Optional[float] = Field(None, description="(1/p) int |grad u|^p at eps = 0")
    regularized_capacity: Optional[float] = Field(None, description="Same integral at eps_min")
    wall_time: float = Field(0.0, exclude=True)

    @property
    def energy_history(self) -> List[List[float]]:
        return [stage.energies for stage in self.stages]


class TruncationResult(BaseModel):
    """Capacities of a truncation sequence and their extrapolated limit."""
    r_out: List[float]
    n_rho: List[int]
    capacities: List[float]
    extrapolated: float
    fitted_order: float
    theoretical_order: float
    limit_method: str = Field(description="'fitted' or 'theoretical' truncation order")
    pointwise_violation: float = Field(0.0, description="max of u_small - u_large on shared nodes")
    iterations: List[int] = Field(default_factory=list)


class IdentityRecord(BaseModel):
    name: str
    provenance: str
    measured: float
    predicted: float
    relative_mismatch: float
    tolerance: Optional[float] = None
    passed: bool = Field(True, alias='pass')

    model_config = {'populate_by_name': True}


class GammaEstimates(BaseModel):
    provenance: str = "far-field asymptotics of the exterior potential"
    gamma_value: float
    gamma_grad: float
    gamma_formula: float
    spread: float
    shell: List[float]
    shell_noise: float
    tolerance: Optional[float] = None
    passed: bool = True


class PFunctionSummary(BaseModel):
    provenance: str = "P-function maximum principle and its limit at infinity"
    interior_max: float
    sigma_max: float
    wall_max: Optional[float] = None
    infinity_limit: float
    max_location: str
    overdetermined_value: float = Field(description="P on Sigma if |grad u| were the constant C")
    geometric_limit: float = Field(description="Infinity limit from perimeter and volume only")
    slack: float
    passed: bool = True


class DeviationSummary(BaseModel):
    provenance: str = "constancy of |grad u| on Sigma"
    mean: float
    std: float
    relative_std: float
    predicted_constant: float
    min_gradient: float = Field(description="Smallest |grad u| over quadrature points")


class CurvatureMargin(BaseModel):
    provenance: str = "mean-curvature lower bound along Sigma"
    theta: List[float]
    margin: List[float]
    max_abs_margin: float
    inverse_curvature_integral: Optional[float] = Field(None, description="int_Sigma 1/H")
    volume_bound: float = Field(description="n/(n-1) vol(Omega cap C)")


class GeometryReport(BaseModel):
    curve: Dict
    n: int
    theta_max: float
    area: float
    volume: float
    isoperimetric_deficit: float
    heintze_karcher_deficit: Optional[float] = None
    orthogonality_residual: Dict[str, float]
    curvature_theta: List[float]
    curvature: List[float]


class IdentityReport(BaseModel):
    """All audits evaluated on one converged field."""
    capacity: float
    correction_gamma: float = Field(description="gamma used for the far-field correction")
    records: List[IdentityRecord]
    gamma: Optional[GammaEstimates] = None
    p_function: PFunctionSummary
    deviation: DeviationSummary
    curvature: CurvatureMargin
    failures: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, name: str) -> IdentityRecord:
        for item in self.records:
            if item.name == name:
                return item
        raise KeyError(name)


class ScenarioReport(BaseModel):
    command: str
    scenario: Dict
    geometry: GeometryReport
    truncation: Optional[TruncationResult] = None
    solve: Optional[SolveReport] = None
    audit: Optional[IdentityReport] = None
    exit_status: int = 0
