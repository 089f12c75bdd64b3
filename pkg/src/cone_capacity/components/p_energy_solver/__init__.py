from .boundary import SigmaGradient, boundary_gradient_on_sigma
from .energy import EnergyEvaluation, energy_gradient_hessian
from .solver import (
    PEnergySolver,
    PotentialField,
    SolverConfig,
    capacity_of,
    initial_guess,
    solve_potential,
)
from .truncation import (
    TruncationStudy,
    decay_exponent,
    extrapolate_capacity,
    fit_truncation_order,
    truncation_study,
)
