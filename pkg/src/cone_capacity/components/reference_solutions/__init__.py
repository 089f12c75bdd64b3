from .radial import (
    TruncatedRadialSolution,
    fundamental_solution,
    model_boundary_gradient,
    model_capacity,
    model_gamma,
    model_table,
    radial_model,
    truncated_radial_solution,
)
