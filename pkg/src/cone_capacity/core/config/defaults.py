"""Solver presets and audit tolerances."""
SOLVER_PRESETS = {
    'default': {
        'eps_schedule': [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6],
        'tol': 1e-9,
        'max_iter': 200,
        'armijo_c1': 1e-4,
        'backtrack': 0.5,
        'min_step': 1e-10,
        'decrement_tol': 1e-12,
        'stall_window': 20
    },
    'quick': {
        'eps_schedule': [1e-1, 1e-3, 1e-6],
        'tol': 1e-8,
        'max_iter': 100,
        'armijo_c1': 1e-4,
        'backtrack': 0.5,
        'min_step': 1e-10,
        'decrement_tol': 1e-12,
        'stall_window': 20
    }
}

AUDIT_TOLERANCES = {
    'identity_mismatch': 0.03,
    'gamma_spread': 0.04,
    'maximum_principle_slack': 0.02,
    'far_field_noise': 0.10,
    'capacity_formula': 0.02,
    'overdetermined_relative_std': 0.02
}

# p must stay this far below n
P_MARGIN = 0.05

# |g'| at the axis and wall
ORTHOGONALITY_THRESHOLD = 1e-8

QUAD_EPSREL = 1e-12
QUAD_LIMIT = 400
