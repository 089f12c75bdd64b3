from .defaults import AUDIT_TOLERANCES, ORTHOGONALITY_THRESHOLD, P_MARGIN, SOLVER_PRESETS

__all__ = ['AUDIT_TOLERANCES', 'ORTHOGONALITY_THRESHOLD', 'P_MARGIN', 'SOLVER_PRESETS']
