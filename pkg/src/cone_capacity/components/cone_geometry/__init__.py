from .cone import ConeSpec, cone_unit_ball_volume
from .curve import SigmaCurve
from .measures import (
    CurvatureProfile,
    OrthogonalityResidual,
    check_admissible,
    enclosed_volume,
    heintze_karcher_deficit,
    isoperimetric_deficit,
    mean_curvature,
    mean_curvature_profile,
    orthogonality_residual,
    sigma_area,
    sigma_integral,
)

__all__ = [
    'ConeSpec', 'CurvatureProfile', 'OrthogonalityResidual', 'SigmaCurve',
    'check_admissible', 'cone_unit_ball_volume', 'enclosed_volume',
    'heintze_karcher_deficit', 'isoperimetric_deficit', 'mean_curvature',
    'mean_curvature_profile', 'orthogonality_residual', 'sigma_area', 'sigma_integral'
]
