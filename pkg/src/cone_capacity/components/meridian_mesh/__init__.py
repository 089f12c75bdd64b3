from .mesh import (
    BoundaryTag,
    Grading,
    MeridianMesh,
    annulus_measure,
    build_mesh,
    quadrature_integral,
    refine,
)

__all__ = [
    'BoundaryTag',
    'Grading',
    'MeridianMesh',
    'annulus_measure',
    'build_mesh',
    'quadrature_integral',
    'refine',
]
