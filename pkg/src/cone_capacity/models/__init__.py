from .reports import (
    CurvatureMargin,
    DeviationSummary,
    GammaEstimates,
    GeometryReport,
    IdentityRecord,
    IdentityReport,
    PFunctionSummary,
    ScenarioReport,
    SolveReport,
    StageRecord,
    TruncationResult,
)
