from .auditor import AuditConfig, IdentityAuditor, audit_field
from .far_field import (
    capacity_gamma,
    far_field_correction,
    gamma_estimates,
    pointwise_gamma,
)
from .identities import (
    curvature_bound_audit,
    overdetermined_constant,
    overdetermined_deviation,
    pohozaev_identity,
    rigidity_capacity_formula,
    surface_capacity_identity,
)
from .p_function import infinity_limit, p_function_audit, p_function_values
