"""Circular convex cones and their unit-ball sections."""
import math

from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import integrate
from scipy.special import gamma

from cone_capacity.core.config.defaults import QUAD_EPSREL, QUAD_LIMIT


class ConeSpec(BaseModel):
    """Circular cone of half-angle alpha about the x_n axis, or the whole space."""
    model_config = ConfigDict(frozen=True)

    n: int = Field(3, ge=2, description="Ambient dimension")
    half_angle: float = Field(math.pi / 2, description="Half-angle alpha in radians")
    full_space: bool = Field(False, description="C = R^n, meridian angle runs to pi")

    @model_validator(mode='after')
    def _check_convexity(self):
        if self.full_space:
            return self
        if not (0.0 < self.half_angle <= math.pi / 2 + 1e-15):
            raise ValueError(
                f"half_angle must lie in (0, pi/2] for a convex cone, got {self.half_angle}"
            )
        return self

    @property
    def theta_max(self) -> float:
        """Upper end of the meridian angle range."""
        return math.pi if self.full_space else float(self.half_angle)

    @property
    def has_wall(self) -> bool:
        return not self.full_space

    @property
    def solid_angle_factor(self) -> float:
        """c_n, the area of the unit (n-2)-sphere (c_2 = 2)."""
        k = self.n - 1
        return 2.0 * math.pi ** (k / 2.0) / gamma(k / 2.0)


def cone_unit_ball_volume(cone: ConeSpec) -> float:
    """omega_n^C = H^n(C cap B_1) = (c_n / n) int_0^alpha sin^(n-2)."""
    integral, _ = integrate.quad(
        lambda t: math.sin(t) ** (cone.n - 2),
        0.0, cone.theta_max,
        epsabs=0.0, epsrel=QUAD_EPSREL, limit=QUAD_LIMIT
    )
    return cone.solid_angle_factor / cone.n * integral
