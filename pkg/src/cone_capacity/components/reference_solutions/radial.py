"""Closed-form radial potentials used as oracles."""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from cone_capacity.components.cone_geometry import ConeSpec, cone_unit_ball_volume
from cone_capacity.core.errors import InvalidArgument


def _check_exponent(n: int, p: float) -> float:
    if not (1.0 < p < n):
        raise InvalidArgument(f"need 1 < p < n, got p={p}, n={n}")
    return (n - p) / (p - 1.0)


def fundamental_solution(x_norm, n: int, p: float) -> Tuple[np.ndarray, np.ndarray]:
    """Gamma_p = |x|^((p-n)/(p-1)) and its radial derivative."""
    kappa = _check_exponent(n, p)
    x = np.asarray(x_norm, dtype=float)
    if np.any(x <= 0.0):
        raise InvalidArgument("fundamental solution is defined only for |x| > 0")
    value = x ** -kappa
    return value, -kappa * value / x


def radial_model(x_norm, radius: float, n: int, p: float) -> np.ndarray:
    """(|x| / R)^((p-n)/(p-1)), the potential of a vertex-centered cap of radius R."""
    kappa = _check_exponent(n, p)
    x = np.asarray(x_norm, dtype=float)
    if np.any(x < radius * (1.0 - 1e-14)):
        raise InvalidArgument(f"radial model is defined for |x| >= R = {radius}")
    return (x / radius) ** -kappa


def model_boundary_gradient(radius: float, n: int, p: float) -> float:
    """|grad u| on the cap: (n - p) / ((p - 1) R)."""
    return _check_exponent(n, p) / radius


def model_capacity(radius: float, cone: ConeSpec, p: float) -> float:
    """(1/p) kappa^(p-1) n omega R^(n-p)."""
    kappa = _check_exponent(cone.n, p)
    omega = cone_unit_ball_volume(cone)
    return kappa ** (p - 1.0) * cone.n * omega * radius ** (cone.n - p) / p


def model_gamma(radius: float, n: int, p: float) -> float:
    """Far-field constant of the radial model, R^((n-p)/(p-1))."""
    return radius ** _check_exponent(n, p)


@dataclass(frozen=True)
class TruncatedRadialSolution:
    """u(R) = 1, u(r_out) = 0 with constant weighted flux rho^(n-1)|u'|^(p-2)u'."""
    radius: float
    r_out: float
    n: int
    p: float

    def __post_init__(self):
        if self.r_out <= self.radius:
            raise InvalidArgument(f"r_out = {self.r_out} must exceed R = {self.radius}")
        _check_exponent(self.n, self.p)

    @property
    def kappa(self) -> float:
        return (self.n - self.p) / (self.p - 1.0)

    @property
    def denominator(self) -> float:
        return self.radius ** -self.kappa - self.r_out ** -self.kappa

    def profile(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        return (rho ** -self.kappa - self.r_out ** -self.kappa) / self.denominator

    def derivative(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        return -self.kappa * rho ** (-self.kappa - 1.0) / self.denominator

    def capacity(self, cone: ConeSpec) -> float:
        if cone.n != self.n:
            raise InvalidArgument(f"cone dimension {cone.n} differs from n = {self.n}")
        omega = cone_unit_ball_volume(cone)
        return (self.n * omega * self.kappa ** (self.p - 1.0)
                * self.denominator ** (1.0 - self.p) / self.p)


def truncated_radial_solution(radius: float, r_out: float, n: int, p: float) -> TruncatedRadialSolution:
    return TruncatedRadialSolution(float(radius), float(r_out), n, float(p))


def model_table(radius: float, cone: ConeSpec, p: float, r_out: float, n_points: int = 33):
    """Columns of Gamma_p, the model and the truncated profile on a log grid in [R, r_out]."""
    rho = np.geomspace(radius, r_out, n_points)
    gamma, d_gamma = fundamental_solution(rho, cone.n, p)
    truncated = truncated_radial_solution(radius, r_out, cone.n, p)
    return {
        'rho': rho,
        'fundamental': gamma,
        'fundamental_derivative': d_gamma,
        'model': radial_model(rho, radius, cone.n, p),
        'truncated': truncated.profile(rho),
        'truncated_derivative': truncated.derivative(rho),
    }, {
        'capacity': model_capacity(radius, cone, p),
        'truncated_capacity': truncated.capacity(cone),
        'boundary_gradient': model_boundary_gradient(radius, cone.n, p),
        'gamma': model_gamma(radius, cone.n, p),
        'kappa': (cone.n - p) / (p - 1.0),
        'omega': cone_unit_ball_volume(cone),
    }
