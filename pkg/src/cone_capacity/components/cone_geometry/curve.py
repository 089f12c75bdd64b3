"""Radial-graph generating curves rho = g(theta) of the hypersurface Sigma."""
import math
from pathlib import Path
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.interpolate import CubicSpline

from cone_capacity.core.errors import InadmissibleCurve, InvalidArgument

Profile = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray, np.ndarray]]


class SigmaCurve:
    """
    Positive function g on [0, theta_max] with first and second derivatives.

    The curve keeps a uniform sample grid (used for CSV export, the mesh and
    extremal radii) next to the evaluator, which is either analytic or a
    clamped cubic spline through samples.
    """

    def __init__(self, profile: Profile, theta_max: float, kind: str = "custom",
                 radius: Optional[float] = None, n_samples: int = 257,
                 metadata: Optional[Dict] = None):
        if n_samples < 5:
            raise InvalidArgument(f"n_samples must be at least 5, got {n_samples}")
        self._profile = profile
        self.theta_max = float(theta_max)
        self.kind = kind
        self.radius = radius
        self.metadata = dict(metadata or {})

        self.theta_samples = np.linspace(0.0, self.theta_max, n_samples)
        self.g_samples = self.g(self.theta_samples)
        dense = self.g(np.linspace(0.0, self.theta_max, 8 * n_samples + 1))
        if not np.all(np.isfinite(dense)) or dense.min() <= 0.0:
            raise InadmissibleCurve("g must be positive on [0, theta_max]: Omega has to contain the vertex")
        self.min_radius = float(dense.min())
        self.max_radius = float(dense.max())

    # -- evaluation -------------------------------------------------------

    def evaluate(self, theta) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return g, g', g'' at theta (array-valued)."""
        theta = np.asarray(theta, dtype=float)
        g, dg, d2g = self._profile(theta)
        return (np.broadcast_to(g, theta.shape).astype(float),
                np.broadcast_to(dg, theta.shape).astype(float),
                np.broadcast_to(d2g, theta.shape).astype(float))

    def g(self, theta) -> np.ndarray:
        return self.evaluate(theta)[0]

    def dg(self, theta) -> np.ndarray:
        return self.evaluate(theta)[1]

    @property
    def is_sphere(self) -> bool:
        return self.kind == "sphere"

    def scaled(self, factor: float) -> "SigmaCurve":
        """The curve lambda * g."""
        profile = self._profile

        def scaled_profile(theta):
            g, dg, d2g = profile(theta)
            return factor * g, factor * dg, factor * d2g

        radius = None if self.radius is None else factor * self.radius
        return SigmaCurve(scaled_profile, self.theta_max, kind=self.kind, radius=radius,
                          n_samples=len(self.theta_samples), metadata=self.metadata)

    def describe(self) -> Dict:
        return {
            'kind': self.kind,
            'radius': self.radius,
            'theta_max': self.theta_max,
            'min_radius': self.min_radius,
            'max_radius': self.max_radius,
            **self.metadata
        }

    # -- constructors -----------------------------------------------------

    @classmethod
    def sphere(cls, radius: float, theta_max: float, n_samples: int = 257) -> "SigmaCurve":
        """Spherical cap g == R centered at the vertex."""
        if radius <= 0:
            raise InvalidArgument(f"sphere radius must be positive, got {radius}")

        def profile(theta):
            zero = np.zeros_like(theta)
            return radius + zero, zero, zero

        return cls(profile, theta_max, kind="sphere", radius=float(radius), n_samples=n_samples)

    @classmethod
    def harmonics(cls, radius: float, terms: Sequence[Sequence[float]], theta_max: float,
                  n_samples: int = 257) -> "SigmaCurve":
        """g(theta) = R (1 + sum_j a_j cos(w_j theta)) from (frequency, amplitude) pairs."""
        freqs = np.array([float(t[0]) for t in terms])
        amps = np.array([float(t[1]) for t in terms])

        def profile(theta):
            phase = np.multiply.outer(theta, freqs)
            g = radius * (1.0 + np.cos(phase) @ amps)
            dg = -radius * (np.sin(phase) @ (amps * freqs))
            d2g = -radius * (np.cos(phase) @ (amps * freqs ** 2))
            return g, dg, d2g

        if not np.any(amps):
            return cls.sphere(radius, theta_max, n_samples)
        return cls(profile, theta_max, kind="harmonics", radius=float(radius), n_samples=n_samples,
                   metadata={'terms': [[float(f), float(a)] for f, a in zip(freqs, amps)]})

    @classmethod
    def cosine_series(cls, radius: float, coefficients: Sequence[float], theta_max: float,
                      n_samples: int = 257) -> "SigmaCurve":
        """g(theta) = R (1 + sum_k delta_k cos(k pi theta / alpha)), k = 1, 2, ..."""
        terms = [(k * math.pi / theta_max, d) for k, d in enumerate(coefficients, start=1)]
        curve = cls.harmonics(radius, terms, theta_max, n_samples)
        if curve.kind != "sphere":
            curve.kind = "cosine_series"
            curve.metadata = {'coefficients': [float(d) for d in coefficients]}
        return curve

    @classmethod
    def from_samples(cls, theta: Sequence[float], g: Sequence[float]) -> "SigmaCurve":
        """Clamped cubic spline (g'(0) = g'(theta_max) = 0) through uniform samples."""
        theta = np.asarray(theta, dtype=float)
        g = np.asarray(g, dtype=float)
        if theta.ndim != 1 or theta.shape != g.shape or len(theta) < 5:
            raise InvalidArgument("need at least 5 matching (theta, g) samples")
        if abs(theta[0]) > 1e-12:
            raise InvalidArgument("samples must start at theta = 0")
        steps = np.diff(theta)
        if steps.min() <= 0 or np.ptp(steps) > 1e-9 * max(1.0, theta[-1]):
            raise InvalidArgument("samples must lie on a uniform increasing theta grid")

        spline = CubicSpline(theta, g, bc_type=((1, 0.0), (1, 0.0)))
        d1 = spline.derivative(1)
        d2 = spline.derivative(2)

        def profile(t):
            return spline(t), d1(t), d2(t)

        return cls(profile, float(theta[-1]), kind="spline", n_samples=len(theta))

    @classmethod
    def from_csv(cls, path) -> "SigmaCurve":
        """Read (theta, g) pairs, header optional."""
        frame = pd.read_csv(path, header=None, comment='#')
        if not np.issubdtype(frame.dtypes.iloc[0], np.number):
            frame = pd.read_csv(path, comment='#')
        values = frame.to_numpy(dtype=float)
        curve = cls.from_samples(values[:, 0], values[:, 1])
        curve.metadata = {'source': str(path)}
        return curve

    def to_csv(self, path) -> None:
        frame = pd.DataFrame({'theta': self.theta_samples, 'g': self.g_samples})
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, lineterminator="\r\n", float_format="%.17g")

    def __repr__(self) -> str:
        return f"SigmaCurve(kind={self.kind!r}, radius={self.radius}, theta_max={self.theta_max:.6g})"
