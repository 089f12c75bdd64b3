"""
Damped Newton minimization of the regularized p-energy with eps-continuation.

Each continuation stage warm-starts from the previous one. The Newton step
solves the free-node Hessian system by sparse LU; an Armijo backtracking
search keeps the energy monotone within the stage. WALL and AXIS nodes stay
free, which imposes the natural (zero conormal flux) condition weakly.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.sparse.linalg import splu

from cone_capacity.components.meridian_mesh import BoundaryTag, MeridianMesh
from cone_capacity.core.config.defaults import P_MARGIN, SOLVER_PRESETS
from cone_capacity.core.errors import InvalidArgument, LineSearchFailure, NonConvergence
from cone_capacity.core.tracking import StageTracker
from cone_capacity.models.reports import SolveReport, StageRecord

from .energy import energy_gradient_hessian

# Newton decrement, relative to the energy, below which a failed line search counts as roundoff
ROUNDOFF = 1e-10

_DEFAULT = SOLVER_PRESETS['default']


class SolverConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: float = Field(2.0, gt=1.0, description="Exponent of the p-energy")
    eps_schedule: List[float] = Field(default_factory=lambda: list(_DEFAULT['eps_schedule']))
    tol: float = Field(_DEFAULT['tol'], gt=0.0, description="Absolute tolerance on the free gradient norm")
    max_iter: int = Field(_DEFAULT['max_iter'], ge=1, description="Newton iterations over all stages")
    armijo_c1: float = Field(_DEFAULT['armijo_c1'], gt=0.0, lt=1.0)
    backtrack: float = Field(_DEFAULT['backtrack'], gt=0.0, lt=1.0)
    min_step: float = Field(_DEFAULT['min_step'], gt=0.0)
    decrement_tol: float = Field(_DEFAULT['decrement_tol'], gt=0.0,
                                 description="Stop when half the Newton decrement is below this times max(1, |E|)")
    stall_window: int = Field(_DEFAULT['stall_window'], ge=1,
                              description="Iterations without halving the gradient norm before a stage stagnates")
    deterministic: bool = True
    threads: int = Field(1, ge=1)

    @model_validator(mode='before')
    @classmethod
    def _expand_preset(cls, data):
        """A `preset` key pulls in a named entry of SOLVER_PRESETS; explicit fields win."""
        if isinstance(data, dict) and 'preset' in data:
            data = dict(data)
            name = data.pop('preset')
            if name not in SOLVER_PRESETS:
                raise ValueError(f"unknown solver preset {name!r}, expected one of {sorted(SOLVER_PRESETS)}")
            data = {**SOLVER_PRESETS[name], **data}
        return data

    @field_validator('eps_schedule')
    @classmethod
    def _strictly_decreasing(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("eps_schedule must not be empty")
        if min(value) <= 0.0:
            raise ValueError("eps_schedule entries must be positive")
        if any(b >= a for a, b in zip(value[:-1], value[1:])):
            raise ValueError("eps_schedule must be strictly decreasing")
        return value

    @property
    def eps_min(self) -> float:
        return self.eps_schedule[-1]

    def check_dimension(self, n: int) -> None:
        """Enforce 1 < p <= n - P_MARGIN."""
        if not (1.0 < self.p <= n - P_MARGIN):
            raise InvalidArgument(f"p = {self.p} must lie in (1, {n - P_MARGIN}] for n = {n}")


@dataclass(frozen=True)
class PotentialField:
    """Nodal potential on a mesh, u = 1 on SIGMA and u = outer_value on OUTER."""
    mesh: MeridianMesh
    u: np.ndarray
    p: float
    eps_min: float
    converged: bool
    outer_value: float = 0.0
    metadata: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.mesh.cone.n

    @property
    def r_out(self) -> float:
        return self.mesh.r_out

    def gradient_at_qp(self) -> np.ndarray:
        return self.mesh.gradient_at_qp(self.u)

    def gradient_norm_at_qp(self) -> np.ndarray:
        return np.linalg.norm(self.gradient_at_qp(), axis=-1)

    def values_at_qp(self) -> np.ndarray:
        return self.mesh.interpolate_to_qp(self.u)

    def ray(self, j: int) -> Tuple[np.ndarray, np.ndarray]:
        """(rho, u) along ray j from Sigma outwards."""
        nodes = self.mesh.ray_nodes(j)
        return self.mesh.rho[nodes], self.u[nodes]

    def sample_ray(self, j: int, rho) -> np.ndarray:
        """Piecewise-linear-in-log(rho) interpolation of u along ray j."""
        rho_ray, u_ray = self.ray(j)
        return np.interp(np.log(rho), np.log(rho_ray), u_ray)

    def with_values(self, u: np.ndarray, outer_value: float, **metadata) -> "PotentialField":
        u = np.array(u, dtype=float)
        u.setflags(write=False)
        return replace(self, u=u, outer_value=outer_value, metadata={**self.metadata, **metadata})


def initial_guess(mesh: MeridianMesh, outer_value: float = 0.0) -> np.ndarray:
    """Linear in log(rho) along each ray between the Dirichlet values."""
    j = np.arange(mesh.n_nodes) // (mesh.n_rho + 1)
    inner = np.log(mesh.rho[mesh.sigma_nodes])[j]
    s = (np.log(mesh.rho) - inner) / (np.log(mesh.r_out) - inner)
    u = 1.0 - (1.0 - outer_value) * s
    u[mesh.tags == BoundaryTag.SIGMA] = 1.0
    u[mesh.tags == BoundaryTag.OUTER] = outer_value
    return u


def capacity_of(field: PotentialField, eps: float = 0.0) -> float:
    """(1/p) int |grad u|^p over the mesh (regularized when eps > 0)."""
    s = field.gradient_norm_at_qp() ** 2 + eps * eps
    return float(np.sum(field.mesh.qp_weight * s ** (field.p / 2.0))) / field.p


class PEnergySolver:
    """Continuation Newton solver for one mesh and config."""

    def __init__(self, mesh: MeridianMesh, config: SolverConfig):
        config.check_dimension(mesh.cone.n)
        self.mesh = mesh
        self.config = config
        self.free = mesh.free_mask
        self.logger = logging.getLogger('PEnergySolver')

    def _evaluate(self, u: np.ndarray, eps: float, with_hessian: bool = True):
        return energy_gradient_hessian(
            self.mesh, u, self.config.p, eps, free=self.free, with_hessian=with_hessian,
            threads=self.config.threads, deterministic=self.config.deterministic
        )

    def _report(self, tracker: StageTracker, converged: bool) -> SolveReport:
        return SolveReport(
            p=self.config.p,
            stages=[StageRecord(**stage) for stage in tracker.stages],
            iterations=tracker.total_iterations(),
            final_grad_norm=tracker.final_grad_norm(),
            converged=converged,
            wall_time=tracker.wall_time()
        )

    def _line_search(self, u, direction, energy, slope, eps, tracker):
        """Armijo backtracking along `direction`; returns (step, u_new, backtracks) or None at roundoff."""
        cfg = self.config
        step, backtracks = 1.0, 0
        while step >= cfg.min_step:
            trial = u.copy()
            trial[self.free] += step * direction
            trial_energy = self._evaluate(trial, eps, with_hessian=False).energy
            if trial_energy <= energy + cfg.armijo_c1 * step * slope:
                return step, trial, backtracks
            step *= cfg.backtrack
            backtracks += 1

        if -slope <= ROUNDOFF * max(1.0, abs(energy)):
            return None
        raise LineSearchFailure(
            f"no sufficient decrease at eps={eps:g} (slope {slope:.3e})",
            report=self._report(tracker, converged=False)
        )

    def _run_stage(self, u: np.ndarray, eps: float, tracker: StageTracker) -> Tuple[str, float]:
        """
        Newton iterations at one eps, updating u in place.

        A stage ends on the absolute gradient tolerance, on a Newton decrement
        that is negligible against the energy, or as stagnated when the
        gradient norm has not halved within `stall_window` iterations.
        """
        cfg = self.config
        energy, grad, hess = self._evaluate(u, eps)
        grad_norm = float(np.linalg.norm(grad))
        tracker.begin_stage(eps, energy, grad_norm)
        best, since_best = grad_norm, 0

        stop = None
        while stop is None:
            if grad_norm <= cfg.tol:
                stop = 'gradient'
                break
            if tracker.total_iterations() >= cfg.max_iter:
                tracker.end_stage()
                raise NonConvergence(
                    f"gradient norm {grad_norm:.3e} > {cfg.tol:g} after {cfg.max_iter} iterations",
                    report=self._report(tracker, converged=False)
                )
            direction = -splu(hess.tocsc()).solve(grad)
            slope = float(grad @ direction)
            if slope >= 0.0:
                direction, slope = -grad, -grad_norm ** 2
            if -0.5 * slope <= cfg.decrement_tol * max(1.0, abs(energy)):
                stop = 'decrement'
                break

            searched = self._line_search(u, direction, energy, slope, eps, tracker)
            if searched is None:
                stop = 'stagnated'
                break
            step, trial, backtracks = searched
            u[:] = trial

            energy, grad, hess = self._evaluate(u, eps)
            grad_norm = float(np.linalg.norm(grad))
            record = tracker.add_iteration(energy, grad_norm, step, backtracks)
            self.logger.debug(f"Newton {record}")

            if grad_norm < 0.5 * best:
                best, since_best = grad_norm, 0
            else:
                since_best += 1
                if since_best >= cfg.stall_window:
                    stop = 'stagnated'

        tracker.end_stage(stop)
        self.logger.debug(f"eps={eps:g} done ({stop}): E={energy:.12g}, |g|={grad_norm:.3e}")
        return stop, grad_norm

    def solve(self, initial: Optional[np.ndarray] = None) -> Tuple[PotentialField, SolveReport]:
        cfg = self.config
        u = initial_guess(self.mesh) if initial is None else np.array(initial, dtype=float)
        u[self.mesh.tags == BoundaryTag.SIGMA] = 1.0
        u[self.mesh.tags == BoundaryTag.OUTER] = 0.0

        tracker = StageTracker()
        self.logger.info(
            f"Solving p={cfg.p} on {self.mesh.n_theta}x{self.mesh.n_rho} mesh, "
            f"r_out={self.mesh.r_out}, {len(cfg.eps_schedule)} eps stages"
        )

        last = len(cfg.eps_schedule) - 1
        for index, eps in enumerate(cfg.eps_schedule):
            stop, grad_norm = self._run_stage(u, eps, tracker)
            if stop == 'stagnated':
                if index == last:
                    raise NonConvergence(
                        f"Newton stagnated at eps={eps:g} with gradient norm {grad_norm:.3e} > {cfg.tol:g}",
                        report=self._report(tracker, converged=False)
                    )
                self.logger.warning(f"eps={eps:g}: stagnated at |g|={grad_norm:.3e}, moving to the next stage")

        u.setflags(write=False)
        potential = PotentialField(mesh=self.mesh, u=u, p=cfg.p, eps_min=cfg.eps_min, converged=True)
        report = self._report(tracker, converged=True)
        report.capacity = capacity_of(potential)
        report.regularized_capacity = capacity_of(potential, cfg.eps_min)

        if u[self.free].min() <= 0.0 or u.max() > 1.0 + 1e-12:
            self.logger.warning(f"Discrete bound 0 < u <= 1 violated: range [{u[self.free].min():.3e}, {u.max():.6f}]")
        self.logger.info(
            f"Converged in {report.iterations} iterations, Cap_R = {report.capacity:.10g}"
        )
        return potential, report


def solve_potential(mesh: MeridianMesh, config: SolverConfig,
                    initial: Optional[np.ndarray] = None) -> Tuple[PotentialField, SolveReport]:
    return PEnergySolver(mesh, config).solve(initial)
