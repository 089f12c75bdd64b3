"""Scenario documents: one section per stage of a run."""
import json
import math
import tomllib
from pathlib import Path
from typing import List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from cone_capacity.components.cone_geometry import ConeSpec, SigmaCurve
from cone_capacity.components.identity_audit import AuditConfig
from cone_capacity.components.meridian_mesh import Grading
from cone_capacity.components.p_energy_solver import SolverConfig
from cone_capacity.core.config.settings import SCENARIO_DIR
from cone_capacity.core.errors import ConfigError


class SphereSigma(BaseModel):
    type: Literal['sphere'] = 'sphere'
    R: float = Field(1.0, gt=0.0)


class CosineSeriesSigma(BaseModel):
    """g = R (1 + sum delta_k cos(k pi theta / alpha))."""
    type: Literal['cosine_series']
    R: float = Field(1.0, gt=0.0)
    coefficients: List[float] = Field(default_factory=list)


class HarmonicsSigma(BaseModel):
    """g = R (1 + sum a_j cos(w_j theta)); non-admissible frequencies are rejected later."""
    type: Literal['harmonics']
    R: float = Field(1.0, gt=0.0)
    terms: List[Tuple[float, float]] = Field(default_factory=list)


class CsvSigma(BaseModel):
    type: Literal['csv']
    path: str


SigmaSection = Union[SphereSigma, CosineSeriesSigma, HarmonicsSigma, CsvSigma]


class MeshSection(BaseModel):
    n_theta: int = Field(32, ge=4)
    n_rho: int = Field(48, ge=4, description="Radial elements for the first r_out")
    grading: Grading = Field(default_factory=Grading)
    quad_order: int = Field(2, ge=1)
    levels: List[int] = Field(default_factory=lambda: [0, 1, 2],
                              description="Refinement levels (2^level) for the study command")


class TruncationSection(BaseModel):
    r_out: List[float] = Field(default_factory=lambda: [8.0, 16.0, 32.0])
    scale_radial: bool = True
    monotonicity_tol: float = Field(1e-6, ge=0.0)

    @field_validator('r_out')
    @classmethod
    def _increasing(cls, value: List[float]) -> List[float]:
        if len(value) < 3:
            raise ValueError(f"truncation.r_out needs at least 3 radii, got {len(value)}")
        if any(b <= a for a, b in zip(value[:-1], value[1:])):
            raise ValueError("truncation.r_out must be strictly increasing")
        return value


class OutputSection(BaseModel):
    directory: Optional[str] = None


class ScenarioConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    name: str = 'scenario'
    cone: ConeSpec = Field(default_factory=ConeSpec)
    sigma: SigmaSection = Field(default_factory=SphereSigma, discriminator='type')
    mesh: MeshSection = Field(default_factory=MeshSection)
    truncation: TruncationSection = Field(default_factory=TruncationSection)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    audit: AuditConfig = Field(default_factory=AuditConfig)
    output: OutputSection = Field(default_factory=OutputSection)

    @model_validator(mode='after')
    def _check_exponent(self):
        self.solver.check_dimension(self.cone.n)
        return self

    def build_curve(self, base_dir: Optional[Path] = None) -> SigmaCurve:
        theta_max = self.cone.theta_max
        sigma = self.sigma
        if isinstance(sigma, SphereSigma):
            return SigmaCurve.sphere(sigma.R, theta_max)
        if isinstance(sigma, CosineSeriesSigma):
            return SigmaCurve.cosine_series(sigma.R, sigma.coefficients, theta_max)
        if isinstance(sigma, HarmonicsSigma):
            return SigmaCurve.harmonics(sigma.R, sigma.terms, theta_max)
        path = Path(sigma.path)
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
        curve = SigmaCurve.from_csv(path)
        if not math.isclose(curve.theta_max, theta_max, rel_tol=0.0, abs_tol=1e-9):
            raise ConfigError(f"CSV curve spans [0, {curve.theta_max}] but the cone needs [0, {theta_max}]")
        return curve


def _describe(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = '.'.join(str(x) for x in item['loc'])
        parts.append(f"{location}: {item['msg']}" if location else item['msg'])
    return '; '.join(parts)


def parse_scenario(document: dict) -> ScenarioConfig:
    try:
        return ScenarioConfig.model_validate(document)
    except ValidationError as exc:
        raise ConfigError(f"invalid scenario: {_describe(exc)}") from exc
    except ValueError as exc:
        raise ConfigError(f"invalid scenario: {exc}") from exc


def resolve_scenario_path(path) -> Path:
    """A path as given, or a bare name looked up among the bundled scenarios."""
    path = Path(path)
    if path.exists() or path.suffix or len(path.parts) != 1:
        return path
    for suffix in ('.json', '.toml'):
        candidate = SCENARIO_DIR / f"{path.name}{suffix}"
        if candidate.exists():
            return candidate
    return path


def load_scenario(path) -> ScenarioConfig:
    """Read a .json or .toml scenario document, or a bundled scenario by name."""
    path = resolve_scenario_path(path)
    try:
        if path.suffix == '.toml':
            with open(path, 'rb') as f:
                document = tomllib.load(f)
        else:
            document = json.loads(path.read_text(encoding='utf-8'))
    except FileNotFoundError as exc:
        raise ConfigError(f"scenario file not found: {path}") from exc
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return parse_scenario(document)
