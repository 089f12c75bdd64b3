import logging
from pathlib import Path
from typing import Dict, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel

from cone_capacity.components.identity_audit import p_function_values
from cone_capacity.components.p_energy_solver import PotentialField, boundary_gradient_on_sigma
from cone_capacity.components.reference_solutions import radial_model
from cone_capacity.core.utils import dump_json

# RFC 4180 line endings
CSV_LINE_TERMINATOR = "\r\n"


class ReportStorage:
    def __init__(self, directory):
        """Initialize storage rooted at an output directory"""
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.logger = logging.getLogger('ReportStorage')

    def path(self, name: str) -> Path:
        return self.directory / name

    def write_json(self, name: str, payload, timing: Optional[Dict] = None) -> Path:
        """Write a report as sorted, indented UTF-8 JSON; timing goes in its own top-level key"""
        if isinstance(payload, BaseModel):
            payload = payload.model_dump(mode='json', by_alias=True)
        payload = dict(payload)
        if timing is not None:
            payload['timing'] = timing
        target = self.path(name)
        target.write_text(dump_json(payload), encoding='utf-8')
        self.logger.info(f"Wrote {target}")
        return target

    def write_table(self, name: str, frame: pd.DataFrame) -> Path:
        target = self.path(name)
        frame.to_csv(target, index=False, lineterminator=CSV_LINE_TERMINATOR, float_format='%.12g')
        self.logger.info(f"Wrote {target} ({len(frame)} rows)")
        return target

    def write_sigma_profile(self, field: PotentialField, margin_theta=None, margin=None) -> Path:
        """theta vs |grad u| on Sigma, with the curvature margin interpolated onto the same angles"""
        recovered = boundary_gradient_on_sigma(field)
        frame = pd.DataFrame({
            'theta': recovered.theta,
            'g': field.mesh.curve.g(recovered.theta),
            'grad_norm': recovered.magnitude,
        })
        if margin is not None:
            frame['curvature_margin'] = np.interp(recovered.theta, margin_theta, margin)
        return self.write_table('sigma_profile.csv', frame)

    def write_ray_profile(self, field: PotentialField, ray: int = 0) -> Path:
        """u along one ray, next to the radial model of the inner radius"""
        rho, u = field.ray(ray)
        mesh = field.mesh
        frame = pd.DataFrame({'rho': rho, 'u': u})
        if mesh.curve.is_sphere:
            frame['model'] = radial_model(rho, mesh.curve.radius, mesh.cone.n, field.p)
        frame.insert(0, 'theta', mesh.ray_theta[ray])
        return self.write_table('ray_profile.csv', frame)

    def write_pfunction(self, field: PotentialField) -> Path:
        """P at element centers"""
        mesh = field.mesh
        frame = pd.DataFrame({
            'rho': mesh.center_rho,
            'theta': mesh.center_theta,
            'layer': mesh.element_layer,
            'sector': mesh.element_sector,
            'P': p_function_values(field),
        })
        return self.write_table('pfunction.csv', frame)
