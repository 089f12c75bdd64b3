import time
from typing import Dict, List, Optional


class StageTracker:
    """Per-iteration record of a continuation Newton solve"""

    def __init__(self):
        self.iterations: List[Dict] = []
        self.stages: List[Dict] = []
        self._stage_start: Optional[float] = None
        self.start_time = time.perf_counter()

    def begin_stage(self, eps: float, energy: float, grad_norm: float):
        """Open a new continuation stage"""
        self._stage_start = time.perf_counter()
        self.stages.append({
            'eps': eps,
            'energies': [energy],
            'grad_norms': [grad_norm],
            'iterations': 0,
            'stop': None,
            'wall_time': 0.0
        })

    def add_iteration(self, energy: float, grad_norm: float, step: float, backtracks: int) -> Dict:
        """Record one accepted Newton step in the current stage"""
        stage = self.stages[-1]
        stage['iterations'] += 1
        stage['energies'].append(energy)
        stage['grad_norms'].append(grad_norm)

        record = {
            'eps': stage['eps'],
            'iteration': stage['iterations'],
            'energy': energy,
            'grad_norm': grad_norm,
            'step': step,
            'backtracks': backtracks
        }
        self.iterations.append(record)
        return record

    def end_stage(self, stop: Optional[str] = None):
        """Close the current stage, recording why its Newton loop ended"""
        if self.stages:
            self.stages[-1]['stop'] = stop
        if self.stages and self._stage_start is not None:
            self.stages[-1]['wall_time'] = time.perf_counter() - self._stage_start
        self._stage_start = None

    def total_iterations(self) -> int:
        return sum(stage['iterations'] for stage in self.stages)

    def final_grad_norm(self) -> float:
        if not self.stages:
            return float('nan')
        return self.stages[-1]['grad_norms'][-1]

    def wall_time(self) -> float:
        return time.perf_counter() - self.start_time
