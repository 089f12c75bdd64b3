from .run_tracker import RunTracker
from .stage_tracker import StageTracker

__all__ = ['RunTracker', 'StageTracker']
