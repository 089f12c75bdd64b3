from .orchestrator import ScenarioOrchestrator, fitted_orders

__all__ = ["ScenarioOrchestrator", "fitted_orders"]
