import json
import logging
import math
import tomllib
from pathlib import Path
from typing import Dict, Optional

from cone_capacity.core.config.settings import CONFIG_FILE, CONFIG_TEMPLATE

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def load_config(path: Optional[str] = None) -> Dict:
    """Load the application TOML config, falling back to the bundled template."""
    if path is None:
        path = CONFIG_FILE if CONFIG_FILE.exists() else CONFIG_TEMPLATE
        if not path.exists():
            return {}
    with open(path, "rb") as f:
        return tomllib.load(f)


def setup_logging(level: str = "INFO", log_file: Optional[str] = None) -> None:
    """Configure root logging once per process (stream + optional file handler)."""
    handlers = [logging.StreamHandler()]
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.INFO),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True
    )


def _finite_or_null(value):
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {key: _finite_or_null(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite_or_null(item) for item in value]
    return value


def dump_json(payload: Dict) -> str:
    """Stable JSON text: sorted keys, fixed indentation, trailing newline; NaN and inf become null."""
    return json.dumps(_finite_or_null(payload), indent=2, sort_keys=True, allow_nan=False) + "\n"
