"""Global settings and configuration."""
from pathlib import Path

ROOT_DIR = Path(__file__).parent.parent.parent.parent.parent
ETC_DIR = ROOT_DIR / "etc"
SCENARIO_DIR = ETC_DIR / "scenarios"
CONFIG_FILE = ETC_DIR / "config.toml"
CONFIG_TEMPLATE = ETC_DIR / "config.template.toml"
OUTPUT_DIR = ROOT_DIR / "out"
