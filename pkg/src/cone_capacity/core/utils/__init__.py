from .utils import dump_json, load_config, setup_logging

__all__ = ['dump_json', 'load_config', 'setup_logging']
