import argparse
import logging
import sys
from pathlib import Path

from cone_capacity.core.config.settings import OUTPUT_DIR
from cone_capacity.core.errors import (
    ConeCapacityError,
    ConfigError,
    InadmissibleCurve,
    InvalidArgument,
    SolverError,
)
from cone_capacity.core.tracking import RunTracker
from cone_capacity.core.utils import load_config, setup_logging
from cone_capacity.models.config import load_scenario, resolve_scenario_path
from cone_capacity.pipeline import ScenarioOrchestrator

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_AUDIT = 4

COMMANDS = ('solve', 'verify', 'geometry', 'study', 'model')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='cone-capacity',
        description='p-capacitary potentials of sector-like domains in convex cones'
    )
    parser.add_argument('command', choices=COMMANDS, help='What to run')
    parser.add_argument('--config', type=str, required=True, help='Scenario file (.json or .toml) or a bundled scenario name')
    parser.add_argument('--out', type=str, default=None, help='Output directory')
    parser.add_argument('--deterministic', action='store_true', help='Fixed-order parallel reductions')
    parser.add_argument('--threads', type=int, default=None, help='Assembly threads')
    parser.add_argument('--quiet', action='store_true', help='Only log warnings and errors')
    parser.add_argument('--app-config', type=str, default=None, help='Application TOML config')
    return parser


def _apply_overrides(scenario, args, app_config):
    solver_updates = {}
    if args.deterministic:
        solver_updates['deterministic'] = True
    threads = args.threads if args.threads is not None else app_config.get('solver', {}).get('threads')
    if threads is not None:
        if threads < 1:
            raise InvalidArgument(f"--threads must be positive, got {threads}")
        solver_updates['threads'] = threads
    if solver_updates:
        scenario = scenario.model_copy(update={'solver': scenario.solver.model_copy(update=solver_updates)})
    return scenario


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    app_config = load_config(args.app_config)
    logging_config = app_config.get('logging', {})
    setup_logging('WARNING' if args.quiet else logging_config.get('level', 'INFO'),
                  logging_config.get('log_file') or None)
    logger = logging.getLogger('cone-capacity')

    output_dir = None
    tracker = None
    status = EXIT_OK
    try:
        config_path = resolve_scenario_path(args.config)
        scenario = _apply_overrides(load_scenario(config_path), args, app_config)
        output_dir = Path(
            args.out
            or scenario.output.directory
            or app_config.get('output', {}).get('directory')
            or OUTPUT_DIR
        )
        tracker = RunTracker(args.command, output_dir / 'runs.jsonl')
        orchestrator = ScenarioOrchestrator(scenario, output_dir, config_path.parent, tracker)

        if args.command == 'geometry':
            orchestrator.geometry_only()
        elif args.command == 'study':
            orchestrator.sweep_study()
        elif args.command == 'model':
            orchestrator.model()
        else:
            report = orchestrator.run_scenario(verify=args.command == 'verify')
            status = report.exit_status
            if status == EXIT_AUDIT:
                logger.error(f"Audit failed: {'; '.join(report.audit.failures)}")
    except (ConfigError, InadmissibleCurve, InvalidArgument) as exc:
        logger.error(f"Invalid configuration: {exc}")
        status = EXIT_CONFIG
    except SolverError as exc:
        logger.error(f"Solver failed: {exc}")
        status = EXIT_SOLVER
    except ConeCapacityError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        status = EXIT_AUDIT if args.command == 'verify' else EXIT_SOLVER
    finally:
        if tracker is not None:
            tracker.save_session(status)
    if status == EXIT_OK:
        logger.info(f"{args.command} finished, artifacts in {output_dir}")
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
