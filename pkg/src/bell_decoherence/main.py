"""
Main entry point for Bell Decoherence.
Command-line runner: scenario execution, trace comparison and presets.
"""

import argparse
import json
import sys
from typing import List, Optional

from .core import __version__
from .core.exceptions import BellDecoherenceError, ConfigError
from .core.solver_controller import SolverController, create_default_controller
from .core.trace_processor import TraceProcessor
from .utils.config import ConfigManager
from .utils.logger import setup_logging


class BellDecoherenceApp:
    """Main application class that coordinates all components."""

    def __init__(self, log_level: str = "INFO", log_file: Optional[str] = None):
        self.logger = setup_logging(log_level, log_file)
        self.config_manager = ConfigManager()
        self.trace_processor = TraceProcessor()
        self.controller: SolverController = create_default_controller()

    def run(self, source: str, out: Optional[str] = None, threads: int = 1) -> int:
        scenario = self.config_manager.load_config(source)
        validation = self.config_manager.validate_config()
        for warning in validation["warnings"]:
            self.logger.warning(warning)
        if not validation["valid"]:
            raise ConfigError("; ".join(validation["errors"]))

        trace = self.controller.run_scenario(scenario, n_jobs=threads)
        if out is None:
            sys.stdout.write(self.trace_processor.to_csv_text(trace))
        else:
            self.trace_processor.write_csv(trace, out)
        self.logger.info(f"Scenario '{source}' finished: {len(trace)} rows")
        return 0

    def compare(self, paths: List[str], tol: Optional[float] = None, across_states: bool = False) -> int:
        report = self.trace_processor.compare(paths, tol=tol, across_states=across_states)
        sys.stdout.write(report.to_text())
        self.trace_processor.check_tolerance(report)
        return 0

    def presets(self, action: str, name: Optional[str] = None) -> int:
        if action == "list":
            for preset in self.config_manager.list_presets():
                sys.stdout.write(f"{preset}\n")
            return 0
        if name is None:
            raise ConfigError("presets show needs a preset name")
        sys.stdout.write(json.dumps(self.config_manager.get_preset(name), indent=2) + "\n")
        return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bell-decoherence",
        description="Entanglement decay of two qubits under correlated Gaussian noise",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    parser.add_argument("--log-file", default=None)
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run a scenario file or preset")
    run.add_argument("config", help="scenario JSON file or preset name (fig1 ... fig6)")
    run.add_argument("--out", default=None, help="CSV output path (stdout if omitted)")
    run.add_argument("--threads", type=int, default=1, help="worker threads for Monte Carlo batches")

    compare = commands.add_parser("compare", help="compare methods across trace files")
    compare.add_argument("traces", nargs="+")
    compare.add_argument("--tol", type=float, default=None, help="maximum allowed absolute deviation")
    compare.add_argument("--across-states", action="store_true",
                         help="also compare series of different initial states")

    presets = commands.add_parser("presets", help="list or show bundled scenarios")
    presets.add_argument("action", choices=["list", "show"])
    presets.add_argument("name", nargs="?")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    app = BellDecoherenceApp(args.log_level, args.log_file)
    try:
        if args.command == "run":
            if args.threads < 1:
                raise ConfigError("--threads must be at least 1")
            return app.run(args.config, out=args.out, threads=args.threads)
        if args.command == "compare":
            return app.compare(args.traces, tol=args.tol, across_states=args.across_states)
        return app.presets(args.action, args.name)
    except BellDecoherenceError as e:
        app.logger.error(str(e))
        sys.stderr.write(f"error: {e}\n")
        return e.exit_code
    except (FileNotFoundError, ValueError) as e:
        app.logger.error(str(e))
        sys.stderr.write(f"error: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
