# darkcool/cli.py

import argparse
import json
import sys

from darkcool import __version__, ui
from darkcool.commands import darkstate, eigen, run, sweep
from darkcool.core.defaults import EXIT_CODES
from darkcool.core.errors import CoolingError

SUPPORTED_COMMANDS = {
    "run": run.run,
    "sweep": sweep.run,
    "eigen": eigen.run,
    "darkstate": darkstate.run,
}


def _seed(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be a u64, got {text}")
    return value


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog="darkcool",
        description="Dark-state laser cooling of a trapped atom: cycle-map simulator",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON simulation config")
    common.add_argument("--out", required=True, help="output directory")
    common.add_argument("--seed", type=_seed, default=None, help="override the config's rng_seed")
    common.add_argument("--jobs", type=_positive, default=1, help="parallel sweep points")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")

    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("run", parents=[common], help="run one cooling sequence")

    sweep_parser = commands.add_parser("sweep", parents=[common], help="sweep doughnut width or order")
    sweep_parser.add_argument("--sweep", required=True, help="JSON sweep spec")

    eigen_parser = commands.add_parser("eigen", parents=[common], help="eigenstate widths of the trap")
    eigen_parser.add_argument("--count", type=int, default=12, help="number of eigenstates")
    eigen_parser.add_argument("--wavefunctions", action="store_true", help="also write wavefunctions.csv")

    dark_parser = commands.add_parser("darkstate", parents=[common], help="dark-state diagnostics")
    dark_parser.add_argument("--state", type=int, required=True, help="highest eigenstate index")
    dark_parser.add_argument("--tsep", type=float, default=None, help="nu*T_sep in radians")
    return parser


def main(argv=None):
    """Entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which is also our config-error code
        return exc.code if isinstance(exc.code, int) else EXIT_CODES["config"]

    ui.setup_logging(args.verbose)
    command_fn = SUPPORTED_COMMANDS[args.command]
    try:
        return command_fn(args)
    except CoolingError as error:
        report = error.to_dict()
    except OSError as error:
        report = {"error": type(error).__name__, "message": str(error), "exit_code": EXIT_CODES["io"]}
    ui.print_error(report)
    sys.stderr.write(json.dumps(report, sort_keys=True) + "\n")
    return report["exit_code"]


def entry_point():
    """No-arg function for the console script."""
    sys.exit(main())
