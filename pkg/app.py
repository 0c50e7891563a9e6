"""Command-line entry point: python app.py <subcommand> [flags]."""
import argparse
import io
import sys
from typing import Any, Callable, Dict, List, Optional, TextIO

from pydantic import ValidationError

from config.experiment import ExperimentConfig, load_config_file, resolve_config
from graph.state import initial_state
from graph.workflow import race_workflow
from stages.analysis_stage import analysis_stage
from stages.report_stage import COV_COLUMNS, MC_COLUMNS
from ui.writers import write_results
from utils.errors import RaceError
from utils.logger import set_level, setup_logger

logger = setup_logger(__name__)

PROG = "race"

# config fields whose flag is not simply --field-name
FLAG_NAMES = {
    "constant_c": "--c",
    "theta_point": "--theta",
    "tuple_spec": "--tuple",
    "subset_i": "--I",
    "subset_j": "--J",
    "events": "--event",
}


class RaceArgumentParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors are one 'race: error: ...' line and exit code 2."""

    def error(self, message: str):
        self.exit(2, f"{PROG}: error: {message}\n")


def flag_name(field: str) -> str:
    return FLAG_NAMES.get(field, "--" + field.replace("_", "-"))


def _common_flags() -> argparse.ArgumentParser:
    common = RaceArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file; flags override it")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--workers", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--log-level", dest="log_level",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    return common


def _contestant_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--q", type=int, help="modulus")
    p.add_argument("--residues", help="comma-separated residues, e.g. 1,3")
    p.add_argument("--tuple", dest="tuple_spec", help="all | first:n | biased:k,n")


def _zero_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--zero-file", dest="zero_file")
    p.add_argument("--synthetic-count", dest="synthetic_count", type=int,
                   help="synthesize this many ordinates per character")


def build_parser() -> argparse.ArgumentParser:
    """The race argument parser with one subparser per subcommand."""
    common = _common_flags()
    parser = RaceArgumentParser(prog=PROG, description="Prime number race simulator and validator.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("zeros", parents=[common], help="validate, synthesize or serialize zero data")
    p.add_argument("--q", type=int)
    _zero_flags(p)
    p.add_argument("--builtin", action="store_true", help="use the built-in real zero sample")

    p = sub.add_parser("cov", parents=[common], help="correlation matrix of a residue tuple")
    _contestant_flags(p)
    _zero_flags(p)

    p = sub.add_parser("mc", parents=[common], help="Monte Carlo ordering probabilities")
    _contestant_flags(p)
    _zero_flags(p)
    p.add_argument("--model", choices=["x", "z"])
    p.add_argument("--event", dest="events", action="append",
                   help="full:i1,...,in | leader:i | firstk:k (repeatable)")
    p.add_argument("--samples", type=int)
    p.add_argument("--rho", type=float, help="equicorrelated z model without zero data")
    p.add_argument("--n", type=int)
    p.add_argument("--no-shifts", dest="no_shifts", action="store_true")

    p = sub.add_parser("sieve", parents=[common], help="exact logarithmic densities by sieving")
    _contestant_flags(p)
    p.add_argument("--event", dest="events", action="append")
    p.add_argument("--x", type=float, help="upper limit X")
    p.add_argument("--trace", help="write a gzip per-prime trace to this path")

    p = sub.add_parser("predict", parents=[common], help="evaluate an error-term bound")
    p.add_argument("--kind")
    for name in ("n", "q", "k"):
        p.add_argument(f"--{name}", type=int)
    for name in ("r1-sum", "rij-sum", "epsilon", "epsilon1", "A", "B", "theta", "rho"):
        p.add_argument(f"--{name}", dest=name.replace("-", "_"), type=float)
    p.add_argument("--thresholds", help="comma-separated thresholds for lishao/hybrid")
    p.add_argument("--c", dest="constant_c", type=float, help="implicit constant (default 1)")

    p = sub.add_parser("check", parents=[common], help="compare a quantity with its oracle")
    p.add_argument("--check")
    _contestant_flags(p)
    _zero_flags(p)
    for name in ("n", "k", "samples", "trials"):
        p.add_argument(f"--{name}", type=int)
    for name in ("a", "epsilon", "A", "rho", "r12"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--I", dest="subset_i", help="1-based index subset, e.g. 1-3")
    p.add_argument("--J", dest="subset_j")

    p = sub.add_parser("harmonic", parents=[common], help="G(theta) and its pair-sum bound")
    p.add_argument("--Q", type=int)
    p.add_argument("--x", type=float)
    p.add_argument("--R", type=int)
    p.add_argument("--S", type=int)
    p.add_argument("--offset", type=float)
    p.add_argument("--theta", dest="theta_point", type=float, help="evaluate G at one point")

    return parser


def _run_pipeline(config: ExperimentConfig, stream: TextIO) -> None:
    state = race_workflow.invoke(initial_state(config))
    if state.get("error"):
        raise RaceError(state["error"])
    columns = MC_COLUMNS if config.subcommand == "mc" else COV_COLUMNS
    write_results(stream, state["rows"], columns, config, state.get("notes", []))


def _run_analysis(config: ExperimentConfig, stream: TextIO) -> None:
    if config.subcommand == "zeros":
        table = analysis_stage.zeros(config, stream)
        if table is None:
            return
    else:
        table = getattr(analysis_stage, config.subcommand)(config)
    rows, columns, notes = table
    write_results(stream, rows, columns, config, notes)


HANDLERS: Dict[str, Callable[[ExperimentConfig, TextIO], None]] = {
    "cov": _run_pipeline,
    "mc": _run_pipeline,
    "zeros": _run_analysis,
    "sieve": _run_analysis,
    "predict": _run_analysis,
    "check": _run_analysis,
    "harmonic": _run_analysis,
}


def _describe_validation(error: ValidationError) -> str:
    first = error.errors()[0]
    field = str(first["loc"][0]) if first.get("loc") else "config"
    return f"{flag_name(field)}: {first['msg']}"


def _fail(message: str) -> int:
    sys.stderr.write(f"{PROG}: error: {message}\n")
    return 2


def run(argv: Optional[List[str]] = None) -> int:
    """Parse argv, run one subcommand and write its output; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    flags: Dict[str, Any] = {k: v for k, v in vars(args).items() if k not in ("config", "log_level")}
    if args.log_level:
        set_level(args.log_level)

    try:
        file_values = load_config_file(args.config) if args.config else None
        config = resolve_config(file_values, flags)
        logger.info(f"Running {config.subcommand}")
        buffer = io.StringIO()
        HANDLERS[config.subcommand](config, buffer)
        if config.out:
            with open(config.out, "w", encoding="utf-8", newline="") as f:
                f.write(buffer.getvalue())
            logger.info(f"Output written to {config.out}")
        else:
            sys.stdout.write(buffer.getvalue())
    except ValidationError as e:
        return _fail(_describe_validation(e))
    except (RaceError, OSError) as e:
        logger.error(f"{type(e).__name__}: {str(e)}")
        return _fail(str(e))
    except ValueError as e:
        # malformed flag values that reach the parsers in utils.helpers
        return _fail(str(e))
    return 0


def main():
    """Main application function."""
    sys.exit(run())


if __name__ == "__main__":
    main()
