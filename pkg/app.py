"""
Main entry point for the lethargy application.
Parses the command line, initializes the controller and prints or writes the report.

Exit codes: 0 pass, 1 fail, 2 usage or parse error, 3 solver error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from controller.app_controller import AppController
from controller.construction_controller import RunFlags
from model.errors import LethargyError, ProblemParseError
from model.lethargy_constructor import PROFILES
from model.oracle import LEMMAS
from model.problem_io import report_json, write_report
from view.report_view import render_report

logger = logging.getLogger("lethargy")

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2, 3


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def _pairs(text: str) -> List[Tuple[float, float]]:
    """'u:v,u:v' -> [(u, v), ...]"""
    try:
        return [tuple(float(part) for part in item.split(":")) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected pairs like '1.5:1,2:1', got '{text}'")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-solve", type=float, default=None, help="Solver tolerance")
    common.add_argument("--tol-root", type=float, default=None, help="Root-finding tolerance")
    common.add_argument("--tol-verify", type=float, default=None, help="Verification tolerance")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--transcript", action="store_true", help="Include the full construction transcript")
    common.add_argument("--out", type=Path, default=None, help="Write the JSON report (or generated problem) here")
    common.add_argument("--json", action="store_true", help="Print the JSON report instead of tables")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")

    parser = argparse.ArgumentParser(prog="lethargy", description="Bernstein lethargy constructions in finite dimensions")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("construct", "Build x with rho(x, Y_k) = d_k"),
        ("witness", "Witness vectors attaining the distance to each subspace"),
        ("cauchy", "Gap and tail estimates over growing prefixes"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("problem")
        if name == "cauchy":
            p.add_argument("--n-max", type=int, default=None)

    p = sub.add_parser("verify", parents=[common], help="Residual table of a candidate x")
    p.add_argument("problem")
    p.add_argument("--x", type=_float_list, default=None)

    p = sub.add_parser("finite", parents=[common], help="Finite-chain construction from a seed vector z")
    p.add_argument("problem")
    p.add_argument("--z", type=_float_list, default=None)

    p = sub.add_parser("qseq", parents=[common], help="q-sequence on the first two subspaces")
    p.add_argument("problem")
    p.add_argument("--pairs", type=_pairs, default=None)

    p = sub.add_parser("james", parents=[common], help="Norm attainment through a kernel chain")
    p.add_argument("--functional", type=_float_list, required=True)
    p.add_argument("--p", default="2")
    p.add_argument("--d-tail", type=_float_list, default=[])

    p = sub.add_parser("gen", parents=[common], help="Generate a random-chain problem file")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--dims", type=_int_list, required=True)
    p.add_argument("--p", default="2")
    p.add_argument("--profile", choices=PROFILES, default=None)

    p = sub.add_parser("audit", parents=[common], help="Randomized lemma audit")
    p.add_argument("--lemma", choices=LEMMAS, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--p", default="2")
    p.add_argument("--dim", type=int, default=6)
    return parser


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def _flags(args: argparse.Namespace) -> RunFlags:
    fields = {k: v for k, v in vars(args).items() if k in RunFlags.model_fields and v is not None}
    return RunFlags(**fields)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the application.

    Args:
        argv: Arguments without the program name (sys.argv[1:] when None)

    Returns:
        Process exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_PASS

    controller = AppController()
    level = args.log_level or controller.app_state.log_level
    configure_logging(level)
    controller.update_app_state(log_level=level.upper())

    try:
        report = controller.run(args.command, getattr(args, "problem", None), _flags(args))
    except ProblemParseError as e:
        logger.error("%s", e)
        for fe in e.field_errors:
            logger.error("  %s: %s", fe["field"], fe["message"])
        return e.exit_code
    except LethargyError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return e.exit_code
    except ValueError as e:
        logger.error("invalid input: %s", e)
        return EXIT_USAGE

    if args.command == "gen":
        problem_text = report.details["problem"]
        if args.out:
            args.out.parent.mkdir(parents=True, exist_ok=True)
            args.out.write_text(problem_text, encoding="utf-8")
            logger.info("wrote problem to %s", args.out)
        else:
            sys.stdout.write(problem_text)
        return EXIT_PASS

    if args.out:
        write_report(report, args.out)
        logger.info("wrote report to %s", args.out)
    sys.stdout.write(report_json(report) if args.json else render_report(report))
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
