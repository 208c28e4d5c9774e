#!/usr/bin/env python3
"""
Command-line front end.

Usage:
    python main.py solve --lambda 2,2 --z 0,1,3,7 --seed 42 --output solve.json
    python main.py verify --input solve.json --lambda 2,2
    python main.py average --lambda 2,2 --z random:3 --F "s1_1"
    python main.py chars --max-size 6 --max-N 3 --K 30
    python main.py roundtrip --lambda 2,1 --z 0,1,3 --count 20

Exit codes: 0 pass, 1 usage error, 2 solver found fewer orbits than expected,
3 an identity check failed.
"""
import argparse
import logging
import sys
from typing import List, Optional

from gaudin import create_app
from gaudin.core.config import build_run_config
from gaudin.core.errors import ConfigError
from gaudin.processors.base import EXIT_USAGE
from gaudin.utils.serialization import dumps_report, write_report

logger = logging.getLogger(__name__)


class UsageParser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; 2 is reserved for count warnings here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common_arguments() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lambda", dest="lam", help="partition, e.g. 2,2")
    common.add_argument("--N", type=int, help="rank (default: number of parts)")
    common.add_argument("--z", help="comma separated complex points (re+imj) or random:<seed>")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output", help="write the JSON report here instead of stdout")
    common.add_argument("--newton-tol", dest="newton_tol", type=float)
    common.add_argument("--dedup-tol", dest="dedup_tol", type=float)
    common.add_argument("--hess-floor", dest="hess_floor", type=float)
    common.add_argument("--check-tol", dest="check_tol", type=float)
    common.add_argument("--starts-multiplier", dest="starts_multiplier", type=int)
    common.add_argument("--retries", type=int)
    common.add_argument("--K", type=int, help="truncation order of q-series")
    common.add_argument("--env-file", dest="env_file", help="path to a .env file")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_arguments()
    parser = UsageParser(
        description="gl_N Gaudin model: Bethe algebra, critical points and spaces of polynomials.",
        epilog="Environment: GAUDIN_THREADS caps parallelism; LOG_LEVEL, LOG_FORMAT=json, LOG_FILE control logging.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=UsageParser)

    sub.add_parser("solve", parents=[common], help="solve the Bethe ansatz equations")

    verify = sub.add_parser("verify", parents=[common], help="run the identity suite on solved orbits")
    verify.add_argument("--input", help="orbits from a previous solve report")
    verify.add_argument("--perturb", type=float, help="shift every Bethe root by this amount before checking")
    verify.add_argument("--u", help="comma separated sample points for the eigenvalue checks")

    average = sub.add_parser("average", parents=[common], help="Bethe vector averaging map v_F")
    average.add_argument("--F", default="1", help="symmetric function, e.g. '2*s1_1^2 - s0_2'")
    average.add_argument("--steps", type=int, help="points on the collision probe")

    chars = sub.add_parser("chars", parents=[common], help="graded characters")
    chars.add_argument("--max-size", dest="max_size", type=int, help="sweep every partition with |lambda| <= this")
    chars.add_argument("--max-N", dest="max_N", type=int, help="with --max-size: at most this many parts")

    roundtrip = sub.add_parser("roundtrip", parents=[common], help="theta/iota round trips")
    roundtrip.add_argument("--count", type=int, help="random nice spaces for iota o theta")

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.lam and getattr(args, "max_size", None) is None:
        parser.error("--lambda is required")

    try:
        router = create_app(args.env_file)
        run = build_run_config(args, router.config)
    except ConfigError as e:
        logger.error("Invalid configuration: %s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    report, code = router.route_request(run)
    if run.output:
        write_report(report, run.output)
        print(f"{run.command}: exit {code}, report written to {run.output}")
    else:
        print(dumps_report(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
