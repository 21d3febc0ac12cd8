"""
fracmat command line: run one TaskSpec and emit its report.

Exit status:
    0  every check passed
    1  at least one check missed its tolerance
    2  the TaskSpec was invalid or the library raised a domain error
"""

from __future__ import annotations

import argparse
import sys
import uuid
from pathlib import Path
from typing import TYPE_CHECKING

from fracmat import __version__
from fracmat.errors import FracmatError, TaskSpecError
from fracmat.logging_config import get_logger, set_task_id, setup_logging
from fracmat.observability import get_metrics
from fracmat.tasks import emit, load_task_spec, run

if TYPE_CHECKING:
    from collections.abc import Sequence

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracmat",
        description="Matrix-order Riemann-Liouville differintegrals: apply, compose, verify",
        epilog=(
            "Examples:\n"
            "  fracmat --spec task.json                      # JSON report on stdout\n"
            "  fracmat --spec task.json --format csv         # flattened grid values\n"
            "  fracmat --spec task.json --out report.json    # write to a file\n"
            "\n"
            "Environment:\n"
            "  FRACMAT_TOL_SCALE   relax every comparison tolerance by this factor (>= 1)\n"
            "  FRACMAT_MAX_WORKERS thread pool size for per-point evaluation\n"
            "  FRACMAT_LOG_LEVEL   DEBUG, INFO, WARNING (default) or ERROR\n"
        ),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--spec", metavar="PATH", required=True, help="TaskSpec JSON file")
    parser.add_argument("--out", metavar="PATH", help="Write the report here instead of stdout")
    parser.add_argument(
        "--format",
        choices=["json", "csv"],
        default="json",
        help="Report format (default: json)",
    )
    parser.add_argument(
        "--timing",
        action="store_true",
        help="Include per-operation timings in the JSON report",
    )
    parser.add_argument(
        "--verbose",
        action="store_true",
        help="Log progress and an operation summary to stderr",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point; returns the process exit status."""
    args = build_parser().parse_args(argv)
    setup_logging(level="INFO" if args.verbose else None, verbose=args.verbose)

    set_task_id(uuid.uuid4().hex[:12])
    try:
        spec = load_task_spec(args.spec)
        logger.info("Running %s task from %s", spec.task, args.spec)
        report = run(spec, include_timing=args.timing)
        text = emit(report, args.format)
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8", newline="")
        else:
            sys.stdout.write(text)
            sys.stdout.flush()
    except TaskSpecError as e:
        logger.error("Invalid TaskSpec: %s", e)
        return EXIT_ERROR
    except FracmatError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_ERROR
    except (OSError, ValueError) as e:
        logger.error("%s", e)
        return EXIT_ERROR
    finally:
        if args.verbose:
            logger.info("%s", get_metrics().get_summary())
        set_task_id(None)

    return EXIT_OK if report.passed else EXIT_FAILED_CHECK


if __name__ == "__main__":
    sys.exit(main())
