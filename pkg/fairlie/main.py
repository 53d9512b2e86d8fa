import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from fairlie.commands import generate, lies, robustness, solve
from fairlie.config import settings
from fairlie.errors import FairlieError, InstanceSyntaxError, InstanceValidationError
from fairlie.services.report_service import report_service

logging.basicConfig(
    level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[
        logging.StreamHandler()
    ]
)

logger = logging.getLogger(__name__)

COMMANDS = (solve, lies, robustness, generate)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairlie",
        description="Strategic lying under egalitarian (max-min) allocation of indivisible goods",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.ARTIFACT_VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in COMMANDS:
        module.register(subparsers)
    return parser


def run_command(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        report = args.handler(args)
        path = report_service.write(report, args.out)
    except InstanceSyntaxError as e:
        logger.error(f"[CLI] {getattr(args, 'instance', '')}: {e}")
        return EXIT_FAILURE
    except InstanceValidationError as e:
        for violation in e.violations:
            logger.error(f"[CLI] {violation.message}")
        return EXIT_FAILURE
    except (FairlieError, ValidationError) as e:
        logger.error(f"[CLI] {args.command}: {e}")
        return EXIT_FAILURE
    except OSError as e:
        logger.error(f"[CLI] {args.command}: {e}")
        return EXIT_FAILURE
    except Exception as e:
        logger.error(f"[CLI] {args.command} failed: {e}", exc_info=True)
        raise

    logger.info(f"[CLI] {args.command} report: {path}")
    return EXIT_OK


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
