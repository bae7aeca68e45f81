"""
Command-line entry point: `python -m app.main <run|sweep|verify-paper> ...`.
"""

import logging
import sys

from app.cli.exception_handlers import handle_exception
from app.cli.router import build_parser
from app.config import settings

logger = logging.getLogger(__name__)


def configure_logging(level: str | None = None) -> None:
    """Logs go to standard error; reports and summaries use standard output."""
    logging.basicConfig(
        level=getattr(logging, (level or settings.log_level).upper(), logging.INFO),
        format=settings.log_format,
        stream=sys.stderr,
        force=True,
    )


def main(argv: list[str] | None = None) -> int:
    """
    Parse the command line, run the subcommand and return its exit code:
    0 pass, 2 decode failure, 3 parameter rejection, 4 field exhausted, 1 other.
    """
    configure_logging()
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        if args.log_level:
            configure_logging(args.log_level)
        logger.info(f"🚀 {settings.app_name} {settings.version}: {args.command}")
        return args.func(args)
    except Exception as e:
        return handle_exception(e)


if __name__ == "__main__":
    sys.exit(main())
