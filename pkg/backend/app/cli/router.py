"""
Main CLI router.
This file aggregates all subcommands and provides the top-level parser.
"""

import argparse

from app.cli.routes.scenarios import register as register_scenarios
from app.config import settings
from app.utils.exceptions import ValidationError


class CliParser(argparse.ArgumentParser):
    """Parser whose usage errors are parameter rejections."""

    def error(self, message: str):
        raise ValidationError(message="Invalid command line", detail=message)


def build_parser() -> CliParser:
    parser = CliParser(
        prog="cachesim",
        description=f"{settings.app_name}: placement, delivery and decoding over multi-server networks",
    )
    parser.add_argument("--version", action="version", version=settings.version)
    parser.add_argument("--log-level", help="override CACHESIM_LOG_LEVEL")
    subparsers = parser.add_subparsers(dest="command", required=True)

    # Include all route modules
    register_scenarios(subparsers)
    return parser


__all__ = ["build_parser"]
