"""
Command-line layer: argument parsing, subcommand handlers and exit codes.
"""

from app.cli.router import build_parser

__all__ = ["build_parser"]
