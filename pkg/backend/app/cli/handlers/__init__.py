"""
CLI handlers package.
Contains the logic behind each subcommand.
"""

from app.cli.handlers.scenario_handlers import (
    handle_run,
    handle_sweep,
    handle_verify,
    load_spec,
)

__all__ = [
    "handle_run",
    "handle_sweep",
    "handle_verify",
    "load_spec",
]
