"""
Handler functions for the run, sweep and verify-paper subcommands.
"""

import argparse
import logging
from pathlib import Path
from typing import Any

from dotenv import dotenv_values

from app.cli.exception_handlers import EXIT_DECODE, EXIT_OK, exit_code_for_records
from app.models.schemas import ScenarioSpec
from app.services.report_service import report_service
from app.services.scenario_service import scenario_service
from app.utils.exceptions import ValidationError
from app.utils.helpers import parse_int_list

logger = logging.getLogger(__name__)

# CLI flag (and config key) -> ScenarioSpec field
SPEC_KEYS = {
    "scheme": "scheme",
    "K": "K",
    "L": "L",
    "N": "N",
    "M": "M",
    "m": "m",
    "seed": "seed",
    "demands": "demands",
    "profile": "profile",
    "out": "out",
    "multiple": "file_multiple",
    "force": "force",
}
TRUE_VALUES = ("1", "true", "yes", "on")


def read_config_file(path: Path) -> dict[str, Any]:
    """
    Flat key=value scenario file; keys mirror the CLI flags.

    Raises:
        ValidationError: If the file is missing or has unknown keys
    """
    if not path.is_file():
        raise ValidationError(message="Config file not found", detail=str(path))
    values = {k: v for k, v in dotenv_values(path).items() if v is not None and v != ""}
    unknown = sorted(set(values) - set(SPEC_KEYS) - {"servers"})
    if unknown:
        raise ValidationError(
            message="Unknown keys in config file",
            detail=f"{path}: {', '.join(unknown)}; allowed: {', '.join(SPEC_KEYS)}, servers"
        )
    if "force" in values:
        values["force"] = str(values["force"]).lower() in TRUE_VALUES
    return values


def merged_options(args: argparse.Namespace) -> dict[str, Any]:
    """Config file values overridden by every flag given on the command line."""
    options = read_config_file(Path(args.config)) if getattr(args, "config", None) else {}
    for key in (*SPEC_KEYS, "servers"):
        value = getattr(args, key, None)
        if value is not None and value is not False:
            options[key] = value
    return options


def load_spec(args: argparse.Namespace) -> ScenarioSpec:
    """
    Build the validated ScenarioSpec for a subcommand.

    Raises:
        ValidationError: If required keys are missing
        pydantic.ValidationError: If a value is rejected by the schema
    """
    options = merged_options(args)
    missing = [key for key in ("scheme", "K", "N") if key not in options]
    if missing:
        raise ValidationError(
            message="Missing scenario parameters",
            detail=f"set {', '.join('--' + k for k in missing)} or provide them in --config"
        )
    return ScenarioSpec(**{SPEC_KEYS[k]: v for k, v in options.items() if k in SPEC_KEYS})


def handle_run(args: argparse.Namespace) -> int:
    """Run one scenario and report it."""
    spec = load_spec(args)
    record = scenario_service.run_safely(spec)
    report_service.emit_report([record], spec.out)
    return exit_code_for_records([record])


def handle_sweep(args: argparse.Namespace) -> int:
    """Run every corner M of the chosen scheme, optionally for several L."""
    spec = load_spec(args)
    servers = merged_options(args).get("servers")
    try:
        servers = list(parse_int_list(servers)) if servers else None
    except ValueError as e:
        raise ValidationError(message="servers must be a list of integers", detail=str(e))
    records = scenario_service.sweep_memory(spec, servers)
    report_service.emit_report(records, spec.out)
    return exit_code_for_records(records)


def handle_verify(args: argparse.Namespace) -> int:
    """Run the worked-example table."""
    rows = scenario_service.verify_examples(seed=args.seed or 0)
    if report_service.verification_table(rows):
        logger.info("✅ All worked examples reproduced")
        return EXIT_OK
    logger.error("❌ Some worked examples failed")
    return EXIT_DECODE
