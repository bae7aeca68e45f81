"""
Exit-code mapping for the command line.
Provides consistent exit codes and log lines across all subcommands.
"""

import logging

from pydantic import ValidationError as PydanticValidationError

from app.models.schemas import RunRecord
from app.utils.exceptions import (
    AppException,
    DecodeFailure,
    FieldExhaustedError,
    ValidationError,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DECODE = 2
EXIT_REJECTED = 3
EXIT_FIELD_EXHAUSTED = 4

FAILURE_EXIT_CODES = {
    "decode": EXIT_DECODE,
    "rejected": EXIT_REJECTED,
    "field_exhausted": EXIT_FIELD_EXHAUSTED,
    "error": EXIT_ERROR,
}


def app_exception_handler(exc: AppException) -> int:
    """
    Handle custom application exceptions.

    Args:
        exc: Application exception

    Returns:
        int: Process exit code
    """
    exit_code = EXIT_ERROR

    if isinstance(exc, ValidationError):
        exit_code = EXIT_REJECTED
    elif isinstance(exc, FieldExhaustedError):
        exit_code = EXIT_FIELD_EXHAUSTED
    elif isinstance(exc, DecodeFailure):
        exit_code = EXIT_DECODE

    # Use appropriate symbol based on severity
    if exit_code == EXIT_ERROR:
        log_symbol = "🔥"
        log_level = logger.critical
    elif exit_code == EXIT_REJECTED:
        log_symbol = "⚠️"
        log_level = logger.warning
    else:
        log_symbol = "❌"
        log_level = logger.error

    log_level(
        f"{log_symbol} {type(exc).__name__}: {exc.message} | "
        f"Detail: {exc.detail} | "
        f"Exit: {exit_code}"
    )
    return exit_code


def validation_exception_handler(exc: PydanticValidationError) -> int:
    """Handle pydantic errors raised while building a ScenarioSpec."""
    for error in exc.errors():
        loc = " -> ".join(str(x) for x in error["loc"]) or "spec"
        logger.warning(f"⚠️  Invalid parameter {loc}: {error['msg']}")
    return EXIT_REJECTED


def generic_exception_handler(exc: Exception) -> int:
    """Handle unexpected exceptions."""
    logger.critical(f"🔥 UNEXPECTED ERROR: {exc}", exc_info=True)
    return EXIT_ERROR


def handle_exception(exc: Exception) -> int:
    """Dispatch an exception to its handler and return the exit code."""
    if isinstance(exc, AppException):
        return app_exception_handler(exc)
    if isinstance(exc, PydanticValidationError):
        return validation_exception_handler(exc)
    return generic_exception_handler(exc)


def exit_code_for_records(records: list[RunRecord]) -> int:
    """Exit code of the first failed record in report order, 0 if none failed."""
    for record in records:
        if record.failure_kind:
            return FAILURE_EXIT_CODES[record.failure_kind]
    return EXIT_OK
