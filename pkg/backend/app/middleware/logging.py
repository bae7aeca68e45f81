"""
Logging middleware for scenario run tracking.
"""

import logging
from collections.abc import Callable
from time import time

from app.models.schemas import RunRecord, ScenarioSpec

logger = logging.getLogger(__name__)


class LoggingMiddleware:
    """Times every scenario run and logs one line per run."""

    def dispatch(self, spec: ScenarioSpec, call_next: Callable[[ScenarioSpec], RunRecord]) -> RunRecord:
        """Run the scenario, attach its wall time and log the outcome."""
        start_time = time()

        record = call_next(spec)

        process_time = time() - start_time
        record.wall_time = process_time

        # Symbol by outcome
        if record.failure_kind is None:
            symbol = "📨"
        elif record.failure_kind == "rejected":
            symbol = "⚠️"
        else:
            symbol = "❌"

        logger.info(
            f"{symbol} {spec.label()} - "
            f"Outcome: {record.failure_kind or 'ok'} - "
            f"Process time: {process_time:.3f}s"
        )
        return record
