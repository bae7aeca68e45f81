"""
Service layer for CSV reports and console summaries.
"""

import csv
import io
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, TextIO

from app.models.schemas import RunRecord, VerificationRow
from app.utils.exceptions import ReportError

logger = logging.getLogger(__name__)

CSV_COLUMNS = (
    "scheme", "K", "L", "N", "M_num", "M_den", "F_bits", "m", "measured_slots",
    "formula_delay_num", "formula_delay_den", "lower_bound_num", "lower_bound_den",
    "gap_num", "gap_den", "decode_ok", "seed",
)


def _pair(value: Optional[Fraction]) -> tuple[str, str]:
    if value is None:
        return "", ""
    return str(value.numerator), str(value.denominator)


class ReportService:
    """Serializes run records; rationals are written as numerator/denominator pairs."""

    def row(self, record: RunRecord) -> list[str]:
        spec, report = record.spec, record.report
        return [
            spec.scheme,
            str(spec.K),
            str(spec.L),
            str(spec.N),
            *_pair(record.M),
            str(record.F_bits) if record.F_bits else "",
            str(spec.m),
            "" if report is None or report.measured_slots is None else str(report.measured_slots),
            *_pair(report.formula_delay if report else None),
            *_pair(report.lower_bound if report else None),
            *_pair(report.gap_ratio if report else None),
            "true" if record.decode_ok else "false",
            str(spec.seed),
        ]

    def render_csv(self, records: list[RunRecord]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for record in records:
            writer.writerow(self.row(record))
        return buffer.getvalue()

    def summary(self, records: list[RunRecord]) -> str:
        """One line: runs, decode outcome, failures by kind, worst gap."""
        failed = [r for r in records if r.failure_kind]
        gaps = [r.report.gap_ratio for r in records if r.report and r.report.gap_ratio is not None]
        parts = [f"{len(records)} runs", f"{len(records) - len(failed)} ok"]
        for kind in ("decode", "field_exhausted", "rejected", "error"):
            count = sum(1 for r in failed if r.failure_kind == kind)
            if count:
                parts.append(f"{count} {kind}")
        if gaps:
            parts.append(f"max gap {max(gaps)} ({float(max(gaps)):.3f})")
        return ", ".join(parts)

    def emit_report(self, records: list[RunRecord], path: Optional[Path] = None,
                    stream: TextIO | None = None) -> str:
        """
        Write the CSV to `path` (or the stream when no path is given) and a
        summary line to the stream.

        Raises:
            ReportError: If the file cannot be written
        """
        stream = stream or sys.stdout
        text = self.render_csv(records)
        if path is None:
            stream.write(text)
        else:
            try:
                path.parent.mkdir(parents=True, exist_ok=True)
                path.write_text(text, encoding="utf-8")
            except OSError as e:
                logger.error(f"❌ Could not write report to {path}: {e}")
                raise ReportError(message="Failed to write report", detail=str(e))
            logger.info(f"✅ Wrote {len(records)} rows to {path}")
        summary = self.summary(records)
        stream.write(summary + "\n")
        return summary

    def verification_table(self, rows: list[VerificationRow], stream: TextIO | None = None) -> bool:
        """Print the pass/fail table; True when every row passed."""
        stream = stream or sys.stdout
        width = max((len(r.name) for r in rows), default=4)
        stream.write(f"{'case':<{width}}  {'expected':>9}  {'measured':>9}  decode  result\n")
        for r in rows:
            measured = "-" if r.measured_delay is None else str(r.measured_delay)
            stream.write(
                f"{r.name:<{width}}  {str(r.expected_delay):>9}  {measured:>9}  "
                f"{'ok' if r.decode_ok else 'FAIL':>6}  {'pass' if r.passed else 'FAIL'}\n"
            )
        passed = all(r.passed for r in rows)
        stream.write(f"{sum(r.passed for r in rows)}/{len(rows)} cases passed\n")
        return passed


# Global service instance
report_service = ReportService()
