"""
Curve reproduction script.
Run this to write the four-user linear curves (L = 1..4) and the
three-user curve with its cut-set bound as CSV reports.
"""

import argparse
import logging
import sys
from pathlib import Path

# Add the backend directory to the path
sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from app.cli.exception_handlers import EXIT_OK, exit_code_for_records
from app.config import settings
from app.models.schemas import ScenarioSpec
from app.services.report_service import report_service
from app.services.scenario_service import scenario_service

logging.basicConfig(level=settings.log_level, format=settings.log_format, stream=sys.stderr)
logger = logging.getLogger(__name__)

CURVES = {
    "linear_k4_curves.csv": (ScenarioSpec(scheme="linear", K=4, N=4), [1, 2, 3, 4]),
    "linear_k3_l2_bound.csv": (ScenarioSpec(scheme="linear", K=3, L=2, N=3), None),
}


def main(out_dir: Path, seed: int) -> int:
    """Sweep each curve and write its report; returns the worst exit code."""
    logger.info("=" * 60)
    logger.info("Memory-delay curve reproduction")
    logger.info("=" * 60)

    exit_code = EXIT_OK
    for name, (spec, servers) in CURVES.items():
        spec = spec.model_copy(update={"seed": seed})
        records = scenario_service.sweep_memory(spec, servers)
        report_service.emit_report(records, out_dir / name)
        for record in records:
            report = record.report
            if report is None:
                continue
            logger.info(
                f"L={record.spec.L} M={record.M}: measured {report.measured_delay}, "
                f"formula {report.formula_delay}, bound {report.lower_bound}"
            )
        exit_code = max(exit_code, exit_code_for_records(records))

    if exit_code == EXIT_OK:
        logger.info(f"✅ Curves written to {out_dir}")
    else:
        logger.error(f"❌ Some sweep points failed (exit {exit_code})")
    return exit_code


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Write the memory-delay curve CSVs")
    parser.add_argument("--out-dir", default="curves", help="directory for the CSV files")
    parser.add_argument("--seed", type=int, default=0, help="PRNG seed")
    args = parser.parse_args()
    sys.exit(main(Path(args.out_dir), args.seed))
