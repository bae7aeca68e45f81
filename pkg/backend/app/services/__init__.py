"""
Business logic services layer.
"""

from app.services.dedicated import DedicatedScheme
from app.services.flexible import FlexibleScheme
from app.services.linear import LinearScheme
from app.services.report_service import ReportService, report_service
from app.services.scenario_service import ScenarioService, scenario_service
from app.services.single_server import SingleServerScheme

__all__ = [
    "DedicatedScheme",
    "FlexibleScheme",
    "LinearScheme",
    "SingleServerScheme",
    "ReportService",
    "report_service",
    "ScenarioService",
    "scenario_service",
]
