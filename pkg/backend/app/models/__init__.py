"""
Domain models: content, networks and validated scenario schemas.
"""

from app.models.content import CacheContents, FileCatalog, PieceKey, PieceLabel, SplitPlan, split_file
from app.models.network import (
    DedicatedNetwork,
    FlexibleNetwork,
    LinearNetwork,
    NetworkModel,
    RoutingPartition,
    SlotGroup,
    TransmitBlock,
    TransmitBlockBuilder,
)
from app.models.schemas import (
    DelayReport,
    FlexiblePlanParams,
    PartitionProfile,
    RunRecord,
    ScenarioConfig,
    ScenarioSpec,
    VerificationRow,
)

__all__ = [
    "CacheContents",
    "FileCatalog",
    "PieceKey",
    "PieceLabel",
    "SplitPlan",
    "split_file",
    "DedicatedNetwork",
    "FlexibleNetwork",
    "LinearNetwork",
    "NetworkModel",
    "RoutingPartition",
    "SlotGroup",
    "TransmitBlock",
    "TransmitBlockBuilder",
    "DelayReport",
    "FlexiblePlanParams",
    "PartitionProfile",
    "RunRecord",
    "ScenarioConfig",
    "ScenarioSpec",
    "VerificationRow",
]
