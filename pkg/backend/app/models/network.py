"""
Abstract network input/output maps and the transmit block they carry.

A network turns the L server symbols s(t) of one slot into the K user
symbols r(t). Dedicated and flexible networks route whole server symbols
to user classes; linear networks mix them through a transfer matrix H.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from tenacity import RetryError, Retrying, retry_if_exception_type, stop_after_attempt

from app.config import settings
from app.galois import FieldMatrix, FieldVector, GaloisField, matmul, matvec, rank
from app.utils.exceptions import InvalidPartition, LengthMismatch, RankDeficientNetwork
from app.utils.helpers import UserSubset

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RoutingPartition:
    """Class l (0-based) hears server row l; idle users hear nothing."""

    classes: tuple[UserSubset, ...]
    idle: UserSubset = ()

    def assignment(self) -> dict[int, int]:
        return {user: row for row, members in enumerate(self.classes) for user in members}

    def validate(self, users: int, servers: int) -> None:
        """
        Raises:
            InvalidPartition: unless classes plus idle split 1..users exactly once
        """
        if len(self.classes) != servers:
            raise InvalidPartition(
                message="Partition class count differs from L",
                detail=f"{len(self.classes)} classes for {servers} servers"
            )
        members = [u for c in self.classes for u in c] + list(self.idle)
        if sorted(members) != list(range(1, users + 1)):
            raise InvalidPartition(
                message="Routing metadata is not a partition of the users",
                detail=f"classes {self.classes} idle {self.idle} over 1..{users}"
            )


@dataclass
class SlotGroup:
    """Consecutive columns sharing one routing partition and one scheme record."""

    start: int
    stop: int
    routing: RoutingPartition | None = None
    record: Any = None

    @property
    def width(self) -> int:
        return self.stop - self.start


@dataclass
class TransmitBlock:
    """X = [s(1), ..., s(T)] with per-column-group metadata."""

    X: FieldMatrix
    groups: list[SlotGroup] = field(default_factory=list)

    @property
    def servers(self) -> int:
        return self.X.shape[0]

    @property
    def slot_count(self) -> int:
        return self.X.shape[1]

    def columns(self, group: SlotGroup) -> FieldMatrix:
        return self.X[:, group.start:group.stop]


class TransmitBlockBuilder:
    """Appends column groups and stacks them once at the end."""

    def __init__(self, servers: int):
        self.servers = servers
        self._parts: list[FieldMatrix] = []
        self._groups: list[SlotGroup] = []
        self._offset = 0

    def append(self, columns: FieldMatrix, routing: RoutingPartition | None = None, record: Any = None) -> SlotGroup:
        if columns.shape[0] != self.servers:
            raise LengthMismatch(
                message="Column group has the wrong number of server rows",
                detail=f"{columns.shape[0]} rows, expected {self.servers}"
            )
        group = SlotGroup(self._offset, self._offset + columns.shape[1], routing, record)
        self._parts.append(columns)
        self._groups.append(group)
        self._offset = group.stop
        return group

    def build(self) -> TransmitBlock:
        if self._parts:
            X = np.hstack(self._parts)
        else:
            X = np.zeros((self.servers, 0), dtype=np.int64)
        return TransmitBlock(X=X, groups=self._groups)


class NetworkModel(ABC):
    """Input/output map from L server symbols to K user symbols."""

    kind: str = "abstract"

    def __init__(self, users: int, servers: int):
        self.users = users
        self.servers = servers

    def _check_input(self, s: FieldVector) -> None:
        if len(s) != self.servers:
            raise LengthMismatch(
                message="Server symbol vector has the wrong length",
                detail=f"{len(s)} symbols for {self.servers} servers"
            )

    @abstractmethod
    def apply(self, s: FieldVector, slot_metadata: RoutingPartition | None = None) -> FieldVector:
        """r(t) for one slot."""

    @abstractmethod
    def receive(self, block: TransmitBlock) -> FieldMatrix:
        """Received symbols of every user over the whole block, K x T."""

    def receive_user(self, block: TransmitBlock, user: int) -> FieldVector:
        return self.receive(block)[user - 1]


class RoutedNetwork(NetworkModel):
    """Networks whose outputs copy one server symbol per user class."""

    def _routing_for(self, metadata: RoutingPartition | None) -> RoutingPartition:
        if metadata is None:
            raise InvalidPartition(message="Routed slot carries no partition")
        return metadata

    def _partition_users(self) -> int:
        return self.users

    def apply(self, s: FieldVector, slot_metadata: RoutingPartition | None = None) -> FieldVector:
        self._check_input(s)
        routing = self._routing_for(slot_metadata)
        routing.validate(self._partition_users(), self.servers)
        r = np.zeros(self.users, dtype=np.int64)
        for row, members in enumerate(routing.classes):
            for user in members:
                if user <= self.users:
                    r[user - 1] = s[row]
        return r

    def receive(self, block: TransmitBlock) -> FieldMatrix:
        Y = np.zeros((self.users, block.slot_count), dtype=np.int64)
        for group in block.groups:
            routing = self._routing_for(group.routing)
            routing.validate(self._partition_users(), self.servers)
            for row, members in enumerate(routing.classes):
                real = [u - 1 for u in members if u <= self.users]
                if real:
                    Y[real, group.start:group.stop] = block.X[row, group.start:group.stop]
        return Y


class DedicatedNetwork(RoutedNetwork):
    """
    Fixed balanced partition of K' = L*ceil(K/L) users into contiguous
    groups; users beyond K are virtual and their outputs are dropped.
    """

    kind = "dedicated"

    def __init__(self, users: int, servers: int):
        super().__init__(users, servers)
        self.padded_users = servers * math.ceil(users / servers)
        self.group_size = self.padded_users // servers
        self.partition = RoutingPartition(
            classes=tuple(
                tuple(range(l * self.group_size + 1, (l + 1) * self.group_size + 1))
                for l in range(servers)
            )
        )

    def _partition_users(self) -> int:
        return self.padded_users

    def _routing_for(self, metadata: RoutingPartition | None) -> RoutingPartition:
        if metadata is not None and metadata != self.partition:
            raise InvalidPartition(
                message="Dedicated network cannot change its partition",
                detail=f"expected {self.partition.classes}, got {metadata.classes}"
            )
        return self.partition

    def group_of(self, user: int) -> int:
        """0-based server row hearing this user."""
        return (user - 1) // self.group_size


class FlexibleNetwork(RoutedNetwork):
    """Any partition of [K] into L classes plus an idle class, chosen per slot."""

    kind = "flexible"


class _RankLoss(Exception):
    """A sampled transfer matrix fell below full rank."""


class LinearNetwork(NetworkModel):
    """r = H s over GF(2^m) with a K x L transfer matrix H."""

    kind = "linear"

    def __init__(self, gf: GaloisField, H: FieldMatrix, resamples: int = 0):
        H = np.asarray(H, dtype=np.int64)
        super().__init__(*H.shape)
        self.gf = gf
        self.H = H
        self.resamples = resamples
        self.rank = rank(gf, H)
        self.full_rank = self.rank == min(self.users, self.servers)
        if not self.full_rank:
            logger.warning(f"⚠️ Transfer matrix rank {self.rank} below min(K, L) = {min(self.users, self.servers)}")

    @classmethod
    def sample(cls, gf: GaloisField, users: int, servers: int, rng: np.random.Generator,
               active_servers: int | None = None, max_resamples: int | None = None) -> "LinearNetwork":
        """
        Draw H with i.i.d. uniform entries, resampling while H (or its
        first active_servers columns) is rank deficient.

        Raises:
            RankDeficientNetwork: every draw was rank deficient
        """
        active = active_servers or servers
        attempts = settings.ntm_max_resamples if max_resamples is None else max_resamples
        if attempts < 1:
            raise RankDeficientNetwork(message="No transfer matrix draws allowed", detail=f"max_resamples = {attempts}")
        resamples = 0

        def draw() -> FieldMatrix:
            nonlocal resamples
            H = gf.random_elements(rng, (users, servers))
            if rank(gf, H) < min(users, servers) or rank(gf, H[:, :active]) < min(users, active):
                resamples += 1
                logger.warning(f"⚠️ Rank-deficient transfer matrix drawn over GF(2^{gf.m}), resampling")
                raise _RankLoss()
            return H

        try:
            H = Retrying(stop=stop_after_attempt(attempts), retry=retry_if_exception_type(_RankLoss))(draw)
        except RetryError:
            raise RankDeficientNetwork(
                message="Could not draw a full-rank transfer matrix",
                detail=f"{attempts} draws of a {users}x{servers} matrix over GF(2^{gf.m})"
            )
        return cls(gf, H, resamples=resamples)

    def row(self, user: int, columns: int | None = None) -> FieldVector:
        """h_k, optionally restricted to the first `columns` servers."""
        h = self.H[user - 1]
        return h if columns is None else h[:columns]

    def apply(self, s: FieldVector, slot_metadata: RoutingPartition | None = None) -> FieldVector:
        self._check_input(s)
        return matvec(self.gf, self.H, s)

    def receive(self, block: TransmitBlock) -> FieldMatrix:
        return matmul(self.gf, self.H, block.X)

    def receive_user(self, block: TransmitBlock, user: int) -> FieldVector:
        return matmul(self.gf, self.H[user - 1:user], block.X)[0]
