"""
Single-server coded caching: t = KM/N, sub-files indexed by t-subsets,
one XOR packet per (t+1)-subset.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from app.galois import FieldVector, GaloisField, get_field
from app.models.content import CacheContents, FileCatalog, PieceKey, PieceLabel, SplitPlan
from app.models.network import DedicatedNetwork, TransmitBlock, TransmitBlockBuilder
from app.models.schemas import ScenarioConfig
from app.services.base import CachingScheme
from app.utils.exceptions import DecodeFailure
from app.utils.helpers import UserSubset, subsets, without
from app.utils.validators import ScenarioValidator

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class XorPacket:
    """XOR over r in `subset` of W_{d_r, subset minus r}."""

    subset: UserSubset
    symbols: FieldVector


class SingleServerScheme(CachingScheme):
    """
    Placement into C(K, t) sub-files and XOR delivery. Also the per-group
    worker of the dedicated scheme, with group-local user indices.
    """

    name = "single"

    def __init__(self, gf: GaloisField, users: int, n_files: int, t: int, symbols_per_file: int):
        super().__init__(gf, users, n_files)
        self.t = t
        self.plan = SplitPlan(
            scheme=self.name,
            symbols_per_file=symbols_per_file,
            labels=tuple(PieceLabel(tau) for tau in subsets(users, t)),
        )
        self.packet_subsets = subsets(users, t + 1)
        self.network = DedicatedNetwork(users, 1)

    @classmethod
    def from_config(cls, config: ScenarioConfig) -> "SingleServerScheme":
        """
        Raises:
            NonIntegralT: If KM/N is not an integer
            IndivisibleSplit: If F/m is not a multiple of C(K, t)
        """
        t = ScenarioValidator.integral_t(config.K, config.M, config.N)
        return cls(get_field(config.m), config.K, config.N, t, config.symbols_per_file)

    def place(self, catalog: FileCatalog) -> list[CacheContents]:
        """User k stores W_{n, tau} for every file n and every tau containing k."""
        self.check_catalog(catalog)
        caches = self._empty_caches(self.users)
        for cache in caches:
            for file_id in range(1, self.n_files + 1):
                for label in self.plan.labels:
                    if cache.user in label.subset:
                        cache.store(PieceKey(file_id, label), catalog.piece(self.plan, file_id, label))
        return caches

    def deliver_packets(self, catalog: FileCatalog, demands: Sequence[int]) -> list[XorPacket]:
        """One packet per (t+1)-subset, in lexicographic order."""
        packets = []
        for T in self.packet_subsets:
            symbols = np.zeros(self.plan.piece_length, dtype=np.int64)
            for r in T:
                symbols ^= catalog.piece(self.plan, demands[r - 1], PieceLabel(without(T, r)))
            packets.append(XorPacket(T, symbols))
        return packets

    def stream(self, packets: Sequence[XorPacket]) -> FieldVector:
        if not packets:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([p.symbols for p in packets])

    def packets_from_stream(self, stream: FieldVector) -> list[XorPacket]:
        length = self.plan.piece_length
        if len(stream) < length * len(self.packet_subsets):
            raise DecodeFailure(
                message="Received stream is shorter than the packet schedule",
                detail=f"{len(stream)} symbols for {len(self.packet_subsets)} packets of {length}"
            )
        return [
            XorPacket(T, stream[i * length:(i + 1) * length])
            for i, T in enumerate(self.packet_subsets)
        ]

    def deliver(self, catalog: FileCatalog, demands: Sequence[int]) -> TransmitBlock:
        """The packets broadcast back to back by the single server."""
        self.check_catalog(catalog)
        builder = TransmitBlockBuilder(servers=1)
        for packet in self.deliver_packets(catalog, demands):
            builder.append(packet.symbols.reshape(1, -1), routing=self.network.partition, record=packet.subset)
        return builder.build()

    def decode_packets(self, user: int, cache: CacheContents, packets: Sequence[XorPacket],
                       demands: Sequence[int]) -> FieldVector:
        """
        Recover W_{d_k, tau} for every tau without k from the packet of
        tau + {k} by cancelling the cached terms of the other members.
        """
        by_subset = {p.subset: p for p in packets}
        recovered = {}
        for label in self.plan.labels:
            if user in label.subset:
                continue
            T = tuple(sorted(label.subset + (user,)))
            packet = by_subset.get(T)
            if packet is None:
                raise DecodeFailure(
                    message=f"User {user} is missing a packet",
                    detail=f"no packet for subset {T}"
                )
            symbols = packet.symbols.copy()
            for r in T:
                if r != user:
                    symbols ^= self._cached(cache, PieceKey(demands[r - 1], PieceLabel(without(T, r))))
            recovered[label] = symbols
        return self._reassemble(user, cache, demands[user - 1], recovered)

    def decode(self, user: int, cache: CacheContents, received: FieldVector,
               block: TransmitBlock, demands: Sequence[int]) -> FieldVector:
        return self.decode_packets(user, cache, self.packets_from_stream(received), demands)
