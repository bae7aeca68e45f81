"""
Dedicated networks: users split into L fixed contiguous groups of
K' / L (K' = L * ceil(K/L), padded with virtual users), each group served
by its own single-server instance in parallel.
"""

import logging
from collections.abc import Sequence

import numpy as np

from app.galois import FieldVector, GaloisField, get_field
from app.models.content import CacheContents, FileCatalog
from app.models.network import DedicatedNetwork, TransmitBlock, TransmitBlockBuilder
from app.models.schemas import ScenarioConfig
from app.services.base import CachingScheme
from app.services.single_server import SingleServerScheme
from app.utils.validators import ScenarioValidator

logger = logging.getLogger(__name__)

VIRTUAL_DEMAND = 1


class DedicatedScheme(CachingScheme):
    """L parallel single-server problems with K'/L users each."""

    name = "dedicated"

    def __init__(self, gf: GaloisField, users: int, servers: int, n_files: int,
                 t_group: int, symbols_per_file: int):
        super().__init__(gf, users, n_files)
        self.network = DedicatedNetwork(users, servers)
        self.group = SingleServerScheme(gf, self.network.group_size, n_files, t_group, symbols_per_file)
        self.plan = self.group.plan
        if self.network.padded_users > users:
            logger.info(
                f"Padding {users} users to {self.network.padded_users} "
                f"({self.network.padded_users - users} virtual)"
            )

    @classmethod
    def from_config(cls, config: ScenarioConfig) -> "DedicatedScheme":
        """
        Raises:
            NonIntegralT: If K'M/(LN) is not an integer
        """
        network = DedicatedNetwork(config.K, config.L)
        t_group = ScenarioValidator.integral_t(network.group_size, config.M, config.N, label="K'M/(LN)")
        return cls(get_field(config.m), config.K, config.L, config.N, t_group, config.symbols_per_file)

    @property
    def padded_users(self) -> int:
        return self.network.padded_users

    def local_index(self, user: int) -> int:
        return (user - 1) % self.network.group_size + 1

    def padded_demands(self, demands: Sequence[int]) -> tuple[int, ...]:
        return tuple(demands) + (VIRTUAL_DEMAND,) * (self.padded_users - len(demands))

    def group_demands(self, demands: Sequence[int], row: int) -> tuple[int, ...]:
        padded = self.padded_demands(demands)
        size = self.network.group_size
        return padded[row * size:(row + 1) * size]

    def place(self, catalog: FileCatalog) -> list[CacheContents]:
        """
        Every group gets the single-server placement with group-local
        indices; phantom caches for virtual users come last.
        """
        local = self.group.place(catalog)
        caches = []
        for user in range(1, self.padded_users + 1):
            template = local[self.local_index(user) - 1]
            caches.append(CacheContents(
                user=user,
                symbol_bits=self.gf.m,
                pieces=dict(template.pieces),
                virtual=user > self.users,
            ))
        return caches

    def deliver(self, catalog: FileCatalog, demands: Sequence[int]) -> TransmitBlock:
        """
        Server row l carries group l's packet stream; shorter streams are
        zero-padded so the block lasts as long as the longest group.
        """
        self.check_catalog(catalog)
        streams = [
            self.group.stream(self.group.deliver_packets(catalog, self.group_demands(demands, row)))
            for row in range(self.network.servers)
        ]
        width = max(len(s) for s in streams)
        X = np.zeros((self.network.servers, width), dtype=np.int64)
        for row, stream in enumerate(streams):
            X[row, :len(stream)] = stream
        builder = TransmitBlockBuilder(servers=self.network.servers)
        if width:
            builder.append(X, routing=self.network.partition)
        return builder.build()

    def decode(self, user: int, cache: CacheContents, received: FieldVector,
               block: TransmitBlock, demands: Sequence[int]) -> FieldVector:
        """Single-server decoding inside the user's group."""
        local_demands = self.group_demands(demands, self.network.group_of(user))
        packets = self.group.packets_from_stream(received)
        return self.group.decode_packets(self.local_index(user), cache, packets, local_demands)
