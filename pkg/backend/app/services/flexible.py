"""
Flexible networks: the user-to-server partition may change every slot.

Each file is split into L sub-files (one per server), sub-file i into
alpha_i = C(K, p_i - 1) mini-files indexed by (p_i - 1)-subsets, and each
mini-file into gamma_i pico-files of x F bits. Delivery visits every
ordered (p_1, ..., p_L, Q)-partition of the users once; in each slot
server i multicasts one XOR to its class, and the Q idle users hear nothing.
"""

import logging
import math
from collections.abc import Sequence
from fractions import Fraction

import numpy as np

from app.galois import FieldVector, GaloisField, get_field
from app.models.content import CacheContents, FileCatalog, PieceKey, PieceLabel, SplitPlan
from app.models.network import FlexibleNetwork, RoutingPartition, TransmitBlock, TransmitBlockBuilder
from app.models.schemas import FlexiblePlanParams, PartitionProfile, ScenarioConfig
from app.services.base import CachingScheme
from app.services.bounds import flexible_pair
from app.utils.exceptions import InvalidProfile, LedgerOverflow
from app.utils.helpers import UserSubset, binom, ordered_partitions, subsets, without

logger = logging.getLogger(__name__)


def flex_params(K: int, L: int, profile: PartitionProfile) -> FlexiblePlanParams:
    """
    alpha_i = C(K, p_i - 1), gamma_i = (K - p_i)! p_i! / (p_1! ... p_L! Q!),
    x = 1 / sum alpha_i gamma_i and x_i = gamma_i x.

    Raises:
        InvalidProfile: If the profile does not describe (K, L)
    """
    if profile.K != K or profile.L != L:
        raise InvalidProfile(
            message="Profile does not match (K, L)",
            detail=f"{profile} describes K={profile.K}, L={profile.L}; expected K={K}, L={L}"
        )
    denominator = math.prod(math.factorial(size) for size in profile.class_sizes)
    alpha = tuple(binom(K, p - 1) for p in profile.p)
    gamma = []
    for p in profile.p:
        numerator = math.factorial(K - p) * math.factorial(p)
        if numerator % denominator:
            raise InvalidProfile(message="Pico-file count is not integral", detail=f"{profile}, p_i={p}")
        gamma.append(numerator // denominator)
    x = Fraction(1, sum(a * g for a, g in zip(alpha, gamma)))
    return FlexiblePlanParams(alpha=alpha, gamma=tuple(gamma), x=x, x_i=tuple(g * x for g in gamma))


def enumerate_partitions(K: int, profile: PartitionProfile) -> list[RoutingPartition]:
    """All K! / (p_1! ... p_L! Q!) ordered-class partitions, lexicographic."""
    return [
        RoutingPartition(classes=classes[:-1], idle=classes[-1])
        for classes in ordered_partitions(list(range(1, K + 1)), profile.class_sizes)
    ]


class FreshIndexLedger:
    """N(i, P): the next unsent pico index for server i and class P, starting at 1."""

    def __init__(self, gamma: Sequence[int]):
        self.gamma = tuple(gamma)
        self.counters: dict[tuple[int, UserSubset], int] = {}

    def value(self, server: int, members: UserSubset) -> int:
        return self.counters.get((server, members), 1)

    def take(self, server: int, members: UserSubset) -> int:
        """
        Raises:
            LedgerOverflow: If every pico of (server, members) was already sent
        """
        index = self.value(server, members)
        if index > self.gamma[server - 1]:
            raise LedgerOverflow(
                message="Fresh-index ledger overflow",
                detail=f"server {server}, class {members}: index {index} > gamma {self.gamma[server - 1]}"
            )
        self.counters[(server, members)] = index + 1
        return index

    def is_complete(self, K: int, profile: PartitionProfile) -> bool:
        """Every p_i-subset of every server reached gamma_i + 1."""
        return all(
            self.value(i, P) == self.gamma[i - 1] + 1
            for i, p in enumerate(profile.p, start=1)
            for P in subsets(K, p)
        )


class FlexibleScheme(CachingScheme):
    """Placement into pico-files and delivery over all partitions of a profile."""

    name = "flexible"

    def __init__(self, gf: GaloisField, users: int, servers: int, n_files: int,
                 profile: PartitionProfile, symbols_per_file: int):
        super().__init__(gf, users, n_files)
        self.profile = profile
        self.params = flex_params(users, servers, profile)
        self.M, self.delay = flexible_pair(users, servers, n_files, profile)
        self.plan = SplitPlan(
            scheme=self.name,
            symbols_per_file=symbols_per_file,
            labels=tuple(
                PieceLabel(tau, i, j)
                for i, (p, g) in enumerate(zip(profile.p, self.params.gamma), start=1)
                for tau in subsets(users, p - 1)
                for j in range(1, g + 1)
            ),
        )
        self.network = FlexibleNetwork(users, servers)
        self.partitions = enumerate_partitions(users, profile)

    @classmethod
    def from_config(cls, config: ScenarioConfig, profile: PartitionProfile) -> "FlexibleScheme":
        return cls(get_field(config.m), config.K, config.L, config.N, profile, config.symbols_per_file)

    def place(self, catalog: FileCatalog) -> list[CacheContents]:
        """User k stores every pico W^{i,j}_{n, tau} with k in tau."""
        self.check_catalog(catalog)
        caches = self._empty_caches(self.users)
        for cache in caches:
            for file_id in range(1, self.n_files + 1):
                for label in self.plan.labels:
                    if cache.user in label.subset:
                        cache.store(PieceKey(file_id, label), catalog.piece(self.plan, file_id, label))
        return caches

    def deliver(self, catalog: FileCatalog, demands: Sequence[int],
                ledger: FreshIndexLedger | None = None) -> TransmitBlock:
        """
        One slot group per partition. Server i sends
        XOR_{r in P} W^{i, N(i, P)}_{d_r, P - r} to its class P; the pico
        index used per server is kept as the group's record.
        """
        self.check_catalog(catalog)
        ledger = ledger if ledger is not None else FreshIndexLedger(self.params.gamma)
        length = self.plan.piece_length
        builder = TransmitBlockBuilder(servers=self.network.servers)
        for partition in self.partitions:
            columns = np.zeros((self.network.servers, length), dtype=np.int64)
            copies = []
            for i, members in enumerate(partition.classes, start=1):
                j = ledger.take(i, members)
                copies.append(j)
                for r in members:
                    columns[i - 1] ^= catalog.piece(self.plan, demands[r - 1], PieceLabel(without(members, r), i, j))
            builder.append(columns, routing=partition, record=tuple(copies))
        return builder.build()

    def decode(self, user: int, cache: CacheContents, received: FieldVector,
               block: TransmitBlock, demands: Sequence[int]) -> FieldVector:
        """XOR-cancel cached picos from every packet addressed to a class containing the user."""
        recovered = {}
        for group in block.groups:
            row = group.routing.assignment().get(user)
            if row is None:
                continue
            server, members = row + 1, group.routing.classes[row]
            j = group.record[row]
            symbols = received[group.start:group.stop].copy()
            for r in members:
                if r != user:
                    symbols ^= self._cached(cache, PieceKey(demands[r - 1], PieceLabel(without(members, r), server, j)))
            recovered[PieceLabel(without(members, user), server, j)] = symbols
        return self._reassemble(user, cache, demands[user - 1], recovered)
