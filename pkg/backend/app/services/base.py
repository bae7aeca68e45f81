"""
Service layer base class shared by the caching schemes.
"""

import logging
from abc import ABC, abstractmethod
from collections.abc import Sequence

from app.galois import FieldVector, GaloisField
from app.models.content import CacheContents, FileCatalog, PieceKey, SplitPlan
from app.models.network import NetworkModel, TransmitBlock
from app.utils.exceptions import DecodeFailure, IndivisibleSplit

logger = logging.getLogger(__name__)


class CachingScheme(ABC):
    """
    A placement/delivery/decoding scheme over one network.

    Subclasses fix `plan` (how every file is cut) and `network` in their
    constructor; placement, delivery and decoding are then pure functions
    of the catalog and the demands.
    """

    name: str = "abstract"
    plan: SplitPlan
    network: NetworkModel

    def __init__(self, gf: GaloisField, users: int, n_files: int):
        self.gf = gf
        self.users = users
        self.n_files = n_files

    def check_catalog(self, catalog: FileCatalog) -> None:
        if catalog.symbols_per_file != self.plan.symbols_per_file or catalog.n_files != self.n_files:
            raise IndivisibleSplit(
                message="Catalog does not match the scheme's split plan",
                detail=(
                    f"catalog {catalog.n_files}x{catalog.symbols_per_file} symbols, "
                    f"plan {self.n_files}x{self.plan.symbols_per_file}"
                )
            )

    def _empty_caches(self, count: int) -> list[CacheContents]:
        return [CacheContents(user=k, symbol_bits=self.gf.m) for k in range(1, count + 1)]

    def _reassemble(self, user: int, cache: CacheContents, demand: int,
                    recovered: dict) -> FieldVector:
        """Own file from cached pieces plus the pieces recovered from delivery."""
        pieces = {}
        for label in self.plan.labels:
            if user in label.subset:
                symbols = cache.lookup(PieceKey(demand, label))
                if symbols is None:
                    raise DecodeFailure(
                        message=f"User {user} lost a cached piece",
                        detail=f"{PieceKey(demand, label)} absent from Z_{user}"
                    )
                pieces[label] = symbols
            elif label in recovered:
                pieces[label] = recovered[label]
        return self.plan.assemble(pieces)

    def _cached(self, cache: CacheContents, key: PieceKey) -> FieldVector:
        symbols = cache.lookup(key)
        if symbols is None:
            raise DecodeFailure(
                message=f"User {cache.user} cannot cancel interference",
                detail=f"{key} is not in Z_{cache.user}"
            )
        return symbols

    @abstractmethod
    def place(self, catalog: FileCatalog) -> list[CacheContents]:
        """Caches Z_1..Z_K (plus phantom caches where a scheme pads users)."""

    @abstractmethod
    def deliver(self, catalog: FileCatalog, demands: Sequence[int]) -> TransmitBlock:
        """The server transmissions X for one demand vector."""

    @abstractmethod
    def decode(self, user: int, cache: CacheContents, received: FieldVector,
               block: TransmitBlock, demands: Sequence[int]) -> FieldVector:
        """User `user`'s demanded file from its cache and received symbols."""

    def run_delivery(self, catalog: FileCatalog, caches: list[CacheContents],
                     demands: Sequence[int]) -> tuple[TransmitBlock, dict[int, FieldVector]]:
        """Deliver, pass X through the network and decode every real user."""
        block = self.deliver(catalog, demands)
        received = self.network.receive(block)
        files = {
            user: self.decode(user, caches[user - 1], received[user - 1], block, demands)
            for user in range(1, self.users + 1)
        }
        return block, files
