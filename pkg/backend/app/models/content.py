"""
Content library model: files as GF(2^m) symbol arrays, hierarchical split
plans, piece keys and per-user caches.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from app.galois import FieldVector, GaloisField
from app.utils.exceptions import DecodeFailure, IndivisibleSplit, ValidationError
from app.utils.helpers import UserSubset, subset_label
from app.utils.validators import ScenarioValidator


class PieceLabel(NamedTuple):
    """Position of a piece inside any file: subset tau, server i (0 if unused), copy j."""

    subset: UserSubset
    server: int = 0
    copy: int = 1

    def __str__(self) -> str:
        return f"{subset_label(self.subset)}|{self.server}|{self.copy}"


class PieceKey(NamedTuple):
    file_id: int
    label: PieceLabel

    def __str__(self) -> str:
        return f"W{self.file_id}[{self.label}]"


@dataclass(frozen=True)
class SplitPlan:
    """
    Equal-length leaf pieces of a file, in plan order.

    Plan order is the concatenation order: pieces are contiguous symbol
    ranges laid out one after another, so they are disjoint and cover the
    file. Higher hierarchy levels (sub-files, mini-files) are unions of
    consecutive leaves and are equal-sized whenever their leaf counts match.
    """

    scheme: str
    symbols_per_file: int
    labels: tuple[PieceLabel, ...]
    piece_length: int = field(init=False)
    _index: dict[PieceLabel, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        length = ScenarioValidator.validate_split(self.symbols_per_file, len(self.labels), f"{self.scheme} piece")
        if len(set(self.labels)) != len(self.labels):
            raise ValidationError(message="Split plan repeats a piece label")
        object.__setattr__(self, "piece_length", length)
        object.__setattr__(self, "_index", {label: i for i, label in enumerate(self.labels)})

    def __contains__(self, label: PieceLabel) -> bool:
        return label in self._index

    def piece_range(self, label: PieceLabel) -> tuple[int, int]:
        start = self._index[label] * self.piece_length
        return start, start + self.piece_length

    def assemble(self, pieces: dict[PieceLabel, FieldVector]) -> FieldVector:
        """Concatenate pieces in plan order; every label must be present."""
        missing = [label for label in self.labels if label not in pieces]
        if missing:
            raise DecodeFailure(
                message="Pieces missing for reassembly",
                detail=f"{len(missing)} of {len(self.labels)} pieces absent, first {missing[0]}"
            )
        if not self.labels:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([pieces[label] for label in self.labels])


@dataclass(frozen=True, eq=False)
class FileCatalog:
    """N files W_1..W_N, each a row of symbols_per_file field symbols."""

    gf: GaloisField
    files: np.ndarray

    @classmethod
    def generate(cls, gf: GaloisField, n_files: int, symbols_per_file: int,
                 rng: np.random.Generator) -> "FileCatalog":
        """Seeded pseudorandom contents; never all-zero in practice."""
        return cls(gf=gf, files=gf.random_elements(rng, (n_files, symbols_per_file)))

    @property
    def n_files(self) -> int:
        return self.files.shape[0]

    @property
    def symbols_per_file(self) -> int:
        return self.files.shape[1]

    def file(self, file_id: int) -> FieldVector:
        if not 1 <= file_id <= self.n_files:
            raise ValidationError(message="Unknown file", detail=f"W_{file_id} not in catalog of {self.n_files}")
        return self.files[file_id - 1]

    def piece(self, plan: SplitPlan, file_id: int, label: PieceLabel) -> FieldVector:
        start, stop = plan.piece_range(label)
        return self.file(file_id)[start:stop]


def split_file(catalog: FileCatalog, plan: SplitPlan, file_id: int) -> list[tuple[PieceKey, FieldVector]]:
    """Cut W_file_id into the plan's pieces, in plan order."""
    if catalog.symbols_per_file != plan.symbols_per_file:
        raise IndivisibleSplit(
            message="Split plan does not match the catalog",
            detail=f"plan covers {plan.symbols_per_file} symbols, files have {catalog.symbols_per_file}"
        )
    return [(PieceKey(file_id, label), catalog.piece(plan, file_id, label)) for label in plan.labels]


@dataclass
class CacheContents:
    """Z_k: the pieces stored at one user."""

    user: int
    symbol_bits: int
    pieces: dict[PieceKey, FieldVector] = field(default_factory=dict)
    virtual: bool = False

    def store(self, key: PieceKey, symbols: FieldVector) -> None:
        self.pieces[key] = symbols

    def lookup(self, key: PieceKey) -> FieldVector | None:
        """The cached piece, or None when the key is not in Z_k."""
        return self.pieces.get(key)

    def memory_used(self) -> int:
        """Stored bits."""
        return sum(len(symbols) for symbols in self.pieces.values()) * self.symbol_bits

    def keys(self) -> list[PieceKey]:
        return sorted(self.pieces, key=lambda k: (k.file_id, k.label))
