"""
Linear networks: r = H s with a random transfer matrix.

Placement: t = KM/N, sub-files W_{n, tau} over t-subsets, each cut into
C(K-t-1, L'-1) mini-files. Delivery: for every (t+L')-subset S, each
(t+1)-subset T of S gets a zero-forcing precoder u_S^T (orthogonal to h_j
for j in S - T, not orthogonal for j in T) and omega_max = C(t+L'-1, t)
random combinations of the fresh mini-files W_{d_r, T - r}. Every user in S
strips cached interference and solves an omega_max x omega_max system.

When t + L > K only L' = K - t servers are active; the remaining server
rows stay zero.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from app.config import settings
from app.galois import (
    FieldMatrix,
    FieldVector,
    GaloisField,
    combine,
    constrained_precoder,
    dot,
    get_field,
    inverse_matrix,
    matmul,
    rank,
)
from app.models.content import CacheContents, FileCatalog, PieceKey, PieceLabel, SplitPlan
from app.models.network import LinearNetwork, TransmitBlock, TransmitBlockBuilder
from app.models.schemas import ScenarioConfig
from app.services.base import CachingScheme
from app.utils.exceptions import LedgerOverflow, PrecoderNotFound, SingularDecodeMatrix, SingularMatrix
from app.utils.helpers import UserSubset, binom, subsets, without
from app.utils.validators import ScenarioValidator

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinearPlanParams:
    """t, active servers L', mini-files per sub-file, omega_max and |S|."""

    users: int
    servers: int
    t: int
    active_servers: int
    minifiles: int
    omega_max: int
    subset_size: int

    @classmethod
    def build(cls, users: int, servers: int, t: int) -> "LinearPlanParams":
        active = min(servers, users - t)
        if active == 0:
            # everything cached, nothing to deliver
            return cls(users, servers, t, 0, 1, 1, users)
        return cls(
            users=users,
            servers=servers,
            t=t,
            active_servers=active,
            minifiles=binom(users - t - 1, active - 1),
            omega_max=binom(t + active - 1, t),
            subset_size=t + active,
        )

    @property
    def delivers(self) -> bool:
        return self.active_servers > 0

    @property
    def leaf_count(self) -> int:
        return binom(self.users, self.t) * self.minifiles


@dataclass
class PrecoderSet:
    """u_S^T for every delivery subset S and (t+1)-subset T of S."""

    vectors: dict[tuple[UserSubset, UserSubset], FieldVector] = field(default_factory=dict)
    retries: int = 0

    def __getitem__(self, key: tuple[UserSubset, UserSubset]) -> FieldVector:
        return self.vectors[key]

    def __len__(self) -> int:
        return len(self.vectors)


class MiniFreshLedger:
    """N(r, tau): next unsent mini-file of W_{d_r, tau}, starting at 1."""

    def __init__(self, minifiles: int):
        self.minifiles = minifiles
        self.counters: dict[tuple[int, UserSubset], int] = {}

    def value(self, user: int, tau: UserSubset) -> int:
        return self.counters.get((user, tau), 1)

    def peek(self, user: int, tau: UserSubset) -> int:
        """
        Raises:
            LedgerOverflow: If all mini-files of (user, tau) were sent
        """
        index = self.value(user, tau)
        if index > self.minifiles:
            raise LedgerOverflow(
                message="Mini-file ledger overflow",
                detail=f"user {user}, subset {tau}: index {index} > {self.minifiles}"
            )
        return index

    def advance(self, keys: Sequence[tuple[int, UserSubset]]) -> None:
        for key in keys:
            self.counters[key] = self.value(*key) + 1

    def is_complete(self, users: int, t: int) -> bool:
        """Every (r, tau) with r outside tau reached minifiles + 1."""
        return all(
            self.value(r, tau) == self.minifiles + 1
            for tau in subsets(users, t)
            for r in range(1, users + 1)
            if r not in tau
        )


@dataclass(frozen=True)
class BlockRecord:
    """
    What receivers need to decode block S: the (t+1)-subsets in order, the
    combination coefficients (omega, T, position of r in T) and the mini-file
    index used for each (r, T - r).
    """

    subset: UserSubset
    subsets: tuple[UserSubset, ...]
    coefficients: np.ndarray
    minis: dict[tuple[int, UserSubset], int]


class _SingularBlock(Exception):
    """Some member of S would face a singular combination matrix."""


def design_precoders(gf: GaloisField, network: LinearNetwork, params: LinearPlanParams,
                     rng: np.random.Generator, max_retries: int | None = None) -> PrecoderSet:
    """
    Zero-forcing precoders for every (S, T), verified by direct dot products.

    Raises:
        PrecoderNotFound: If the field is too small for some constraint set
    """
    precoders = PrecoderSet()
    if not params.delivers:
        return precoders
    L = params.active_servers

    def count_retry() -> None:
        precoders.retries += 1

    for S in subsets(params.users, params.subset_size):
        for T in subsets(S, params.t + 1):
            perp = [network.row(j, L) for j in S if j not in T]
            nonperp = [network.row(j, L) for j in T]
            u = constrained_precoder(gf, perp, nonperp, L, rng, max_retries, on_retry=count_retry)
            if any(dot(gf, u, h) for h in perp) or not all(dot(gf, u, h) for h in nonperp):
                raise PrecoderNotFound(message="Precoder failed verification", detail=f"S={S}, T={T}")
            precoders.vectors[(S, T)] = u
    if precoders.retries:
        logger.info(f"Precoder design needed {precoders.retries} extra draws over GF(2^{gf.m})")
    return precoders


class LinearScheme(CachingScheme):
    """Zero-forcing coded caching through a random linear network."""

    name = "linear"

    def __init__(self, gf: GaloisField, users: int, n_files: int, t: int, symbols_per_file: int,
                 network: LinearNetwork, precoder_rng: np.random.Generator,
                 coefficient_rng: np.random.Generator):
        super().__init__(gf, users, n_files)
        self.params = LinearPlanParams.build(users, network.servers, t)
        self.network = network
        self.coefficient_rng = coefficient_rng
        self.singular_retries = 0
        self.plan = SplitPlan(
            scheme=self.name,
            symbols_per_file=symbols_per_file,
            labels=tuple(
                PieceLabel(tau, 0, j)
                for tau in subsets(users, t)
                for j in range(1, self.params.minifiles + 1)
            ),
        )
        self.precoders = design_precoders(gf, network, self.params, precoder_rng)
        if self.params.delivers and self.params.active_servers < network.servers:
            logger.info(
                f"Activating {self.params.active_servers} of {network.servers} servers "
                f"(t + L = {t + network.servers} > K = {users})"
            )

    @classmethod
    def from_config(cls, config: ScenarioConfig, network: LinearNetwork | None = None) -> "LinearScheme":
        """
        Build with rng streams derived from config.seed; samples H unless given.

        Raises:
            NonIntegralT: If KM/N is not an integer
            IndivisibleSplit: If F/m is not a multiple of C(K,t) C(K-t-1, L'-1)
            PrecoderNotFound, RankDeficientNetwork: If the field is too small
        """
        gf = get_field(config.m)
        t = ScenarioValidator.integral_t(config.K, config.M, config.N)
        active = min(config.L, config.K - t) or config.L
        if network is None:
            network = LinearNetwork.sample(gf, config.K, config.L, np.random.default_rng([config.seed, 1]),
                                           active_servers=active)
        return cls(gf, config.K, config.N, t, config.symbols_per_file, network,
                   precoder_rng=np.random.default_rng([config.seed, 2]),
                   coefficient_rng=np.random.default_rng([config.seed, 3]))

    @property
    def delivery_subsets(self) -> list[UserSubset]:
        if not self.params.delivers:
            return []
        return subsets(self.users, self.params.subset_size)

    def place(self, catalog: FileCatalog) -> list[CacheContents]:
        """User k stores every mini-file of W_{n, tau} with k in tau."""
        self.check_catalog(catalog)
        caches = self._empty_caches(self.users)
        for cache in caches:
            for file_id in range(1, self.n_files + 1):
                for label in self.plan.labels:
                    if cache.user in label.subset:
                        cache.store(PieceKey(file_id, label), catalog.piece(self.plan, file_id, label))
        return caches

    def _draw_coefficients(self, count: int) -> np.ndarray:
        shape = (self.params.omega_max, count, self.params.t + 1)
        if self.params.omega_max == 1:
            return np.ones(shape, dtype=np.int64)
        return self.gf.random_elements(self.coefficient_rng, shape, nonzero=True)

    def channel_gain(self, user: int, S: UserSubset, T: UserSubset) -> int:
        """dot(h_k, u_S^T) over the active servers."""
        return dot(self.gf, self.network.row(user, self.params.active_servers), self.precoders[(S, T)])

    def decode_matrix(self, user: int, record: BlockRecord) -> FieldMatrix:
        """A[omega, i] = dot(h_k, u_S^{T_i}) * c^omega_{T_i, k} over the T_i containing k."""
        own = [(i, T) for i, T in enumerate(record.subsets) if user in T]
        A = np.zeros((self.params.omega_max, len(own)), dtype=np.int64)
        for col, (i, T) in enumerate(own):
            gain = self.channel_gain(user, record.subset, T)
            for w in range(self.params.omega_max):
                A[w, col] = self.gf.mul(gain, int(record.coefficients[w, i, T.index(user)]))
        return A

    def build_block(self, S: UserSubset, ledger: MiniFreshLedger, catalog: FileCatalog,
                    demands: Sequence[int]) -> tuple[FieldMatrix, BlockRecord]:
        """
        [X_1(S), ..., X_omega_max(S)] with X_w(S) = sum_T u_S^T G_w(T) and
        G_w(T) = sum_{r in T} c^w_{T,r} W^{N(r, T-r)}_{d_r, T-r}. The ledger is
        only read here; the caller advances it once the block is accepted.
        """
        Ts = tuple(subsets(S, self.params.t + 1))
        minis: dict[tuple[int, UserSubset], int] = {}
        pieces: list[list[FieldVector]] = []
        for T in Ts:
            row = []
            for r in T:
                tau = without(T, r)
                j = ledger.peek(r, tau)
                minis[(r, tau)] = j
                row.append(catalog.piece(self.plan, demands[r - 1], PieceLabel(tau, 0, j)))
            pieces.append(row)

        coefficients = self._draw_coefficients(len(Ts))
        length = self.plan.piece_length
        L = self.params.active_servers
        X = np.zeros((L, self.params.omega_max * length), dtype=np.int64)
        for w in range(self.params.omega_max):
            cols = slice(w * length, (w + 1) * length)
            for i, T in enumerate(Ts):
                G = combine(self.gf, coefficients[w, i], pieces[i])
                u = self.precoders[(S, T)]
                for l in range(L):
                    if u[l]:
                        X[l, cols] ^= self.gf.scale(int(u[l]), G)
        return X, BlockRecord(subset=S, subsets=Ts, coefficients=coefficients, minis=minis)

    def _checked_block(self, S: UserSubset, ledger: MiniFreshLedger, catalog: FileCatalog,
                       demands: Sequence[int]) -> tuple[FieldMatrix, BlockRecord]:
        """Build a block, re-randomizing while any member's decode matrix is singular."""

        def attempt() -> tuple[FieldMatrix, BlockRecord]:
            X, record = self.build_block(S, ledger, catalog, demands)
            for k in S:
                if rank(self.gf, self.decode_matrix(k, record)) < self.params.omega_max:
                    raise _SingularBlock()
            return X, record

        def count_retry(state) -> None:
            self.singular_retries += 1
            logger.warning(f"⚠️ Singular combination matrix in block {S}, re-randomizing")

        retrying = Retrying(
            stop=stop_after_attempt(settings.singular_max_attempts),
            retry=retry_if_exception_type(_SingularBlock),
            after=count_retry,
            reraise=True,
        )
        try:
            return retrying(attempt)
        except _SingularBlock:
            raise SingularDecodeMatrix(
                message="Combination matrix stayed singular",
                detail=f"block {S} after {settings.singular_max_attempts} attempts over GF(2^{self.gf.m}); use a larger m"
            )

    def deliver(self, catalog: FileCatalog, demands: Sequence[int],
                ledger: MiniFreshLedger | None = None) -> TransmitBlock:
        """Blocks for all (t+L')-subsets in lexicographic order; inactive server rows stay zero."""
        self.check_catalog(catalog)
        ledger = ledger if ledger is not None else MiniFreshLedger(self.params.minifiles)
        builder = TransmitBlockBuilder(servers=self.network.servers)
        for S in self.delivery_subsets:
            X, record = self._checked_block(S, ledger, catalog, demands)
            ledger.advance(list(record.minis))
            padded = np.zeros((self.network.servers, X.shape[1]), dtype=np.int64)
            padded[:X.shape[0]] = X
            builder.append(padded, record=record)
        return builder.build()

    def receive(self, block: TransmitBlock, user: int) -> FieldVector:
        """Row k of H X."""
        return self.network.receive_user(block, user)

    def decode(self, user: int, cache: CacheContents, received: FieldVector,
               block: TransmitBlock, demands: Sequence[int]) -> FieldVector:
        """
        For each block S containing the user: subtract the cached terms of the
        other members of every T containing the user, then invert the
        combination matrix to get W_{d_k, T - k} for all those T.

        Raises:
            SingularDecodeMatrix: If a combination matrix is singular
            DecodeFailure: If a needed cached piece is absent
        """
        length = self.plan.piece_length
        recovered = {}
        for group in block.groups:
            record: BlockRecord = group.record
            if user not in record.subset:
                continue
            z = received[group.start:group.stop].reshape(self.params.omega_max, length).copy()
            own = [(i, T) for i, T in enumerate(record.subsets) if user in T]
            for i, T in own:
                gain = self.channel_gain(user, record.subset, T)
                for pos, r in enumerate(T):
                    if r == user:
                        continue
                    tau = without(T, r)
                    cached = self._cached(cache, PieceKey(demands[r - 1], PieceLabel(tau, 0, record.minis[(r, tau)])))
                    for w in range(self.params.omega_max):
                        z[w] ^= self.gf.scale(self.gf.mul(gain, int(record.coefficients[w, i, pos])), cached)
            try:
                inverse = inverse_matrix(self.gf, self.decode_matrix(user, record))
            except SingularMatrix as e:
                raise SingularDecodeMatrix(
                    message=f"User {user} cannot invert its combination matrix",
                    detail=f"block {record.subset}: {e.detail}"
                )
            solution = matmul(self.gf, inverse, z)
            for col, (i, T) in enumerate(own):
                tau = without(T, user)
                recovered[PieceLabel(tau, 0, record.minis[(user, tau)])] = solution[col]
        return self._reassemble(user, cache, demands[user - 1], recovered)
