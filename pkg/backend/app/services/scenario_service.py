"""
Service layer for scenario runs, memory sweeps and the worked-example table.
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
from pydantic import ValidationError as PydanticValidationError

from app.config import settings
from app.middleware.logging import LoggingMiddleware
from app.models.content import CacheContents, FileCatalog
from app.models.schemas import (
    DelayReport,
    PartitionProfile,
    RunRecord,
    ScenarioConfig,
    ScenarioSpec,
    VerificationRow,
)
from app.services.base import CachingScheme
from app.services.bounds import (
    cutset_bound,
    dedicated_corners,
    dedicated_delay,
    flexible_corner_set,
    flexible_pair,
    linear_corners,
    linear_delay,
    padded_users,
    single_server_corners,
    single_server_delay,
)
from app.services.dedicated import DedicatedScheme
from app.services.flexible import FlexibleScheme, flex_params
from app.services.linear import LinearPlanParams, LinearScheme
from app.services.single_server import SingleServerScheme
from app.utils.exceptions import (
    AppException,
    CacheOverflow,
    DecodeFailure,
    DomainError,
    FieldExhaustedError,
    GuardrailExceeded,
    InvalidProfile,
    ValidationError,
)
from app.utils.helpers import binom, parse_int_list
from app.utils.validators import ScenarioValidator

logger = logging.getLogger(__name__)

# rng stream ids under default_rng([seed, stream])
FILE_STREAM = 0
DEMAND_STREAM = 4


@dataclass
class PreparedScenario:
    """A scheme instance ready to run, with the delays it should achieve."""

    spec: ScenarioSpec
    config: ScenarioConfig
    scheme: CachingScheme
    formula_delay: Fraction
    lower_bound: Fraction


class ScenarioService:
    """
    Runs placement, delivery and decoding for one scenario and compares
    the measured delay against the closed-form one.
    """

    def __init__(self, middleware: LoggingMiddleware | None = None):
        self.middleware = middleware or LoggingMiddleware()

    # Parameter resolution

    def resolve_flexible_profile(self, spec: ScenarioSpec) -> Optional[PartitionProfile]:
        """
        The profile a flexible run uses, or None when M = N (whole-file placement).

        Raises:
            InvalidProfile: If neither a profile nor a matching corner M is given
        """
        if spec.profile is not None:
            profile = PartitionProfile.parse(spec.profile, spec.K, spec.L)
            if spec.M is not None:
                M, _ = flexible_pair(spec.K, spec.L, spec.N, profile)
                if M != spec.M:
                    raise InvalidProfile(
                        message="Profile and M disagree",
                        detail=f"profile {profile} achieves M={M}, requested M={spec.M}"
                    )
            return profile
        if spec.M is None:
            raise InvalidProfile(
                message="Flexible run needs a profile or a cache size",
                detail="pass --profile p_1,...,p_L or --M at a corner"
            )
        if spec.M == spec.N:
            return None
        corners = flexible_corner_set(spec.K, spec.L, spec.N)
        for corner in corners:
            if corner.M == spec.M:
                return corner.profile
        available = ", ".join(f"M={c.M} ({c.profile})" for c in corners) or "none (need K >= 2L)"
        raise InvalidProfile(
            message="No flexible profile achieves this M",
            detail=f"M={spec.M}; available corners: {available}"
        )

    def prepare(self, spec: ScenarioSpec) -> PreparedScenario:
        """
        Build the scheme with the smallest file size its split plan allows
        (times file_multiple) and check the desk-scale guardrails.

        Raises:
            ValidationError: If any parameter is rejected
            FieldExhaustedError: If the field is too small for the linear scheme
        """
        K, L, N = spec.K, spec.L, spec.N
        profile = None
        route = spec.scheme
        if spec.scheme == "flexible":
            profile = self.resolve_flexible_profile(spec)
            if profile is None:
                route = "single"
            M = spec.M if profile is None else flexible_pair(K, L, N, profile)[0]
        elif spec.M is None:
            raise DomainError(message="M is required", detail=f"scheme {spec.scheme} runs at a single cache size")
        else:
            M = spec.M
        M = ScenarioValidator.validate_cache_size(M, N)

        if route == "single":
            t = ScenarioValidator.integral_t(K, M, N)
            leaves = binom(K, t)
        elif route == "dedicated":
            g = padded_users(K, L) // L
            t = ScenarioValidator.integral_t(g, M, N, label="K'M/(LN)")
            leaves = binom(g, t)
        elif route == "linear":
            t = ScenarioValidator.integral_t(K, M, N)
            leaves = LinearPlanParams.build(K, L, t).leaf_count
        else:
            leaves = flex_params(K, L, profile).pico_count

        F = spec.m * leaves * spec.file_multiple
        ScenarioValidator.validate_guardrails(K, F, spec.force)
        try:
            config = ScenarioConfig(K=K, L=L, N=N, M=M, F=F, m=spec.m, seed=spec.seed)
        except PydanticValidationError as e:
            raise ValidationError(message="Scenario configuration rejected", detail=str(e))

        if route == "single":
            scheme = SingleServerScheme.from_config(config)
        elif route == "dedicated":
            scheme = DedicatedScheme.from_config(config)
        elif route == "linear":
            scheme = LinearScheme.from_config(config)
        else:
            scheme = FlexibleScheme.from_config(config, profile)

        servers = 1 if spec.scheme == "single" else L
        return PreparedScenario(
            spec=spec,
            config=config,
            scheme=scheme,
            formula_delay=self.formula_delay(spec.scheme, K, L, M, N, profile),
            lower_bound=cutset_bound(K, servers, M, N),
        )

    @staticmethod
    def formula_delay(scheme: str, K: int, L: int, M: Fraction, N: int,
                      profile: PartitionProfile | None = None) -> Fraction:
        """Closed-form delay of a scheme in units of F/m."""
        if scheme == "single":
            return single_server_delay(K, M, N)
        if scheme == "dedicated":
            return dedicated_delay(K, L, M, N)
        if scheme == "linear":
            return linear_delay(K, L, M, N)
        if profile is None:
            return Fraction(0)
        return flexible_pair(K, L, N, profile)[1]

    def demand_vectors(self, spec: ScenarioSpec) -> list[tuple[int, ...]]:
        """
        Raises:
            GuardrailExceeded: If a full sweep has more than max_demand_vectors vectors
            ValidationError: If an explicit demand list is malformed
        """
        K, N = spec.K, spec.N
        if spec.demands == "all-distinct":
            return [tuple(range(1, K + 1))]
        if spec.demands == "sweep":
            count = N ** K
            if count > settings.max_demand_vectors and not spec.force:
                raise GuardrailExceeded(
                    message="Demand sweep too large",
                    detail=f"N^K = {count} > {settings.max_demand_vectors}; use random:<count> or --force"
                )
            return list(itertools.product(range(1, N + 1), repeat=K))
        match = ScenarioValidator.RANDOM_DEMANDS_PATTERN.match(spec.demands)
        if match:
            rng = np.random.default_rng([spec.seed, DEMAND_STREAM])
            draws = rng.integers(1, N + 1, size=(int(match.group(1)), K))
            return [tuple(int(d) for d in row) for row in draws]
        return [ScenarioValidator.validate_demands(parse_int_list(spec.demands), K, N)]

    # Running

    def _check_memory(self, caches: list[CacheContents], M: Fraction, F: int) -> None:
        """
        Raises:
            CacheOverflow: If a real user stores more than MF bits
        """
        for cache in caches:
            if cache.virtual:
                continue
            used = cache.memory_used()
            if used > M * F:
                raise CacheOverflow(
                    message="Placement exceeds the cache size",
                    detail=f"user {cache.user} stores {used} bits, MF = {M * F}"
                )
            if used < M * F:
                logger.warning(f"⚠️ User {cache.user} stores {used} bits, below MF = {M * F}")

    def _decode_all(self, prepared: PreparedScenario, catalog: FileCatalog,
                    caches: list[CacheContents], demands: tuple[int, ...]) -> tuple[int, int]:
        """Deliver once and decode every real user; returns (slots, failures)."""
        scheme = prepared.scheme
        block = scheme.deliver(catalog, demands)
        received = scheme.network.receive(block)
        failures = 0
        for user in range(1, scheme.users + 1):
            try:
                symbols = scheme.decode(user, caches[user - 1], received[user - 1], block, demands)
            except DecodeFailure as e:
                logger.error(f"❌ User {user} failed to decode demands {demands}: {e.message} ({e.detail})")
                failures += 1
                continue
            if not np.array_equal(symbols, catalog.file(demands[user - 1])):
                logger.error(f"❌ User {user} decoded a wrong W_{demands[user - 1]} for demands {demands}")
                failures += 1
        return block.slot_count, failures

    def _execute(self, spec: ScenarioSpec) -> RunRecord:
        logger.info(f"🚀 Running {spec.label()}")
        prepared = self.prepare(spec)
        config, scheme = prepared.config, prepared.scheme
        vectors = self.demand_vectors(spec)

        catalog = FileCatalog.generate(scheme.gf, config.N, config.symbols_per_file,
                                       np.random.default_rng([config.seed, FILE_STREAM]))
        caches = scheme.place(catalog)
        self._check_memory(caches, config.M, config.F)

        measured = 0
        failures = 0
        for demands in vectors:
            slots, missed = self._decode_all(prepared, catalog, caches, demands)
            measured = max(measured, slots)
            failures += missed

        report = DelayReport(
            scheme=spec.scheme,
            formula_delay=prepared.formula_delay,
            measured_slots=measured,
            symbols_per_file=config.symbols_per_file,
            lower_bound=prepared.lower_bound,
        )
        if not report.matches_formula:
            logger.warning(
                f"⚠️ Measured delay {report.measured_delay} differs from formula {report.formula_delay}"
            )
        record = RunRecord(
            spec=spec,
            report=report,
            M=config.M,
            F_bits=config.F,
            decode_ok=failures == 0,
            decode_failures=failures,
            demand_vectors=len(vectors),
            failure_kind="decode" if failures else None,
        )
        if isinstance(scheme, LinearScheme):
            record.precoder_retries = scheme.precoders.retries
            record.singular_retries = scheme.singular_retries
            record.ntm_resamples = scheme.network.resamples
            record.active_servers = scheme.params.active_servers
        if failures:
            logger.error(f"❌ {failures} decode failures over {len(vectors)} demand vectors")
        else:
            logger.info(f"✅ All users decoded over {len(vectors)} demand vectors")
        return record

    def run_scenario(self, spec: ScenarioSpec) -> RunRecord:
        """
        Run the full pipeline for one scenario.

        Decode failures are counted in the record; rejected parameters and
        field exhaustion propagate.

        Raises:
            ValidationError: If the parameters are rejected
            FieldExhaustedError: If the field is too small for the scheme
        """
        return self.middleware.dispatch(spec, self._execute)

    def failure_record(self, spec: ScenarioSpec, exc: Exception) -> RunRecord:
        """A record for a run that did not complete."""
        if isinstance(exc, ValidationError):
            kind = "rejected"
        elif isinstance(exc, FieldExhaustedError):
            kind = "field_exhausted"
        elif isinstance(exc, DecodeFailure):
            kind = "decode"
        else:
            kind = "error"
        message = f"{exc.message}: {exc.detail}" if isinstance(exc, AppException) and exc.detail else str(exc)
        return RunRecord(spec=spec, M=spec.M, failure_kind=kind, error=message)

    def run_safely(self, spec: ScenarioSpec) -> RunRecord:
        """run_scenario, recording any failure instead of raising it."""

        def guarded(s: ScenarioSpec) -> RunRecord:
            try:
                return self._execute(s)
            except AppException as e:
                log = logger.warning if isinstance(e, ValidationError) else logger.error
                log(f"⚠️ {s.label()} did not complete: {e.message} ({e.detail})")
                return self.failure_record(s, e)

        return self.middleware.dispatch(spec, guarded)

    # Sweeps

    def sweep_points(self, spec: ScenarioSpec, servers: list[int] | None = None) -> list[ScenarioSpec]:
        """One spec per corner M (per server count when several are given)."""
        points = []
        for L in servers or [spec.L]:
            base = spec.model_copy(update={"L": L, "M": None, "profile": None})
            if spec.scheme == "flexible":
                corners = flexible_corner_set(spec.K, L, spec.N)
                if not corners:
                    points.append(base)
                    continue
                points.extend(base.model_copy(update={"M": c.M, "profile": c.profile.p}) for c in corners)
                points.append(base.model_copy(update={"M": Fraction(spec.N)}))
                continue
            if spec.scheme == "single":
                corners = single_server_corners(spec.K, spec.N)
            elif spec.scheme == "dedicated":
                corners = dedicated_corners(spec.K, L, spec.N)
            else:
                corners = linear_corners(spec.K, L, spec.N)
            points.extend(base.model_copy(update={"M": M}) for M, _ in corners)
        return points

    def sweep_memory(self, spec: ScenarioSpec, servers: list[int] | None = None) -> list[RunRecord]:
        """
        Run every corner of the memory-delay curve. Points run concurrently;
        records come back in sweep order and failed points are recorded.
        """
        points = self.sweep_points(spec, servers)
        logger.info(f"🚀 Sweeping {len(points)} points for {spec.scheme} K={spec.K} N={spec.N}")
        with ThreadPoolExecutor(max_workers=settings.sweep_workers) as pool:
            records = list(pool.map(self.run_safely, points))
        failed = sum(1 for r in records if r.failure_kind)
        logger.info(f"✅ Sweep finished: {len(records) - failed} ok, {failed} failed")
        return records

    # Worked examples

    def example_table(self, seed: int = 0) -> list[tuple[str, ScenarioSpec, Fraction]]:
        """(name, spec, expected delay) for every worked example."""
        rows = [
            ("single server, K=4 M=2",
             ScenarioSpec(scheme="single", K=4, N=4, M=2, seed=seed), Fraction(2, 3)),
            ("dedicated, K=4 L=2 M=2",
             ScenarioSpec(scheme="dedicated", K=4, L=2, N=4, M=2, seed=seed), Fraction(1, 2)),
            ("flexible, K=4 L=2 p=2,2",
             ScenarioSpec(scheme="flexible", K=4, L=2, N=4, profile=(2, 2), seed=seed), Fraction(3, 4)),
            ("linear, K=3 L=2 M=1",
             ScenarioSpec(scheme="linear", K=3, L=2, N=3, M=1, seed=seed), Fraction(2, 3)),
        ]
        expected = {
            2: [Fraction(2), Fraction(1), Fraction(1, 2), Fraction(1, 4), Fraction(0)],
            3: [Fraction(4, 3), Fraction(3, 4), Fraction(1, 2), Fraction(1, 4), Fraction(0)],
        }
        for L, delays in expected.items():
            for M, delay in enumerate(delays):
                rows.append((
                    f"linear, K=4 L={L} M={M}",
                    ScenarioSpec(scheme="linear", K=4, L=L, N=4, M=M, seed=seed),
                    delay,
                ))
        return rows

    def verify_examples(self, seed: int = 0) -> list[VerificationRow]:
        """Run every worked example and compare measured delays exactly."""
        rows = []
        for name, spec, expected in self.example_table(seed):
            record = self.run_safely(spec)
            report = record.report
            measured = report.measured_delay if report else None
            passed = (
                record.decode_ok
                and measured == expected
                and report.formula_delay == expected
            )
            rows.append(VerificationRow(
                name=name,
                spec=spec,
                expected_delay=expected,
                measured_delay=measured,
                decode_ok=record.decode_ok,
                passed=passed,
                detail=record.error,
            ))
            symbol = "✅" if passed else "❌"
            logger.info(f"{symbol} {name}: expected {expected}, measured {measured}")
        return rows


# Global service instance
scenario_service = ScenarioService()
