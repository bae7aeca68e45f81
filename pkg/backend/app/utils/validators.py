"""
Scenario parameter validators.
Each check raises a ValidationError subclass whose message names the violated condition.
"""

import re
from fractions import Fraction

from app.config import settings
from app.utils.exceptions import (
    DomainError,
    GuardrailExceeded,
    IndivisibleSplit,
    InvalidProfile,
    NonIntegralT,
    ValidationError,
)
from app.utils.helpers import parse_int_list, to_fraction


class ScenarioValidator:
    """Validator class with reusable checks for scenario parameters."""

    SCHEMES = ("single", "dedicated", "flexible", "linear")
    MIN_SYMBOL_BITS = 1
    MAX_SYMBOL_BITS = 32
    MIN_CLASS_SIZE = 2
    DEMAND_MODES = ("all-distinct", "sweep")
    RANDOM_DEMANDS_PATTERN = re.compile(r"^random:(\d+)$")

    @staticmethod
    def validate_scheme(scheme: str) -> str:
        scheme = scheme.strip().lower()
        if scheme not in ScenarioValidator.SCHEMES:
            raise ValidationError(
                message=f"Unknown scheme '{scheme}'",
                detail=f"scheme must be one of {', '.join(ScenarioValidator.SCHEMES)}"
            )
        return scheme

    @staticmethod
    def validate_population(K: int, L: int, N: int) -> None:
        """
        Validate user, server and file counts.

        Raises:
            ValidationError: If a count is not positive or N < K
        """
        for name, value in (("K", K), ("L", L), ("N", N)):
            if value < 1:
                raise ValidationError(
                    message=f"{name} must be positive",
                    detail=f"got {name}={value}"
                )
        if N < K:
            raise ValidationError(
                message="N must be at least K",
                detail=f"the library needs N >= K files, got N={N}, K={K}"
            )

    @staticmethod
    def validate_cache_size(M: Fraction | int | str, N: int) -> Fraction:
        """
        Validate the per-user cache size in files.

        Returns:
            Fraction: M as an exact rational

        Raises:
            DomainError: If M is not a rational in [0, N]
        """
        try:
            M = to_fraction(M)
        except (ValueError, ZeroDivisionError) as e:
            raise DomainError(message="M is not an exact rational", detail=str(e))
        if M < 0 or M > N:
            raise DomainError(
                message="M out of range",
                detail=f"cache size must satisfy 0 <= M <= N={N}, got {M}"
            )
        return M

    @staticmethod
    def integral_t(users: int, M: Fraction, N: int, label: str = "KM/N") -> int:
        """
        Return users*M/N as an int.

        Raises:
            NonIntegralT: If users*M/N is not an integer
        """
        t = Fraction(users) * M / N
        if t.denominator != 1:
            raise NonIntegralT(
                message=f"{label} is not an integer",
                detail=f"{label} = {users}*{M}/{N} = {t}; choose M at a corner point"
            )
        return int(t)

    @staticmethod
    def validate_symbol_width(m: int) -> int:
        if not ScenarioValidator.MIN_SYMBOL_BITS <= m <= ScenarioValidator.MAX_SYMBOL_BITS:
            raise ValidationError(
                message="Symbol width out of range",
                detail=f"m must be between 1 and 32, got {m}"
            )
        return m

    @staticmethod
    def validate_split(symbols_per_file: int, leaves: int, what: str) -> int:
        """
        Return the leaf length in symbols.

        Raises:
            IndivisibleSplit: If the file does not split into equal leaves
        """
        if leaves < 1 or symbols_per_file % leaves:
            raise IndivisibleSplit(
                message=f"F/m is not divisible by the {what} count",
                detail=f"{symbols_per_file} symbols per file cannot be split into {leaves} equal pieces"
            )
        return symbols_per_file // leaves

    @staticmethod
    def validate_profile(sizes: str | tuple[int, ...], K: int, L: int) -> tuple[tuple[int, ...], int]:
        """
        Validate a flexible partition profile (p_1, ..., p_L).

        Returns:
            tuple: (p sorted non-increasing, Q = K - sum(p))

        Raises:
            InvalidProfile: If the profile has the wrong length, a class below 2, or sums past K
        """
        try:
            p = parse_int_list(sizes)
        except ValueError as e:
            raise InvalidProfile(message="Profile is not a list of integers", detail=str(e))
        if len(p) != L:
            raise InvalidProfile(
                message="Profile length differs from L",
                detail=f"expected {L} class sizes, got {len(p)}"
            )
        if any(size < ScenarioValidator.MIN_CLASS_SIZE for size in p):
            raise InvalidProfile(
                message="Every class size must be at least 2",
                detail=f"got p={p}"
            )
        Q = K - sum(p)
        if Q < 0:
            raise InvalidProfile(
                message="Class sizes exceed K",
                detail=f"sum(p)={sum(p)} > K={K}"
            )
        return tuple(sorted(p, reverse=True)), Q

    @staticmethod
    def validate_demands(demands: tuple[int, ...] | list[int], K: int, N: int) -> tuple[int, ...]:
        demands = tuple(int(d) for d in demands)
        if len(demands) != K:
            raise ValidationError(
                message="Demand vector length differs from K",
                detail=f"expected {K} demands, got {len(demands)}"
            )
        bad = [d for d in demands if not 1 <= d <= N]
        if bad:
            raise ValidationError(
                message="Demand out of range",
                detail=f"file indices must lie in [1, {N}], got {bad}"
            )
        return demands

    @staticmethod
    def validate_demand_mode(mode: str) -> str:
        """Accept 'all-distinct', 'sweep', 'random:<count>' or an explicit comma list."""
        mode = mode.strip().lower()
        if mode in ScenarioValidator.DEMAND_MODES or ScenarioValidator.RANDOM_DEMANDS_PATTERN.match(mode):
            return mode
        try:
            parse_int_list(mode)
        except ValueError:
            raise ValidationError(
                message=f"Unknown demand mode '{mode}'",
                detail="use all-distinct, sweep, random:<count> or a list such as 1,2,3"
            )
        return mode

    @staticmethod
    def validate_guardrails(K: int, file_bits: int, force: bool = False) -> None:
        """
        Refuse scenarios beyond desk scale unless forced.

        Raises:
            GuardrailExceeded: If K > max_users or F > max_file_bits
        """
        if force:
            return
        if K > settings.max_users:
            raise GuardrailExceeded(
                message="K exceeds the desk-scale limit",
                detail=f"K={K} > {settings.max_users}; pass --force to run anyway"
            )
        if file_bits > settings.max_file_bits:
            raise GuardrailExceeded(
                message="F exceeds the desk-scale limit",
                detail=f"F={file_bits} bits > {settings.max_file_bits}; pass --force to run anyway"
            )
