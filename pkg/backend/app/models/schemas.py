"""
Pydantic schemas for scenario inputs and run outputs.
"""

from fractions import Fraction
from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.config import settings
from app.utils.helpers import parse_int_list, to_fraction
from app.utils.validators import ScenarioValidator

SchemeName = Literal["single", "dedicated", "flexible", "linear"]


def _fraction(value: Any) -> Any:
    if value is None:
        return value
    try:
        return to_fraction(value)
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(str(e))


class PartitionProfile(BaseModel):
    """Class sizes p_1 >= ... >= p_L (each >= 2) and the idle class size Q."""

    p: tuple[int, ...] = Field(..., description="Class sizes served by servers 1..L")
    Q: int = Field(0, ge=0, description="Size of the idle class")

    model_config = ConfigDict(frozen=True)

    @field_validator("p")
    @classmethod
    def validate_sizes(cls, v: tuple[int, ...]) -> tuple[int, ...]:
        if not v:
            raise ValueError("profile needs at least one class")
        if any(size < ScenarioValidator.MIN_CLASS_SIZE for size in v):
            raise ValueError(f"every class size must be at least 2, got {v}")
        return v

    @classmethod
    def parse(cls, sizes: str | tuple[int, ...], K: int, L: int) -> "PartitionProfile":
        """Build from user input, raising InvalidProfile on bad shapes."""
        p, Q = ScenarioValidator.validate_profile(sizes, K, L)
        return cls(p=p, Q=Q)

    @property
    def K(self) -> int:
        return sum(self.p) + self.Q

    @property
    def L(self) -> int:
        return len(self.p)

    @property
    def class_sizes(self) -> tuple[int, ...]:
        """(p_1, ..., p_L, Q)."""
        return self.p + (self.Q,)

    def __str__(self) -> str:
        return f"p={','.join(map(str, self.p))} Q={self.Q}"


class FlexiblePlanParams(BaseModel):
    """alpha_i, gamma_i, x and x_i of the flexible placement."""

    alpha: tuple[int, ...] = Field(..., description="Mini-files per sub-file, C(K, p_i - 1)")
    gamma: tuple[int, ...] = Field(..., description="Pico-files per mini-file")
    x: Fraction = Field(..., description="Pico-file size as a fraction of F")
    x_i: tuple[Fraction, ...] = Field(..., description="Mini-file size of server i as a fraction of F")

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def check_fractions_sum(self) -> "FlexiblePlanParams":
        total = sum((a * xi for a, xi in zip(self.alpha, self.x_i)), Fraction(0))
        if total != 1:
            raise ValueError(f"sub-file fractions sum to {total}, not 1")
        return self

    @property
    def pico_count(self) -> int:
        """Pico-files per file, 1/x."""
        return sum(a * g for a, g in zip(self.alpha, self.gamma))


class ScenarioConfig(BaseModel):
    """Validated parameters of one simulated system."""

    K: int = Field(..., ge=1, description="Users")
    L: int = Field(..., ge=1, description="Servers")
    N: int = Field(..., ge=1, description="Files")
    M: Fraction = Field(..., description="Cache size per user, in files")
    F: int = Field(..., ge=1, description="File size in bits")
    m: int = Field(default_factory=lambda: settings.default_symbol_bits, description="Symbol width in bits")
    seed: int = Field(0, description="PRNG seed")

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("M", mode="before")
    @classmethod
    def parse_cache_size(cls, v: Any) -> Any:
        return _fraction(v)

    @model_validator(mode="after")
    def check_parameters(self) -> "ScenarioConfig":
        try:
            ScenarioValidator.validate_population(self.K, self.L, self.N)
            ScenarioValidator.validate_cache_size(self.M, self.N)
            ScenarioValidator.validate_symbol_width(self.m)
        except Exception as e:
            raise ValueError(str(e))
        if self.F % self.m:
            raise ValueError(f"F={self.F} is not divisible by m={self.m}")
        return self

    @property
    def symbols_per_file(self) -> int:
        return self.F // self.m


class ScenarioSpec(BaseModel):
    """A scenario as requested on the command line or in a config file."""

    scheme: SchemeName = Field(..., description="Caching scheme")
    K: int = Field(..., ge=1, description="Users")
    L: int = Field(1, ge=1, description="Servers")
    N: int = Field(..., ge=1, description="Files")
    M: Optional[Fraction] = Field(None, description="Cache size; omitted for sweeps or profile-driven flexible runs")
    demands: str = Field("all-distinct", description="all-distinct | sweep | random:<count> | explicit list")
    m: int = Field(default_factory=lambda: settings.default_symbol_bits, description="Symbol width in bits")
    seed: int = Field(0, description="PRNG seed")
    profile: Optional[tuple[int, ...]] = Field(None, description="Flexible class sizes p_1..p_L")
    file_multiple: int = Field(1, ge=1, description="Multiple of the minimal file size")
    force: bool = Field(False, description="Bypass desk-scale guardrails")
    out: Optional[Path] = Field(None, description="CSV report path")

    model_config = ConfigDict(
        arbitrary_types_allowed=True,
        json_schema_extra={
            "examples": [
                {"scheme": "linear", "K": 3, "L": 2, "N": 3, "M": "1", "demands": "all-distinct"},
                {"scheme": "flexible", "K": 4, "L": 2, "N": 4, "profile": "2,2"},
            ]
        }
    )

    @field_validator("scheme", mode="before")
    @classmethod
    def validate_scheme(cls, v: Any) -> Any:
        try:
            return ScenarioValidator.validate_scheme(str(v))
        except Exception as e:
            raise ValueError(str(e))

    @field_validator("M", mode="before")
    @classmethod
    def parse_cache_size(cls, v: Any) -> Any:
        if v == "":
            return None
        return _fraction(v)

    @field_validator("profile", mode="before")
    @classmethod
    def parse_profile(cls, v: Any) -> Any:
        if v is None or v == "":
            return None
        try:
            return parse_int_list(v)
        except ValueError as e:
            raise ValueError(f"profile must be a comma-separated list of integers: {e}")

    @field_validator("demands")
    @classmethod
    def validate_demands(cls, v: str) -> str:
        try:
            return ScenarioValidator.validate_demand_mode(v)
        except Exception as e:
            raise ValueError(str(e))

    @field_validator("m")
    @classmethod
    def validate_symbol_width(cls, v: int) -> int:
        try:
            return ScenarioValidator.validate_symbol_width(v)
        except Exception as e:
            raise ValueError(str(e))

    @model_validator(mode="after")
    def check_population(self) -> "ScenarioSpec":
        try:
            ScenarioValidator.validate_population(self.K, self.L, self.N)
            if self.M is not None:
                ScenarioValidator.validate_cache_size(self.M, self.N)
        except Exception as e:
            raise ValueError(str(e))
        return self

    def label(self) -> str:
        M = "sweep" if self.M is None else str(self.M)
        return f"{self.scheme} K={self.K} L={self.L} N={self.N} M={M}"


class DelayReport(BaseModel):
    """Formula, measured and lower-bound delays in units of F/m slots."""

    scheme: SchemeName
    formula_delay: Fraction
    measured_slots: Optional[int] = None
    symbols_per_file: Optional[int] = None
    lower_bound: Fraction
    gap_ratio: Optional[Fraction] = None

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def attach_gap(self) -> "DelayReport":
        if self.lower_bound > 0:
            self.gap_ratio = self.formula_delay / self.lower_bound
        return self

    @property
    def measured_delay(self) -> Optional[Fraction]:
        if self.measured_slots is None or not self.symbols_per_file:
            return None
        return Fraction(self.measured_slots, self.symbols_per_file)

    @property
    def matches_formula(self) -> bool:
        return self.measured_delay == self.formula_delay


class RunRecord(BaseModel):
    """Outcome of one scenario run."""

    spec: ScenarioSpec
    report: Optional[DelayReport] = None
    M: Optional[Fraction] = Field(None, description="Cache size actually run")
    F_bits: int = 0
    decode_ok: bool = False
    decode_failures: int = 0
    demand_vectors: int = 0
    precoder_retries: int = 0
    singular_retries: int = 0
    ntm_resamples: int = 0
    active_servers: Optional[int] = None
    wall_time: float = 0.0
    failure_kind: Optional[Literal["rejected", "field_exhausted", "decode", "error"]] = None
    error: Optional[str] = None

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def check_decode_flag(self) -> "RunRecord":
        if self.decode_ok and self.decode_failures:
            raise ValueError("decode_ok requires zero decode failures")
        return self


class VerificationRow(BaseModel):
    """One row of the worked-example table."""

    name: str
    spec: ScenarioSpec
    expected_delay: Fraction
    measured_delay: Optional[Fraction] = None
    decode_ok: bool = False
    passed: bool = False
    detail: Optional[str] = None

    model_config = ConfigDict(arbitrary_types_allowed=True)
