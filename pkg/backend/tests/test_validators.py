"""
Tests for scenario parameter validation.
"""

from fractions import Fraction

import pytest

from app.utils.exceptions import (
    DomainError,
    GuardrailExceeded,
    IndivisibleSplit,
    InvalidProfile,
    NonIntegralT,
    ValidationError,
)
from app.utils.validators import ScenarioValidator


class TestPopulationValidation:
    """K, L and N."""

    def test_valid_population(self):
        """Positive counts with N >= K pass."""
        ScenarioValidator.validate_population(4, 2, 4)

    def test_zero_servers(self):
        """L = 0 is rejected."""
        with pytest.raises(ValidationError) as exc_info:
            ScenarioValidator.validate_population(4, 0, 4)
        assert "L must be positive" in exc_info.value.message

    def test_fewer_files_than_users(self):
        """N < K is rejected."""
        with pytest.raises(ValidationError) as exc_info:
            ScenarioValidator.validate_population(5, 2, 4)
        assert "N >= K" in exc_info.value.detail


class TestCacheSizeValidation:
    """M as an exact rational in [0, N]."""

    def test_fraction_string(self):
        """'3/2' parses exactly."""
        assert ScenarioValidator.validate_cache_size("3/2", 4) == Fraction(3, 2)

    def test_integer(self):
        """Integers become Fractions."""
        assert ScenarioValidator.validate_cache_size(2, 4) == Fraction(2)

    def test_out_of_range(self):
        """M > N is outside the domain."""
        with pytest.raises(DomainError):
            ScenarioValidator.validate_cache_size(5, 4)

    def test_not_rational(self):
        """Garbage input is a DomainError."""
        with pytest.raises(DomainError):
            ScenarioValidator.validate_cache_size("two", 4)


class TestIntegralT:
    """KM/N at corner points."""

    def test_corner(self):
        """K=4, M=2, N=4 gives t=2."""
        assert ScenarioValidator.integral_t(4, Fraction(2), 4) == 2

    def test_off_corner(self):
        """K=4, M=1/2, N=3 is not a corner and the message names KM/N."""
        with pytest.raises(NonIntegralT) as exc_info:
            ScenarioValidator.integral_t(4, Fraction(1, 2), 3)
        assert "KM/N" in exc_info.value.message

    def test_group_label(self):
        """The dedicated check names its own condition."""
        with pytest.raises(NonIntegralT) as exc_info:
            ScenarioValidator.integral_t(3, Fraction(1), 4, label="K'M/(LN)")
        assert "K'M/(LN)" in exc_info.value.message


class TestProfileValidation:
    """Flexible partition profiles."""

    def test_sorted_with_idle_class(self):
        """Sizes are sorted non-increasing and Q fills up to K."""
        assert ScenarioValidator.validate_profile("2,3", 7, 2) == ((3, 2), 2)

    def test_wrong_length(self):
        """The profile needs one size per server."""
        with pytest.raises(InvalidProfile):
            ScenarioValidator.validate_profile((2, 2, 2), 6, 2)

    def test_class_of_one(self):
        """Classes of a single user are not allowed."""
        with pytest.raises(InvalidProfile):
            ScenarioValidator.validate_profile((3, 1), 4, 2)

    def test_sum_past_k(self):
        """Classes cannot cover more than K users."""
        with pytest.raises(InvalidProfile):
            ScenarioValidator.validate_profile((3, 3), 5, 2)


class TestDemandValidation:
    """Demand modes and explicit vectors."""

    @pytest.mark.parametrize("mode", ["all-distinct", "sweep", "random:10", "1,2,2"])
    def test_valid_modes(self, mode):
        """Every documented mode is accepted."""
        assert ScenarioValidator.validate_demand_mode(mode) == mode

    def test_unknown_mode(self):
        """Anything else is rejected."""
        with pytest.raises(ValidationError):
            ScenarioValidator.validate_demand_mode("random")

    def test_vector_length(self):
        """A demand vector has exactly K entries."""
        with pytest.raises(ValidationError):
            ScenarioValidator.validate_demands((1, 2), 3, 3)

    def test_vector_range(self):
        """Indices lie in [1, N]."""
        with pytest.raises(ValidationError) as exc_info:
            ScenarioValidator.validate_demands((1, 4, 0), 3, 3)
        assert "[4, 0]" in exc_info.value.detail


class TestSplitAndWidth:
    """File splits and symbol widths."""

    def test_split(self):
        """12 symbols split into 6 leaves of 2."""
        assert ScenarioValidator.validate_split(12, 6, "sub-file") == 2

    def test_indivisible_split(self):
        """10 symbols do not split into 6 leaves."""
        with pytest.raises(IndivisibleSplit):
            ScenarioValidator.validate_split(10, 6, "sub-file")

    def test_symbol_width(self):
        """m beyond 32 bits is rejected."""
        with pytest.raises(ValidationError):
            ScenarioValidator.validate_symbol_width(33)


class TestGuardrails:
    """Desk-scale limits."""

    def test_too_many_users(self):
        """K=13 needs --force."""
        with pytest.raises(GuardrailExceeded):
            ScenarioValidator.validate_guardrails(13, 16)

    def test_file_too_large(self):
        """F beyond 2^24 bits needs --force."""
        with pytest.raises(GuardrailExceeded):
            ScenarioValidator.validate_guardrails(4, 2 ** 24 + 16)

    def test_force(self):
        """--force bypasses both limits."""
        ScenarioValidator.validate_guardrails(20, 2 ** 30, force=True)

