"""
Custom exception classes for scenario, field and decoding errors.
"""


class AppException(Exception):
    """Base exception class for simulator errors."""

    def __init__(self, message: str, detail: str | None = None):
        """
        Initialize exception.

        Args:
            message: Short error message
            detail: Optional detailed error information
        """
        self.message = message
        self.detail = detail
        super().__init__(message)

    def to_dict(self) -> dict:
        """
        Convert exception to dictionary for reports and logs.

        Returns:
            dict: Exception data
        """
        return {
            "error": type(self).__name__,
            "message": self.message,
            "detail": self.detail
        }


# Parameter rejection

class ValidationError(AppException):
    """Raised when scenario parameters are rejected."""
    pass


class DomainError(ValidationError):
    """Raised when a value lies outside the domain of a formula."""
    pass


class NonIntegralT(ValidationError):
    """Raised when KM/N (or its per-group analogue) is not an integer."""
    pass


class IndivisibleSplit(ValidationError):
    """Raised when the file length is not divisible by a split plan."""
    pass


class InvalidProfile(ValidationError):
    """Raised when a partition profile is malformed for (K, L)."""
    pass


class InvalidPartition(ValidationError):
    """Raised when routing metadata is not a partition of the user set."""
    pass


class LengthMismatch(ValidationError):
    """Raised when vector or matrix shapes disagree."""
    pass


class GuardrailExceeded(ValidationError):
    """Raised when a scenario exceeds the desk-scale limits without --force."""
    pass


# Field arithmetic

class FieldArithmeticError(AppException):
    """Raised on undefined arithmetic."""
    pass


class ZeroInverse(FieldArithmeticError):
    """Raised when inverting the zero element."""
    pass


class SingularMatrix(FieldArithmeticError):
    """Raised when solving or inverting a rank-deficient matrix."""
    pass


class InfiniteGap(FieldArithmeticError):
    """Raised when a gap ratio is taken against a zero lower bound."""
    pass


# Field too small

class FieldExhaustedError(AppException):
    """Raised when random constructions keep failing, i.e. q is too small."""
    pass


class PrecoderNotFound(FieldExhaustedError):
    """Raised when no zero-forcing precoder meets its constraints."""
    pass


class SingularDecodeMatrix(FieldExhaustedError):
    """Raised when a user's combination matrix stays singular."""
    pass


class RankDeficientNetwork(FieldExhaustedError):
    """Raised when the sampled transfer matrix keeps losing rank."""
    pass


# Delivery and decoding

class DecodeFailure(AppException):
    """Raised when a user cannot reconstruct its demanded file."""
    pass


class LedgerOverflow(AppException):
    """Raised when a fresh-index counter runs past its last piece."""
    pass


class CacheOverflow(AppException):
    """Raised when placement stores more than MF bits in a user's cache."""
    pass


class ReportError(AppException):
    """Raised when a report cannot be written."""
    pass
