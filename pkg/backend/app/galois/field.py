"""
Arithmetic over GF(2^m), 1 <= m <= 32.

Elements are plain ints in [0, 2^m); symbol arrays are numpy int64 arrays.
Addition is XOR. Multiplication uses log/antilog tables for m <= 16 and
carryless shift-and-reduce above that.
"""

import logging
from functools import lru_cache

import numpy as np
import numpy.typing as npt

from app.utils.exceptions import ValidationError, ZeroInverse

logger = logging.getLogger(__name__)

FieldVector = npt.NDArray[np.int64]
FieldMatrix = npt.NDArray[np.int64]

MAX_SYMBOL_BITS = 32
TABLE_SYMBOL_BITS = 16

# Irreducible reduction polynomials as bitmasks (degree m bit included).
POLYNOMIALS: dict[int, int] = {
    1: 0x3, 2: 0x7, 3: 0xB, 4: 0x13,
    5: 0x25, 6: 0x43, 7: 0x83, 8: 0x11D,
    9: 0x211, 10: 0x409, 11: 0x805, 12: 0x1053,
    13: 0x201B, 14: 0x4443, 15: 0x8003, 16: 0x1100B,
    17: 0x20009, 18: 0x40081, 19: 0x80027, 20: 0x100009,
    21: 0x200005, 22: 0x400003, 23: 0x800021, 24: 0x1000087,
    25: 0x2000009, 26: 0x4000047, 27: 0x8000027, 28: 0x10000009,
    29: 0x20000005, 30: 0x40800007, 31: 0x80000009, 32: 0x100400007,
}


def _degree(poly: int) -> int:
    return poly.bit_length() - 1


def _clmul(a: int, b: int) -> int:
    """Carryless product of two GF(2)[x] polynomials."""
    result = 0
    while b:
        if b & 1:
            result ^= a
        a <<= 1
        b >>= 1
    return result


def _poly_mod(a: int, f: int) -> int:
    df = _degree(f)
    while a and _degree(a) >= df:
        a ^= f << (_degree(a) - df)
    return a


def _poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, _poly_mod(a, b)
    return a


def _mulmod(a: int, b: int, poly: int, m: int) -> int:
    """Shift-and-reduce product of two field elements."""
    result = 0
    high = 1 << m
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if a & high:
            a ^= poly
    return result


def _prime_factors(n: int) -> list[int]:
    factors, p = [], 2
    while p * p <= n:
        if n % p == 0:
            factors.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        factors.append(n)
    return factors


def is_irreducible(poly: int, m: int) -> bool:
    """
    Rabin's test: f of degree m is irreducible over GF(2) iff
    x^(2^m) = x mod f and gcd(x^(2^(m/p)) - x, f) = 1 for every prime p | m.
    """
    if _degree(poly) != m or not poly & 1 and m > 1:
        return False

    def frobenius(k: int) -> int:
        x = 2
        for _ in range(k):
            x = _poly_mod(_clmul(x, x), poly)
        return x

    if frobenius(m) != _poly_mod(2, poly):
        return False
    for p in _prime_factors(m):
        if _poly_gcd(poly, frobenius(m // p) ^ _poly_mod(2, poly)) != 1:
            return False
    return True


@lru_cache(maxsize=None)
def _log_tables(m: int, poly: int) -> tuple[list[int], list[int]]:
    """
    Build (log, exp) tables from the first generator of the multiplicative
    group. exp has length 2(q-1) so sums of two logs need no reduction.
    """
    order = 1 << m
    n = order - 1
    for g in range(2 if m > 1 else 1, order):
        exp = [0] * (2 * n)
        log = [0] * order
        x = 1
        for i in range(n):
            if i and x == 1:
                break
            exp[i] = x
            log[x] = i
            x = _mulmod(x, g, poly, m)
        else:
            if x == 1:
                exp[n:] = exp[:n]
                logger.debug(f"Built GF(2^{m}) tables with generator {g}")
                return log, exp
    raise ValidationError(
        message=f"No generator found for GF(2^{m})",
        detail=f"polynomial {poly:#x} does not define a field"
    )


class GaloisField:
    """
    The field GF(2^m) defined by an irreducible reduction polynomial.

    Instances are immutable and safe to share across threads.
    """

    def __init__(self, m: int, polynomial: int | None = None):
        if not 1 <= m <= MAX_SYMBOL_BITS:
            raise ValidationError(
                message="Symbol width out of range",
                detail=f"m must be between 1 and {MAX_SYMBOL_BITS}, got {m}"
            )
        poly = POLYNOMIALS[m] if polynomial is None else polynomial
        if polynomial is not None and not is_irreducible(poly, m):
            raise ValidationError(
                message="Reduction polynomial is not irreducible",
                detail=f"{poly:#x} is not an irreducible polynomial of degree {m}"
            )
        self.m = m
        self.polynomial = poly
        self.order = 1 << m
        self._tables = m <= TABLE_SYMBOL_BITS
        if self._tables:
            log, exp = _log_tables(m, poly)
            self._log = log
            self._exp = exp
            self._log_arr = np.asarray(log, dtype=np.int64)
            self._exp_arr = np.asarray(exp, dtype=np.int64)

    def __repr__(self) -> str:
        return f"GaloisField(m={self.m}, polynomial={self.polynomial:#x})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GaloisField) and (self.m, self.polynomial) == (other.m, other.polynomial)

    def __hash__(self) -> int:
        return hash((self.m, self.polynomial))

    # Scalars

    @staticmethod
    def add(a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self._tables:
            return self._exp[self._log[a] + self._log[b]]
        return _mulmod(a, b, self.polynomial, self.m)

    def inverse(self, a: int) -> int:
        if a == 0:
            raise ZeroInverse(message="Zero has no multiplicative inverse")
        if self._tables:
            return self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)]
        # a^(q-2) by square and multiply
        result, base, e = 1, a, self.order - 2
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inverse(b))

    # Symbol arrays

    def scale(self, c: int, symbols: FieldVector) -> FieldVector:
        """Multiply every symbol by the scalar c."""
        if c == 0:
            return np.zeros_like(symbols)
        if c == 1:
            return symbols.copy()
        if not self._tables:
            return self._mul_arrays_slow(np.full_like(symbols, c), symbols)
        out = np.zeros_like(symbols)
        nonzero = symbols != 0
        out[nonzero] = self._exp_arr[self._log_arr[symbols[nonzero]] + self._log[c]]
        return out

    def multiply(self, a: FieldVector, b: FieldVector) -> FieldVector:
        """Elementwise product of two symbol arrays of equal shape."""
        if not self._tables:
            return self._mul_arrays_slow(a, b)
        out = np.zeros_like(a)
        nonzero = (a != 0) & (b != 0)
        out[nonzero] = self._exp_arr[self._log_arr[a[nonzero]] + self._log_arr[b[nonzero]]]
        return out

    def _mul_arrays_slow(self, a: FieldVector, b: FieldVector) -> FieldVector:
        a = a.astype(np.int64, copy=True)
        b = b.astype(np.int64, copy=True)
        result = np.zeros_like(a)
        high = 1 << self.m
        for _ in range(self.m):
            result ^= np.where(b & 1, a, 0)
            b >>= 1
            a <<= 1
            a = np.where(a & high, a ^ self.polynomial, a)
        return result

    def random_elements(self, rng: np.random.Generator, size: int | tuple[int, ...],
                        nonzero: bool = False) -> FieldVector:
        low = 1 if nonzero else 0
        return rng.integers(low, self.order, size=size, dtype=np.int64)


@lru_cache(maxsize=None)
def get_field(m: int, polynomial: int | None = None) -> GaloisField:
    """Shared field instance per (m, polynomial)."""
    return GaloisField(m, polynomial)
