"""
Tests for GF(2^m) arithmetic.
"""

import numpy as np
import pytest

from app.galois import POLYNOMIALS, GaloisField, get_field, is_irreducible
from app.utils.exceptions import ValidationError, ZeroInverse


class TestFieldAxiomsSmall:
    """Exhaustive axiom checks in GF(16)."""

    def test_multiplicative_inverse(self, gf4):
        """Every nonzero element times its inverse is one."""
        for a in range(1, 16):
            assert gf4.mul(a, gf4.inverse(a)) == 1

    def test_commutative_and_identity(self, gf4):
        """Multiplication commutes; 1 is the identity and 0 absorbs."""
        for a in range(16):
            assert gf4.mul(a, 1) == a
            assert gf4.mul(a, 0) == 0
            for b in range(16):
                assert gf4.mul(a, b) == gf4.mul(b, a)

    def test_associative(self, gf4):
        """(ab)c = a(bc) for all triples."""
        for a in range(16):
            for b in range(16):
                ab = gf4.mul(a, b)
                for c in range(16):
                    assert gf4.mul(ab, c) == gf4.mul(a, gf4.mul(b, c))

    def test_distributive(self, gf4):
        """a(b + c) = ab + ac with XOR addition."""
        for a in range(16):
            for b in range(16):
                for c in range(16):
                    assert gf4.mul(a, b ^ c) == gf4.mul(a, b) ^ gf4.mul(a, c)

    def test_no_zero_divisors(self, gf4):
        """Products of nonzero elements are nonzero."""
        assert all(gf4.mul(a, b) for a in range(1, 16) for b in range(1, 16))

    def test_known_product(self, gf4):
        """x * x^3 = x^4 = x + 1 under x^4 + x + 1."""
        assert gf4.mul(0b0010, 0b1000) == 0b0011


class TestFieldOperations:
    """Scalar and array operations."""

    def test_inverse_of_zero(self, gf16):
        """Zero has no inverse."""
        with pytest.raises(ZeroInverse):
            gf16.inverse(0)

    def test_division(self, gf16):
        """div undoes mul."""
        for a, b in [(1, 2), (12345, 54321), (65535, 7)]:
            assert gf16.div(gf16.mul(a, b), b) == a

    def test_scale_matches_scalar_mul(self, gf16, rng):
        """Vectorized scale agrees with scalar multiplication."""
        symbols = gf16.random_elements(rng, 64)
        scaled = gf16.scale(777, symbols)
        assert list(scaled) == [gf16.mul(777, int(s)) for s in symbols]

    def test_multiply_matches_scalar_mul(self, gf16, rng):
        """Elementwise product agrees with scalar multiplication."""
        a = gf16.random_elements(rng, 32)
        b = gf16.random_elements(rng, 32)
        assert list(gf16.multiply(a, b)) == [gf16.mul(int(x), int(y)) for x, y in zip(a, b)]

    def test_wide_field_matches_reference(self, rng):
        """Shift-and-reduce arithmetic above 16 bits satisfies a * a^-1 = 1."""
        gf = get_field(24)
        for a in gf.random_elements(rng, 10, nonzero=True):
            assert gf.mul(int(a), gf.inverse(int(a))) == 1
        a = gf.random_elements(rng, 8)
        b = gf.random_elements(rng, 8)
        assert list(gf.multiply(a, b)) == [gf.mul(int(x), int(y)) for x, y in zip(a, b)]

    def test_random_nonzero(self, gf4, rng):
        """nonzero draws avoid 0."""
        assert np.all(gf4.random_elements(rng, 500, nonzero=True) > 0)


class TestFieldConstruction:
    """Field instances and polynomials."""

    def test_default_polynomials_irreducible(self):
        """Every built-in reduction polynomial is irreducible."""
        for m, poly in POLYNOMIALS.items():
            assert is_irreducible(poly, m)

    def test_reducible_polynomial_rejected(self):
        """x^4 + 1 = (x + 1)^4 cannot define a field."""
        assert not is_irreducible(0b10001, 4)
        with pytest.raises(ValidationError):
            GaloisField(4, 0b10001)

    def test_width_out_of_range(self):
        """m must lie in 1..32."""
        with pytest.raises(ValidationError):
            GaloisField(33)

    def test_shared_instances(self):
        """get_field caches one instance per width."""
        assert get_field(8) is get_field(8)
        assert get_field(8) == GaloisField(8)
