"""
Tests for linear algebra over GF(2^m).
"""

import itertools

import numpy as np
import pytest

from app.galois import (
    combine,
    constrained_precoder,
    dot,
    inverse_matrix,
    matmul,
    matvec,
    nullspace_basis,
    rank,
    solve_square,
)
from app.utils.exceptions import LengthMismatch, PrecoderNotFound, SingularMatrix


class TestRank:
    """Rank via row reduction."""

    def test_identity(self, gf16):
        """The identity has full rank."""
        assert rank(gf16, np.eye(4, dtype=np.int64)) == 4

    def test_dependent_rows(self, gf16):
        """A row that is a scalar multiple of another adds nothing."""
        row = np.array([3, 5, 7], dtype=np.int64)
        A = np.vstack([row, gf16.scale(9, row), [0, 0, 1]])
        assert rank(gf16, A) == 2

    def test_zero_matrix(self, gf4):
        """The zero matrix has rank 0."""
        assert rank(gf4, np.zeros((3, 3), dtype=np.int64)) == 0

    @pytest.mark.parametrize("inner", [0, 1, 2, 3])
    def test_matches_span_count(self, gf4, rng, inner):
        """Over GF(16) the row span of a rank-r matrix has exactly 16^r vectors."""
        for _ in range(3):
            if inner:
                A = matmul(gf4, gf4.random_elements(rng, (3, inner)), gf4.random_elements(rng, (inner, 4)))
            else:
                A = np.zeros((3, 4), dtype=np.int64)
            span = {
                tuple(combine(gf4, coefficients, A))
                for coefficients in itertools.product(range(gf4.order), repeat=3)
            }
            assert gf4.order ** rank(gf4, A) == len(span)
            assert rank(gf4, A) <= inner


class TestSolve:
    """Square solves and inverses."""

    def test_inverse_roundtrip(self, gf16, rng):
        """A^-1 A = I for a random invertible matrix."""
        while True:
            A = gf16.random_elements(rng, (4, 4))
            if rank(gf16, A) == 4:
                break
        assert np.array_equal(matmul(gf16, inverse_matrix(gf16, A), A), np.eye(4, dtype=np.int64))

    @pytest.mark.parametrize("size", [1, 2, 3, 5, 6])
    def test_solve_roundtrip_many(self, gf16, rng, size):
        """solve_square recovers x from A x for many random invertible A."""
        solved = 0
        while solved < 25:
            A = gf16.random_elements(rng, (size, size))
            if rank(gf16, A) < size:
                continue
            x = gf16.random_elements(rng, size)
            assert np.array_equal(solve_square(gf16, A, matvec(gf16, A, x)), x)
            assert np.array_equal(matmul(gf16, A, inverse_matrix(gf16, A)), np.eye(size, dtype=np.int64))
            solved += 1

    def test_solve_square(self, gf16):
        """solve_square returns x with A x = y."""
        A = np.array([[1, 2], [3, 4]], dtype=np.int64)
        x = np.array([100, 200], dtype=np.int64)
        y = matvec(gf16, A, x)
        assert list(solve_square(gf16, A, y)) == [100, 200]

    def test_singular(self, gf16):
        """Singular matrices are reported."""
        A = np.array([[1, 2], [2, 4]], dtype=np.int64)
        A[1] = gf16.scale(2, A[0])
        with pytest.raises(SingularMatrix):
            inverse_matrix(gf16, A)

    def test_matmul_wide(self, gf16, rng):
        """Coefficient matrix times symbol rows equals row-wise combine."""
        C = gf16.random_elements(rng, (2, 3))
        B = gf16.random_elements(rng, (3, 50))
        out = matmul(gf16, C, B)
        assert np.array_equal(out[1], combine(gf16, C[1], B))

    def test_length_mismatch(self, gf16):
        """Vectors of different lengths cannot be dotted."""
        with pytest.raises(LengthMismatch):
            dot(gf16, [1, 2], [1, 2, 3])


class TestNullspace:
    """Nullspace bases and constrained precoders."""

    def test_basis_is_orthogonal(self, gf16, rng):
        """Every basis vector is orthogonal to every constraint row."""
        rows = gf16.random_elements(rng, (2, 5))
        basis = nullspace_basis(gf16, rows, 5)
        assert len(basis) == 3
        for v in basis:
            for r in rows:
                assert dot(gf16, r, v) == 0

    @pytest.mark.parametrize("rows,inner,dim", [(2, 2, 5), (4, 2, 5), (3, 3, 3), (5, 1, 4), (3, 3, 6)])
    def test_basis_dimension_and_independence(self, gf4, rng, rows, inner, dim):
        """The basis has n - rank independent vectors, each in the nullspace."""
        for _ in range(5):
            A = matmul(gf4, gf4.random_elements(rng, (rows, inner)), gf4.random_elements(rng, (inner, dim)))
            basis = nullspace_basis(gf4, A, dim)
            assert len(basis) == dim - rank(gf4, A)
            if basis:
                assert rank(gf4, np.vstack(basis)) == len(basis)
                assert not matmul(gf4, A, np.vstack(basis).T).any()

    def test_no_constraints(self, gf16):
        """Without rows the nullspace is the whole space."""
        assert len(nullspace_basis(gf16, [], 3)) == 3

    def test_precoder_constraints(self, gf16, rng):
        """u is orthogonal to the perp set and not to the nonperp set."""
        H = gf16.random_elements(rng, (4, 3), nonzero=True)
        u = constrained_precoder(gf16, [H[0], H[1]], [H[2], H[3]], 3, rng)
        assert dot(gf16, u, H[0]) == 0 and dot(gf16, u, H[1]) == 0
        assert dot(gf16, u, H[2]) != 0 and dot(gf16, u, H[3]) != 0

    def test_precoder_impossible(self, gf16, rng):
        """A nonperp vector inside the perp span can never be satisfied."""
        h = np.array([1, 2], dtype=np.int64)
        with pytest.raises(PrecoderNotFound):
            constrained_precoder(gf16, [h], [gf16.scale(5, h)], 2, rng, max_retries=4)

    def test_precoder_trivial_nullspace(self, gf16, rng):
        """Full-rank constraints leave only the zero vector."""
        with pytest.raises(PrecoderNotFound):
            constrained_precoder(gf16, [[1, 0], [0, 1]], [], 2, rng)

    def test_retry_callback(self, gf16, rng):
        """Failed draws are reported through on_retry."""
        calls = []
        h = np.array([1, 2], dtype=np.int64)
        with pytest.raises(PrecoderNotFound):
            constrained_precoder(gf16, [h], [h], 2, rng, max_retries=3, on_retry=lambda: calls.append(1))
        assert len(calls) >= 2

    def test_explicit_retry_budget(self, gf16, rng):
        """An explicit max_retries is honoured, zero included."""
        H = gf16.random_elements(rng, (4, 3), nonzero=True)
        calls = []
        with pytest.raises(PrecoderNotFound):
            constrained_precoder(gf16, [H[0], H[1]], [H[2], H[3]], 3, rng, max_retries=0,
                                 on_retry=lambda: calls.append(1))
        assert calls == []

        h = np.array([1, 2], dtype=np.int64)
        with pytest.raises(PrecoderNotFound) as exc_info:
            constrained_precoder(gf16, [h], [h], 2, rng, max_retries=1, on_retry=lambda: calls.append(1))
        assert len(calls) <= 1
        assert exc_info.value.detail.startswith("1 draws")
