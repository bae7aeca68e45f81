"""
Linear algebra over GF(2^m): dot products, rank, square solves, inverses,
right nullspaces and the constrained zero-forcing precoder.

Matrices are small (at most K x L), so elimination runs on Python ints with
a lexicographic pivot rule (first nonzero row per column) for reproducible
output. Symbol payloads stay in numpy arrays.
"""

import logging
from collections.abc import Callable, Sequence

import numpy as np
from tenacity import Retrying, after_nothing, retry_if_exception_type, stop_after_attempt

from app.config import settings
from app.galois.field import FieldMatrix, FieldVector, GaloisField
from app.utils.exceptions import LengthMismatch, PrecoderNotFound, SingularMatrix

logger = logging.getLogger(__name__)


def as_matrix(rows: Sequence[Sequence[int]] | FieldMatrix, cols: int | None = None) -> FieldMatrix:
    """Stack rows into an int64 matrix; an empty row list becomes 0 x cols."""
    if isinstance(rows, np.ndarray):
        return rows.astype(np.int64, copy=False)
    if len(rows) == 0:
        return np.zeros((0, cols or 0), dtype=np.int64)
    return np.asarray([np.asarray(r, dtype=np.int64) for r in rows], dtype=np.int64)


def dot(field: GaloisField, a: Sequence[int], b: Sequence[int]) -> int:
    if len(a) != len(b):
        raise LengthMismatch(
            message="Vector lengths differ",
            detail=f"dot of length {len(a)} and {len(b)}"
        )
    total = 0
    for x, y in zip(a, b):
        total ^= field.mul(int(x), int(y))
    return total


def matvec(field: GaloisField, A: FieldMatrix, x: Sequence[int]) -> FieldVector:
    A = as_matrix(A)
    if A.shape[1] != len(x):
        raise LengthMismatch(
            message="Matrix and vector shapes differ",
            detail=f"{A.shape} times length {len(x)}"
        )
    return np.asarray([dot(field, row, x) for row in A], dtype=np.int64)


def matmul(field: GaloisField, A: FieldMatrix, B: FieldMatrix) -> FieldMatrix:
    """Product of a small coefficient matrix A with a (possibly wide) symbol matrix B."""
    A, B = as_matrix(A), as_matrix(B)
    if A.shape[1] != B.shape[0]:
        raise LengthMismatch(
            message="Matrix shapes differ",
            detail=f"{A.shape} times {B.shape}"
        )
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for i in range(A.shape[0]):
        out[i] = combine(field, A[i], B)
    return out


def combine(field: GaloisField, coefficients: Sequence[int], rows: FieldMatrix | Sequence[FieldVector]) -> FieldVector:
    """Linear combination sum_i c_i * rows[i] of symbol arrays."""
    if len(coefficients) != len(rows):
        raise LengthMismatch(
            message="Coefficient count differs from row count",
            detail=f"{len(coefficients)} coefficients for {len(rows)} rows"
        )
    if len(rows) == 0:
        raise LengthMismatch(message="Cannot combine an empty set of rows")
    out = np.zeros_like(np.asarray(rows[0], dtype=np.int64))
    for c, row in zip(coefficients, rows):
        if c:
            out ^= field.scale(int(c), np.asarray(row, dtype=np.int64))
    return out


def row_reduce(field: GaloisField, A: FieldMatrix) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    A = as_matrix(A)
    R = [[int(v) for v in row] for row in A]
    n_rows, n_cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        p = next((i for i in range(r, n_rows) if R[i][c]), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        inv = field.inverse(R[r][c])
        R[r] = [field.mul(inv, v) for v in R[r]]
        for i in range(n_rows):
            f = R[i][c]
            if i != r and f:
                R[i] = [vi ^ field.mul(f, vr) for vi, vr in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    return R, pivots


def rank(field: GaloisField, A: FieldMatrix) -> int:
    return len(row_reduce(field, A)[1])


def _check_square(A: FieldMatrix) -> int:
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise LengthMismatch(message="Matrix is not square", detail=f"shape {A.shape}")
    return A.shape[0]


def solve_square(field: GaloisField, A: FieldMatrix, y: Sequence[int]) -> FieldVector:
    """Solve A x = y for invertible square A."""
    A = as_matrix(A)
    n = _check_square(A)
    if len(y) != n:
        raise LengthMismatch(message="Right-hand side length differs", detail=f"{len(y)} != {n}")
    augmented = np.hstack([A, np.asarray(y, dtype=np.int64).reshape(n, 1)])
    R, pivots = row_reduce(field, augmented)
    if sum(1 for p in pivots if p < n) < n:
        raise SingularMatrix(message="Matrix is singular", detail=f"rank below {n}")
    return np.asarray([R[i][n] for i in range(n)], dtype=np.int64)


def inverse_matrix(field: GaloisField, A: FieldMatrix) -> FieldMatrix:
    """Gauss-Jordan inverse of a square matrix."""
    A = as_matrix(A)
    n = _check_square(A)
    augmented = np.hstack([A, np.eye(n, dtype=np.int64)])
    R, pivots = row_reduce(field, augmented)
    if sum(1 for p in pivots if p < n) < n:
        raise SingularMatrix(message="Matrix is singular", detail=f"rank below {n}")
    return np.asarray([row[n:] for row in R], dtype=np.int64)


def nullspace_basis(field: GaloisField, rows: Sequence[Sequence[int]] | FieldMatrix, dim: int) -> list[FieldVector]:
    """
    Basis of {v : row . v = 0 for every row}, one vector per free column
    of the reduced form. With no rows this is the standard basis.
    """
    A = as_matrix(rows, dim)
    if A.shape[1] != dim:
        raise LengthMismatch(message="Row length differs from dim", detail=f"{A.shape[1]} != {dim}")
    R, pivots = row_reduce(field, A)
    basis = []
    for free in (c for c in range(dim) if c not in pivots):
        v = np.zeros(dim, dtype=np.int64)
        v[free] = 1
        for i, pc in enumerate(pivots):
            # characteristic 2: -R[i][free] == R[i][free]
            v[pc] = R[i][free]
        basis.append(v)
    return basis


class _ConstraintMiss(Exception):
    """A random draw landed orthogonal to a required direction."""


def constrained_precoder(
    field: GaloisField,
    perp_set: Sequence[Sequence[int]],
    nonperp_set: Sequence[Sequence[int]],
    dim: int,
    rng: np.random.Generator,
    max_retries: int | None = None,
    on_retry: Callable[[], None] | None = None,
) -> FieldVector:
    """
    Draw u orthogonal to every vector of perp_set and non-orthogonal to
    every vector of nonperp_set, as a random combination of the nullspace
    basis of perp_set.

    Raises:
        PrecoderNotFound: the nullspace is trivial or max_retries draws all failed
    """
    if max_retries is None:
        max_retries = settings.precoder_max_retries
    for v in [*perp_set, *nonperp_set]:
        if len(v) != dim:
            raise LengthMismatch(message="Constraint vector length differs from dim", detail=f"{len(v)} != {dim}")

    basis = nullspace_basis(field, perp_set, dim)
    if not basis:
        raise PrecoderNotFound(
            message="Constraints leave no nonzero precoder",
            detail=f"{len(perp_set)} orthogonality constraints span GF(2^{field.m})^{dim}"
        )
    if max_retries < 1:
        raise PrecoderNotFound(message="No precoder draws allowed", detail=f"max_retries = {max_retries}")
    stacked = np.vstack(basis)

    def draw() -> FieldVector:
        u = combine(field, field.random_elements(rng, len(basis)), stacked)
        if not u.any() or any(dot(field, u, w) == 0 for w in nonperp_set):
            raise _ConstraintMiss()
        return u

    retrying = Retrying(
        stop=stop_after_attempt(max_retries),
        retry=retry_if_exception_type(_ConstraintMiss),
        after=(lambda state: on_retry()) if on_retry else after_nothing,
        reraise=True,
    )
    try:
        return retrying(draw)
    except _ConstraintMiss:
        raise PrecoderNotFound(
            message="No precoder met the non-orthogonality constraints",
            detail=f"{max_retries} draws over a {len(basis)}-dim nullspace in GF(2^{field.m})"
        )
