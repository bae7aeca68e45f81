"""
Finite field kernel: GF(2^m) arithmetic and linear algebra.
"""

from app.galois.field import POLYNOMIALS, FieldMatrix, FieldVector, GaloisField, get_field, is_irreducible
from app.galois.linalg import (
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

__all__ = [
    "POLYNOMIALS",
    "FieldMatrix",
    "FieldVector",
    "GaloisField",
    "get_field",
    "is_irreducible",
    "combine",
    "constrained_precoder",
    "dot",
    "inverse_matrix",
    "matmul",
    "matvec",
    "nullspace_basis",
    "rank",
    "solve_square",
]
