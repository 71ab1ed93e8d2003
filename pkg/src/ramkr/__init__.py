"""Exact local arithmetic on the ramified unitary Kramer model.

Submodules: padic (the field F = Q_p(pi), pi^2 = p), herm (Hermitian
matrices and their classes), tree (the Bruhat-Tits tree), divisor
(intersection numbers), density (closed local density polynomials),
oracle (brute-force representation counts) and cli.
"""

from .density import alpha_poly, alpha_prime, kr_rhs, verify_kr
from .divisor import intersect_closed, intersect_tree
from .herm import (
    AntiDiagonal, Diagonal, HermMatrix2, VectorC, canonical_pair, classify, gram_pair,
)
from .padic import PAdicElem, PrimeParam

__version__ = "0.1.0"

__all__ = [
    "PrimeParam", "PAdicElem", "VectorC", "HermMatrix2", "Diagonal", "AntiDiagonal",
    "classify", "gram_pair", "canonical_pair", "intersect_tree", "intersect_closed",
    "alpha_poly", "alpha_prime", "kr_rhs", "verify_kr",
]
