"""
Second compound matrices and W-matrices.

All minors are evaluated with the plain 2x2 determinant formula
a_ki*a_lj - a_kj*a_li; no cancellation control is attempted.
"""

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from matrix_core import (
    DimensionMismatch,
    Matrix,
    MatrixAnalysisError,
    Permutation,
    SignatureMatrix,
    as_matrix,
)
from order_relation import PairIndexer, RelationSet

__all__ = [
    "ComputationError",
    "PairIndexer",
    "WedgeVector",
    "compound_permutation_matrix",
    "compound_signature",
    "exterior_square_apply",
    "generalized_minor",
    "second_compound",
    "w_matrix",
    "wedge",
]


class ComputationError(MatrixAnalysisError):
    pass


@dataclass(frozen=True, eq=False)
class WedgeVector:
    """Coordinates of an element of the exterior square in the W-basis."""

    indexer: PairIndexer
    basis: tuple[tuple[int, int], ...]
    coords: NDArray[np.float64]

    def __len__(self) -> int:
        return len(self.coords)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)


def _check_index(n: int, *indices: int):
    for idx in indices:
        if not 1 <= idx <= n:
            raise ComputationError(f"index {idx} outside 1..{n}")


def generalized_minor(a: ArrayLike, i: int, j: int, k: int, l: int) -> float:
    """A(i j | k l) = a_ik*a_jl - a_il*a_jk (rows i, j; columns k, l; any order)."""
    a = as_matrix(a)
    _check_index(a.shape[0], i, j, k, l)
    i, j, k, l = i - 1, j - 1, k - 1, l - 1
    return float(a[i, k] * a[j, l] - a[i, l] * a[j, k])


def _minor_table(a: Matrix, rows: NDArray, cols: NDArray) -> Matrix:
    """Entry (beta, alpha) = A(k l | i j) for (k,l) = rows[beta], (i,j) = cols[alpha]."""
    k, l = rows[:, 0] - 1, rows[:, 1] - 1
    i, j = cols[:, 0] - 1, cols[:, 1] - 1
    return a[np.ix_(k, i)] * a[np.ix_(l, j)] - a[np.ix_(k, j)] * a[np.ix_(l, i)]


def w_matrix(a: ArrayLike, w: RelationSet) -> Matrix:
    """
    Matrix of A ^ A in the basis {e_i ^ e_j : (i,j) in W minus diagonal}.

    Column alpha holds the coordinates of (A ^ A)(e_i ^ e_j) for the
    alpha-th pair of w.basis(), so row beta = (k,l) carries A(k l | i j).
    """
    a = as_matrix(a)
    n = a.shape[0]
    if n < 2:
        raise ComputationError("W-matrices need n >= 2")
    if w.n != n:
        raise DimensionMismatch(f"W is on 1..{w.n}, matrix is {n}x{n}")
    basis = np.array(w.basis(), dtype=np.intp).reshape(-1, 2)
    return as_matrix(_minor_table(a, basis, basis))


def second_compound(a: ArrayLike) -> Matrix:
    """A^(2): all 2x2 minors with rows and columns in lexicographic pair order."""
    a = as_matrix(a)
    if a.shape[0] < 2:
        raise ComputationError("the second compound needs n >= 2")
    return w_matrix(a, RelationSet.natural(a.shape[0]))


def wedge(x: ArrayLike, y: ArrayLike, w: RelationSet) -> WedgeVector:
    """x ^ y: coordinate at (k,l) in W minus diagonal is x(k)y(l) - x(l)y(k)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != (w.n,) or y.shape != (w.n,):
        raise DimensionMismatch(f"vectors of shape {x.shape}, {y.shape} for n = {w.n}")
    basis = w.basis()
    idx = np.array(basis, dtype=np.intp).reshape(-1, 2) - 1
    k, l = idx[:, 0], idx[:, 1]
    return WedgeVector(PairIndexer(w.n), tuple(basis), x[k] * y[l] - x[l] * y[k])


def exterior_square_apply(a: ArrayLike, x: ArrayLike, y: ArrayLike, w: RelationSet) -> WedgeVector:
    """(A ^ A)(x ^ y) computed directly as Ax ^ Ay."""
    a = as_matrix(a)
    if a.shape[0] != w.n:
        raise DimensionMismatch(f"W is on 1..{w.n}, matrix is {a.shape[0]}x{a.shape[0]}")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != (w.n,) or y.shape != (w.n,):
        raise DimensionMismatch(f"vectors of shape {x.shape}, {y.shape} for n = {w.n}")
    return wedge(a @ x, a @ y, w)


def compound_signature(d: SignatureMatrix) -> SignatureMatrix:
    """D^(2): the pair (i,j) gets sign d_i*d_j."""
    indexer = PairIndexer(d.n)
    return SignatureMatrix(tuple(d.signs[i - 1] * d.signs[j - 1] for i, j in indexer.pairs))


def compound_permutation_matrix(theta: Permutation) -> Matrix:
    """Q_theta^(2), a signed permutation matrix (entries exactly 0 or +-1)."""
    return second_compound(theta.matrix())
