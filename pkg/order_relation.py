"""
Relation sets W on {1..n} x {1..n} and their link to sign partitions.

A relation set contains the diagonal and exactly one of (i,j), (j,i) for
every i != j (conditions W u W~ = everything, W n W~ = diagonal). A
transitive one is a linear order, i.e. a permutation.
"""

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np
from numpy.typing import NDArray

from matrix_core import MatrixAnalysisError, Permutation
from signsym import SignPartition, UniverseMismatch

# Configuration
MAX_ENUMERATION_DIMENSION = 6
MAX_ALTERNATIVES = 4096


class InvalidRelation(MatrixAnalysisError):
    pass


class NotTransitive(MatrixAnalysisError):
    pass


class EnumerationTooLarge(MatrixAnalysisError):
    pass


class PairIndexer:
    """Lexicographic numbering alpha = 1..C(n,2) of the pairs (i,j), i < j."""

    def __init__(self, n: int):
        self.n = n
        self.pairs: tuple[tuple[int, int], ...] = tuple(itertools.combinations(range(1, n + 1), 2))
        self._index = {p: alpha for alpha, p in enumerate(self.pairs, start=1)}

    @property
    def size(self) -> int:
        return len(self.pairs)

    def index(self, i: int, j: int) -> int:
        try:
            return self._index[(i, j)]
        except KeyError:
            raise IndexError(f"({i},{j}) is not a sorted pair of 1..{self.n}") from None

    def pair(self, alpha: int) -> tuple[int, int]:
        if not 1 <= alpha <= self.size:
            raise IndexError(f"alpha = {alpha} outside 1..{self.size}")
        return self.pairs[alpha - 1]

    def __len__(self) -> int:
        return self.size

    def __repr__(self) -> str:
        return f"PairIndexer(n={self.n})"


@dataclass(frozen=True, eq=False)
class RelationSet:
    """W as an n x n boolean table (diagonal included)."""

    contains: NDArray[np.bool_]

    def __post_init__(self):
        table = np.array(self.contains, dtype=bool)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise InvalidRelation(f"relation table must be square, got {table.shape}")
        if not table.diagonal().all():
            raise InvalidRelation("W must contain the diagonal")
        off = ~np.eye(table.shape[0], dtype=bool)
        both = table & table.T & off
        neither = ~table & ~table.T & off
        if both.any():
            i, j = np.argwhere(both)[0] + 1
            raise InvalidRelation(f"both ({i},{j}) and ({j},{i}) are in W")
        if neither.any():
            i, j = np.argwhere(neither)[0] + 1
            raise InvalidRelation(f"neither ({i},{j}) nor ({j},{i}) is in W")
        table.setflags(write=False)
        object.__setattr__(self, "contains", table)

    @property
    def n(self) -> int:
        return self.contains.shape[0]

    @classmethod
    def from_pairs(cls, n: int, pairs) -> "RelationSet":
        """Build W from its off-diagonal pairs (1-based); the diagonal is added."""
        table = np.eye(n, dtype=bool)
        for i, j in pairs:
            table[i - 1, j - 1] = True
        return cls(table)

    @classmethod
    def from_table(cls, table) -> "RelationSet":
        """Build W from a 0/1 or boolean n x n table, validated like any other."""
        return cls(np.asarray(table) != 0)

    @classmethod
    def natural(cls, n: int) -> "RelationSet":
        """M = {(i,j): i <= j}."""
        return cls(np.triu(np.ones((n, n), dtype=bool)))

    def __contains__(self, pair) -> bool:
        i, j = pair
        return bool(self.contains[i - 1, j - 1])

    def __eq__(self, other) -> bool:
        return isinstance(other, RelationSet) and np.array_equal(self.contains, other.contains)

    def __hash__(self) -> int:
        return hash(self.contains.tobytes())

    def reverse(self) -> "RelationSet":
        return RelationSet(self.contains.T.copy())

    def pairs(self) -> list[tuple[int, int]]:
        """W minus the diagonal, in lexicographic order of the pairs as written."""
        return [(int(i) + 1, int(j) + 1) for i, j in np.argwhere(self.contains) if i != j]

    def basis(self) -> list[tuple[int, int]]:
        """Index pairs of the W-basis {e_i ^ e_j : (i,j) in W minus diagonal}."""
        return self.pairs()

    def grid(self) -> list[str]:
        """Dot grid of W minus the diagonal: column i, row j (top row j = n)."""
        lines = []
        for j in range(self.n, 0, -1):
            lines.append(" ".join("*" if i != j and (i, j) in self else "o" for i in range(1, self.n + 1)))
        return lines

    def to_json(self) -> list[list[int]]:
        return [list(p) for p in self.pairs()]

    def __repr__(self) -> str:
        return f"RelationSet(n={self.n}, pairs={self.pairs()})"


def is_transitive(w: RelationSet) -> bool:
    """(i,j), (j,k) in W imply (i,k) in W; equivalently W is a linear order."""
    b = w.contains.astype(np.int64)
    return bool(np.all(w.contains | ((b @ b) == 0)))


def _check_universe(j: SignPartition, expected: int, what: str):
    if j.universe_size != expected:
        raise UniverseMismatch(f"{what} lives in 1..{j.universe_size}, expected 1..{expected}")


def w_from_partition(j: SignPartition, indexer: PairIndexer) -> RelationSet:
    """(i,j) in W iff i < j and alpha(i,j) in J, or i > j and alpha(j,i) not in J."""
    _check_universe(j, indexer.size, "J")
    chosen = set(j.members)
    pairs = [p if alpha in chosen else p[::-1] for alpha, p in enumerate(indexer.pairs, start=1)]
    return RelationSet.from_pairs(indexer.n, pairs)


def partition_from_w(w: RelationSet, indexer: PairIndexer) -> SignPartition:
    """J = numbers of the sorted pairs that W contains."""
    if w.n != indexer.n:
        raise UniverseMismatch(f"W is on 1..{w.n}, indexer on 1..{indexer.n}")
    members = [alpha for alpha, p in enumerate(indexer.pairs, start=1) if p in w]
    return SignPartition.of(indexer.size, members)


def w_hat(j: SignPartition, j_tilde: SignPartition, indexer: PairIndexer) -> RelationSet:
    """
    Relation built from the partitions of A and of its second compound.

    For i < j with alpha = alpha(i,j):
      (a) i, j on the same side of J and alpha in J~      -> (i,j) in W
      (b) i, j split by J and alpha not in J~             -> (i,j) in W
      (c) same side and alpha not in J~                   -> (j,i) in W
      (d) split and alpha in J~                           -> (j,i) in W
    """
    _check_universe(j, indexer.n, "J")
    _check_universe(j_tilde, indexer.size, "J~")
    chosen = set(j_tilde.members)
    pairs = []
    for alpha, (a, b) in enumerate(indexer.pairs, start=1):
        forward = (alpha in chosen) != j.is_split(a, b)
        pairs.append((a, b) if forward else (b, a))
    return RelationSet.from_pairs(indexer.n, pairs)


def find_transitive_w_hat(j: SignPartition, j_tilde: SignPartition, indexer: PairIndexer):
    """
    First transitive w_hat over the alternative choices of J and J~.

    Returns (relation, J, J~). When no choice is transitive (or the search
    budget runs out) the canonical choice is returned.
    """
    budget = MAX_ALTERNATIVES
    for alt_j in j.alternatives():
        for alt_tilde in j_tilde.alternatives():
            if budget == 0:
                return w_hat(j, j_tilde, indexer), j, j_tilde
            budget -= 1
            w = w_hat(alt_j, alt_tilde, indexer)
            if is_transitive(w):
                return w, alt_j, alt_tilde
    return w_hat(j, j_tilde, indexer), j, j_tilde


def w_from_permutation(theta: Permutation) -> RelationSet:
    """(i,j) in W iff theta^-1(i) <= theta^-1(j)."""
    n = theta.n
    pos = np.array([theta.position(i) for i in range(1, n + 1)])
    return RelationSet(pos[:, None] <= pos[None, :])


def permutation_from_w(w: RelationSet) -> Permutation:
    """
    Recover theta from a linear order W by insertion.

    Step j inserts j right after the last already-placed index k with
    (k, j) in W, or at the front when there is none.
    """
    if not is_transitive(w):
        raise NotTransitive(f"W = {w.pairs()} is not a linear order")
    order = [1]
    for j in range(2, w.n + 1):
        l = 0
        for k, placed in enumerate(order, start=1):
            if (placed, j) in w:
                l = k
        order.insert(l, j)
    theta = Permutation(tuple(order))
    if w_from_permutation(theta) != w:
        raise NotTransitive(f"insertion order {order} does not reproduce W")
    return theta


def enumerate_relations(n: int):
    """Every valid W on 1..n: one orientation choice per sorted pair, 2^C(n,2) in all."""
    if n > MAX_ENUMERATION_DIMENSION:
        raise EnumerationTooLarge(
            f"n = {n}: 2^{comb(n, 2)} relations (limit n <= {MAX_ENUMERATION_DIMENSION})"
        )
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    for forward in itertools.product((True, False), repeat=len(pairs)):
        yield RelationSet.from_pairs(n, [p if f else p[::-1] for p, f in zip(pairs, forward)])
