"""
Strict and weak J-sign-symmetry.

A matrix is J-sign-symmetric when its negative entries sit only on index
pairs split by a bipartition J (strictly: exactly there, with no zero
entries). Detection is a parity 2-coloring of the constraint graph where
a negative entry forces "split" and a positive entry forces "same side".
"""

import itertools
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike
from scipy import sparse
from scipy.sparse import csgraph

from matrix_core import MatrixAnalysisError, SignatureMatrix, as_matrix

# Configuration
DEFAULT_RELATIVE_BAND = 1e-12


class SignConflict(MatrixAnalysisError):
    """The sign constraints admit no bipartition; witness is an odd cycle (1-based)."""

    def __init__(self, message: str, witness: tuple[int, ...]):
        super().__init__(f"{message}: odd cycle {' -> '.join(map(str, witness + witness[:1]))}")
        self.witness = witness


class ZeroEntry(MatrixAnalysisError):
    def __init__(self, i: int, j: int):
        super().__init__(f"entry ({i},{j}) is zero")
        self.position = (i, j)


class NegativeDiagonal(MatrixAnalysisError):
    def __init__(self, i: int, value: float):
        super().__init__(f"diagonal entry ({i},{i}) = {value} is negative")
        self.index = i


class UniverseMismatch(MatrixAnalysisError):
    pass


@dataclass(frozen=True)
class SignPartition:
    """
    Subset J of {1..m} (1-based, sorted) realizing J-sign-symmetry.

    components lists the connected components of the constraint graph;
    each one may be flipped independently, so J is unique up to complement
    exactly when there is a single component.
    """

    universe_size: int
    members: tuple[int, ...]
    strict: bool = False
    components: tuple[tuple[int, ...], ...] = field(default=(), compare=False)

    def __post_init__(self):
        members = tuple(sorted(set(self.members)))
        if any(not 1 <= i <= self.universe_size for i in members):
            raise UniverseMismatch(f"members {members} outside 1..{self.universe_size}")
        object.__setattr__(self, "members", members)
        if not self.components and self.universe_size > 0:
            object.__setattr__(self, "components", (tuple(range(1, self.universe_size + 1)),))

    @classmethod
    def of(cls, universe_size: int, members, strict: bool = False) -> "SignPartition":
        return cls(universe_size, tuple(members), strict)

    @property
    def unique_up_to_complement(self) -> bool:
        return len(self.components) <= 1

    @property
    def alternatives_count(self) -> int:
        return 2 ** max(len(self.components) - 1, 0)

    def complement(self) -> "SignPartition":
        rest = tuple(i for i in range(1, self.universe_size + 1) if i not in self.members)
        return SignPartition(self.universe_size, rest, self.strict, self.components)

    def equivalent(self, members) -> bool:
        """Equality up to complement."""
        chosen = set(members)
        return chosen == set(self.members) or chosen == set(self.complement().members)

    def is_split(self, i: int, j: int) -> bool:
        return (i in self.members) != (j in self.members)

    def alternatives(self):
        """All valid partitions (up to complement), starting with this one."""
        current = set(self.members)
        for flips in itertools.product((False, True), repeat=max(len(self.components) - 1, 0)):
            chosen = set(current)
            for flip, comp in zip(flips, self.components[1:]):
                if flip:
                    chosen.symmetric_difference_update(comp)
            yield SignPartition(self.universe_size, tuple(chosen), self.strict, self.components)

    def to_json(self) -> dict:
        return {
            "members": list(self.members),
            "strict": self.strict,
            "alternatives": self.alternatives_count,
        }


def relative_band(a: ArrayLike, rel: float = DEFAULT_RELATIVE_BAND) -> float:
    """Zero band for computed matrices: rel * max|a_ij|."""
    a = np.asarray(a, dtype=float)
    return float(rel * np.max(np.abs(a))) if a.size else 0.0


def _tree_path(predecessors: np.ndarray, node: int) -> list[int]:
    path = [node]
    while predecessors[path[-1]] >= 0:
        path.append(int(predecessors[path[-1]]))
    return path


def _odd_cycle(predecessors: np.ndarray, i: int, j: int) -> tuple[int, ...]:
    """Cycle closed by the non-tree edge (i, j) through the BFS tree."""
    path_i = _tree_path(predecessors, i)
    path_j = _tree_path(predecessors, j)
    on_j = set(path_j)
    lca = next(v for v in path_i if v in on_j)
    up = path_i[: path_i.index(lca) + 1]
    down = list(reversed(path_j[: path_j.index(lca)]))
    return tuple(v + 1 for v in up + down)


def _two_color(a: np.ndarray, zero_tol: float, strict: bool) -> SignPartition:
    n = a.shape[0]
    neg = a < -zero_tol
    pos = a > zero_tol

    for i in range(n):
        if neg[i, i]:
            raise NegativeDiagonal(i + 1, float(a[i, i]))
    if strict:
        zeros = np.argwhere(~(neg | pos))
        if zeros.size:
            i, j = zeros[0]
            raise ZeroEntry(int(i) + 1, int(j) + 1)

    split = neg | neg.T
    same = pos | pos.T
    np.fill_diagonal(split, False)
    np.fill_diagonal(same, False)
    clash = np.argwhere(np.triu(split & same))
    if clash.size:
        i, j = clash[0]
        raise SignConflict("opposite signs on a symmetric pair", (int(i) + 1, int(j) + 1))

    edges = sparse.csr_matrix(split | same)
    num_comp, labels = csgraph.connected_components(edges, directed=False)
    color = np.zeros(n, dtype=bool)
    predecessors = np.full(n, -9999)
    components = []
    for label in range(num_comp):
        nodes = np.flatnonzero(labels == label)
        components.append(tuple(int(v) + 1 for v in nodes))
        root = int(nodes.min())
        order, pred = csgraph.breadth_first_order(
            edges, root, directed=False, return_predecessors=True
        )
        predecessors[order] = pred[order]
        for v in order[1:]:
            color[v] = color[pred[v]] ^ split[pred[v], v]

    for i, j in np.argwhere(np.triu(split | same)):
        if (color[i] != color[j]) != split[i, j]:
            raise SignConflict("inconsistent sign pattern", _odd_cycle(predecessors, int(i), int(j)))

    components.sort(key=min)
    members = tuple(int(i) + 1 for i in np.flatnonzero(color))
    return SignPartition(n, members, strict, tuple(components))


def detect_strict(a: ArrayLike, zero_tol: float = 0.0) -> SignPartition:
    """
    Return the J certifying strict J-sign-symmetry.

    Requires every entry nonzero and every diagonal entry positive; J is
    then unique up to complement.
    """
    return _two_color(as_matrix(a), zero_tol, strict=True)


def detect_weak(a: ArrayLike, zero_tol: float = 0.0) -> SignPartition:
    """
    Return a J certifying (weak) J-sign-symmetry.

    Zero entries impose no constraint, so disconnected constraint graphs
    leave several choices; the canonical one keeps the smallest index of
    every component outside J.
    """
    return _two_color(as_matrix(a), zero_tol, strict=False)


def signature_from_partition(j: SignPartition) -> SignatureMatrix:
    """D with d_ii = -1 iff i in J."""
    return SignatureMatrix.from_members(j.universe_size, j.members)


def verify_partition(a: ArrayLike, j: SignPartition, strict: bool, zero_tol: float = 0.0) -> bool:
    """Re-check the defining sign conditions entry by entry."""
    a = as_matrix(a)
    if a.shape[0] != j.universe_size:
        raise UniverseMismatch(f"matrix is {a.shape[0]}x{a.shape[0]}, J lives in 1..{j.universe_size}")
    side = np.zeros(j.universe_size, dtype=bool)
    side[[i - 1 for i in j.members]] = True
    split = side[:, None] != side[None, :]
    neg = a < -zero_tol
    pos = a > zero_tol
    if strict:
        return bool(np.all(np.where(split, neg, pos)))
    return bool(np.all(np.where(split, ~pos, ~neg)))


def enumerate_partitions(m: int):
    """All 2^(m-1) bipartitions of {1..m} up to complement (1 never in J)."""
    for bits in itertools.product((False, True), repeat=max(m - 1, 0)):
        yield SignPartition.of(m, [i + 2 for i, b in enumerate(bits) if b])
