import itertools
import math

import numpy as np
import pytest

from conftest import CYCLIC_SHIFT, WEAK3
from compound import second_compound
from matrix_core import Permutation
from order_relation import (
    EnumerationTooLarge,
    InvalidRelation,
    NotTransitive,
    PairIndexer,
    RelationSet,
    enumerate_relations,
    find_transitive_w_hat,
    is_transitive,
    partition_from_w,
    permutation_from_w,
    w_from_partition,
    w_from_permutation,
    w_hat,
)
from signsym import SignPartition, UniverseMismatch, detect_weak, relative_band


def test_relation_validation():
    with pytest.raises(InvalidRelation, match="both"):
        RelationSet.from_pairs(3, [(1, 2), (2, 1), (1, 3), (2, 3)])
    with pytest.raises(InvalidRelation, match="neither"):
        RelationSet.from_pairs(3, [(1, 2), (1, 3)])
    table = np.ones((2, 2), dtype=bool)
    table[0, 0] = False
    with pytest.raises(InvalidRelation, match="diagonal"):
        RelationSet(table)


def test_natural_order_and_reverse():
    m = RelationSet.natural(4)
    assert is_transitive(m)
    assert permutation_from_w(m) == Permutation.identity(4)
    assert permutation_from_w(m.reverse()) == Permutation((4, 3, 2, 1))
    assert RelationSet.from_table(np.triu(np.ones((4, 4)))) == m


def test_cyclic_relation_is_not_transitive():
    w = RelationSet.from_pairs(3, [(1, 2), (2, 3), (3, 1)])
    assert not is_transitive(w)
    assert not is_transitive(w.reverse())
    with pytest.raises(NotTransitive):
        permutation_from_w(w)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_counting(n):
    relations = list(enumerate_relations(n))
    assert len(relations) == 2 ** math.comb(n, 2)
    assert len(set(relations)) == len(relations)
    assert sum(is_transitive(w) for w in relations) == math.factorial(n)


def test_enumeration_guard():
    with pytest.raises(EnumerationTooLarge):
        next(enumerate_relations(7))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_partition_roundtrips_exhaustive(n):
    indexer = PairIndexer(n)
    for bits in itertools.product((False, True), repeat=indexer.size):
        j = SignPartition.of(indexer.size, [alpha for alpha, b in enumerate(bits, start=1) if b])
        assert partition_from_w(w_from_partition(j, indexer), indexer).members == j.members
    for w in enumerate_relations(n):
        assert w_from_partition(partition_from_w(w, indexer), indexer) == w


@pytest.mark.parametrize("n", [2, 3, 4])
def test_permutation_roundtrips_exhaustive(n):
    for image in itertools.permutations(range(1, n + 1)):
        theta = Permutation(image)
        assert permutation_from_w(w_from_permutation(theta)) == theta
    for w in enumerate_relations(n):
        if is_transitive(w):
            assert w_from_permutation(permutation_from_w(w)) == w


def test_roundtrips_sampled_n5(rng):
    indexer = PairIndexer(5)
    for _ in range(50):
        members = [alpha for alpha in range(1, 11) if rng.random() < 0.5]
        j = SignPartition.of(10, members)
        assert partition_from_w(w_from_partition(j, indexer), indexer).members == j.members
        theta = Permutation(tuple(int(i) + 1 for i in rng.permutation(5)))
        assert permutation_from_w(w_from_permutation(theta)) == theta


def test_partition_universe_is_checked():
    with pytest.raises(UniverseMismatch):
        w_from_partition(SignPartition.of(4, []), PairIndexer(3))


def test_weak3_relation_and_order():
    j = detect_weak(WEAK3)
    c = second_compound(WEAK3)
    j_tilde = detect_weak(c, relative_band(c))
    w = w_hat(j, j_tilde, PairIndexer(3))
    assert w == RelationSet.from_pairs(3, [(1, 2), (1, 3), (3, 2)])
    assert is_transitive(w)
    assert permutation_from_w(w).image == (1, 3, 2)


def test_w_hat_ignores_complements():
    j = detect_weak(WEAK3)
    c = second_compound(WEAK3)
    j_tilde = detect_weak(c, relative_band(c))
    indexer = PairIndexer(3)
    w = w_hat(j, j_tilde, indexer)
    assert w_hat(j.complement(), j_tilde, indexer) == w
    assert w_hat(j, j_tilde.complement(), indexer) == w.reverse()


def test_cyclic_shift_relation_is_cyclic():
    j = detect_weak(CYCLIC_SHIFT)
    j_tilde = detect_weak(second_compound(CYCLIC_SHIFT))
    w = w_hat(j, j_tilde, PairIndexer(3))
    expected = RelationSet.from_pairs(3, [(1, 2), (2, 3), (3, 1)])
    assert w in (expected, expected.reverse())
    assert not is_transitive(w)
    assert w.grid() == ["* o o", "o o *", "o * o"]


def test_find_transitive_w_hat_tries_alternatives():
    indexer = PairIndexer(3)
    j = SignPartition(3, (), False, ((1, 2, 3),))
    j_tilde = SignPartition(3, (2,), False, ((1,), (2,), (3,)))
    assert not is_transitive(w_hat(j, j_tilde, indexer))
    w, _, chosen = find_transitive_w_hat(j, j_tilde, indexer)
    assert is_transitive(w)
    assert chosen.universe_size == 3


def test_find_transitive_w_hat_falls_back_to_canonical():
    j = detect_weak(CYCLIC_SHIFT)
    j_tilde = detect_weak(second_compound(CYCLIC_SHIFT))
    w, j_out, j_tilde_out = find_transitive_w_hat(j, j_tilde, PairIndexer(3))
    assert not is_transitive(w)
    assert j_out == j
    assert j_tilde_out == j_tilde
