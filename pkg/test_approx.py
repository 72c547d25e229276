import numpy as np
import pytest

from approx import (
    CertificationFailed,
    PreconditionFailed,
    approximate_jss,
    approximate_nonnegative,
    default_schedule,
    normalize_by_order,
    smoothing_kernel,
    smoothing_kernel_compound,
)
from compound import second_compound
from conftest import SYMMETRIC4, CYCLIC_SHIFT, WEAK3, LOWER_ONES, random_totally_nonnegative
from matrix_core import Permutation, conjugate_permutation, is_irreducible
from order_relation import RelationSet, w_from_permutation
from signsym import detect_strict


def assert_certified(seq):
    """Re-derive every accepted step from the approximant alone."""
    for step in seq.steps:
        recomputed = second_compound(step.approximant)
        assert np.array_equal(step.compound, recomputed)
        assert detect_strict(step.approximant).members == step.partition.members
        assert detect_strict(recomputed).members == step.compound_partition.members


def test_default_schedule_halves():
    eps = default_schedule(2.0, 4)
    assert eps == [2.0, 1.0, 0.5, 0.25]


@pytest.mark.parametrize("epsilon", [4.0, 1.0, 0.3])
def test_smoothing_kernel(epsilon):
    g = smoothing_kernel(5, epsilon)
    assert np.allclose(g.sum(axis=1), 1.0)
    assert np.all(g > 0)
    g2 = smoothing_kernel_compound(5, epsilon)
    assert np.all(g2 > 0)
    assert np.allclose(g2, second_compound(g), rtol=1e-8, atol=1e-14)


def test_smoothing_kernel_rejects_nonpositive_epsilon():
    with pytest.raises(ValueError):
        smoothing_kernel(3, 0.0)


def test_normalize_by_order_totally_nonnegative(rng):
    p = random_totally_nonnegative(rng, 4)
    theta = Permutation((3, 1, 4, 2))
    a = conjugate_permutation(p, theta.inverse())
    form = normalize_by_order(a, w_from_permutation(theta), 1e-12)
    assert form.theta == theta
    assert np.allclose(form.p, p)
    assert np.all(form.p2 >= 0)


def test_normalize_by_order_keeps_irreducibility(rng):
    seen = set()
    for trial in range(20):
        p = random_totally_nonnegative(rng, 4, zero_fraction=0.15 * (trial % 4))
        theta = Permutation(tuple(int(i) + 1 for i in rng.permutation(4)))
        a = conjugate_permutation(p, theta.inverse())
        form = normalize_by_order(a, w_from_permutation(theta), 1e-12)
        irreducible = is_irreducible(a), is_irreducible(second_compound(a), 1e-9)
        assert is_irreducible(form.p) == irreducible[0]
        assert is_irreducible(form.p2, 1e-9) == irreducible[1]
        seen.add(irreducible)
    assert (True, True) in seen


def test_normalize_by_order_preconditions():
    cyclic = RelationSet.from_pairs(3, [(1, 2), (2, 3), (3, 1)])
    with pytest.raises(PreconditionFailed, match="not transitive"):
        normalize_by_order(CYCLIC_SHIFT, cyclic)
    with pytest.raises(PreconditionFailed, match="negative entry"):
        normalize_by_order([[1.0, 2.0], [2.0, 1.0]], RelationSet.natural(2))
    with pytest.raises(PreconditionFailed, match="negative entries"):
        normalize_by_order([[1.0, -2.0], [0.0, 1.0]], RelationSet.natural(2))


def test_lower_triangular_ones_converge():
    seq = approximate_nonnegative(LOWER_ONES, RelationSet.natural(3))
    assert seq.steps
    assert seq.steps[0].epsilon == 1.0
    assert seq.converged_norm < 1e-6
    distances = [s.distance for s in seq.steps]
    assert distances == sorted(distances, reverse=True)
    for step in seq.steps:
        assert step.accepted
        assert step.partition.members == ()
        assert step.compound_partition.members == ()
        assert np.all(step.approximant > 0)
        assert np.all(step.compound > 0)
    assert_certified(seq)
    # zeros in P underflow once eps is small enough
    assert seq.rejected
    assert not seq.rejected[-1].accepted
    assert seq.leading_pair_nonnegative


def test_permuted_totally_nonnegative_converge(rng):
    for _ in range(10):
        p = random_totally_nonnegative(rng, 4)
        theta = Permutation(tuple(int(i) + 1 for i in rng.permutation(4)))
        a = conjugate_permutation(p, theta.inverse())
        seq = approximate_nonnegative(a, w_from_permutation(theta))
        assert seq.permutation == theta
        assert seq.converged_norm < 1e-6
        assert_certified(seq)
        assert all(np.all(s.compound > 0) for s in seq.steps)


def test_weak3_certificates():
    seq = approximate_jss(WEAK3)
    assert seq.permutation.image == (1, 3, 2)
    assert seq.signature.signs == (1, -1, 1)
    assert seq.converged_norm < 1e-6
    for step in seq.steps:
        assert step.partition.equivalent({1, 3})
        assert step.compound_partition.equivalent({2, 3})
    assert_certified(seq)
    assert seq.leading_pair_nonnegative
    assert seq.leading_pair[0].real == pytest.approx(15.102, abs=1e-3)


def test_strict_target_is_certified_from_the_first_epsilon():
    seq = approximate_jss(SYMMETRIC4)
    assert_certified(seq)
    assert seq.steps[0].epsilon == 1.0
    assert seq.converged_norm < 1e-6
    assert seq.permutation.image == (2, 1, 4, 3)


def test_cyclic_shift_has_no_sequence():
    with pytest.raises(PreconditionFailed, match="not transitive"):
        approximate_jss(CYCLIC_SHIFT)
    with pytest.raises(PreconditionFailed):
        approximate_nonnegative(CYCLIC_SHIFT, RelationSet.from_pairs(3, [(1, 2), (2, 3), (3, 1)]))


def test_small_and_negative_inputs():
    with pytest.raises(PreconditionFailed):
        approximate_jss([[1.0]])
    with pytest.raises(PreconditionFailed, match="not nonnegative"):
        approximate_nonnegative(-LOWER_ONES, RelationSet.natural(3))


def test_zero_matrix_uses_rank_repair():
    with pytest.warns(RuntimeWarning, match="rank-repair"):
        seq = approximate_nonnegative(np.zeros((3, 3)), RelationSet.natural(3))
    assert seq.steps
    assert all(s.repaired for s in seq.steps)
    assert_certified(seq)
    assert seq.converged_norm < seq.steps[0].distance
    assert seq.to_json()["steps"][0]["certificate"]["repaired"]


def test_no_certified_step_raises():
    with pytest.raises(CertificationFailed) as excinfo:
        approximate_nonnegative(LOWER_ONES, RelationSet.natural(3), epsilons=[1e-4])
    assert len(excinfo.value.rejected) == 1
    assert "not strictly positive" in excinfo.value.rejected[0].reason


def test_sequence_json():
    seq = approximate_nonnegative(LOWER_ONES, RelationSet.natural(3), epsilons=default_schedule(1.0, 3))
    out = seq.to_json()
    assert out["steps"][0]["epsilon"] == 1.0
    assert len(out["steps"]) + len(out["rejected"]) == 3
    assert out["permutation"] == Permutation.identity(3).to_json()
    cert = out["steps"][0]["certificate"]
    assert cert["accepted"] and cert["strict"] and cert["compound_strict"]
    assert cert["J"] == []
