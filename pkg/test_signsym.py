import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from compound import second_compound
from conftest import (
    SYMMETRIC4_COMPOUND,
    POSITIVE4_COMPOUND,
    CYCLIC_SHIFT,
    CYCLIC_SHIFT_COMPOUND,
    WEAK3,
    random_signature,
)
from matrix_core import conjugate_signature, is_irreducible
from signsym import (
    NegativeDiagonal,
    SignConflict,
    SignPartition,
    UniverseMismatch,
    ZeroEntry,
    detect_strict,
    detect_weak,
    enumerate_partitions,
    relative_band,
    signature_from_partition,
    verify_partition,
)
from spectral import PERIPHERAL_TOL, eigenvalues, match_multisets


def test_symmetric4_compound_strict_partition():
    j = detect_strict(SYMMETRIC4_COMPOUND)
    assert j.strict
    assert j.equivalent({1, 6})
    assert j.members == (2, 3, 4, 5)
    assert j.unique_up_to_complement
    assert verify_partition(SYMMETRIC4_COMPOUND, j, strict=True)
    assert not verify_partition(SYMMETRIC4_COMPOUND, SignPartition.of(6, [1, 2]), strict=True)


def test_positive4_compound_strict_partition():
    assert detect_strict(POSITIVE4_COMPOUND).equivalent({1, 2, 3})


def test_cyclic_shift_weak_partitions():
    assert detect_weak(CYCLIC_SHIFT).members == ()
    j_tilde = detect_weak(CYCLIC_SHIFT_COMPOUND)
    assert j_tilde.members == (2,)
    assert j_tilde.equivalent({1, 3})


def test_weak3_weak_partitions():
    j = detect_weak(WEAK3)
    assert j.equivalent({1, 3})
    assert not j.strict
    c = second_compound(WEAK3)
    assert detect_strict(c, relative_band(c)).equivalent({2, 3})


def test_weak3_is_not_strict():
    with pytest.raises(ZeroEntry) as excinfo:
        detect_strict(WEAK3)
    assert excinfo.value.position == (1, 2)


def test_asymmetric_pair_gives_two_cycle():
    with pytest.raises(SignConflict) as excinfo:
        detect_weak([[1.0, 2.0], [-1.0, 1.0]])
    assert set(excinfo.value.witness) == {1, 2}


def test_odd_cycle_witness():
    a = np.array([
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ])
    with pytest.raises(SignConflict) as excinfo:
        detect_strict(a)
    witness = excinfo.value.witness
    assert sorted(witness) == [1, 2, 3]
    assert "->" in str(excinfo.value)


def test_negative_diagonal():
    with pytest.raises(NegativeDiagonal) as excinfo:
        detect_weak([[1.0, 0.0], [0.0, -2.0]])
    assert excinfo.value.index == 2


def test_zero_matrix_has_every_partition():
    j = detect_weak(np.zeros((3, 3)))
    assert j.members == ()
    assert j.alternatives_count == 4
    assert len(list(j.alternatives())) == 4
    assert all(verify_partition(np.zeros((3, 3)), alt, strict=False) for alt in j.alternatives())


def test_verify_universe_mismatch():
    with pytest.raises(UniverseMismatch):
        verify_partition(np.eye(3), SignPartition.of(4, []), strict=False)


def test_enumerate_partitions_count_and_uniqueness(rng):
    parts = list(enumerate_partitions(4))
    assert len(parts) == 8
    assert all(1 not in p.members for p in parts)
    n = 4
    s = random_signature(rng, n)
    a = s[:, None] * rng.uniform(0.5, 2.0, size=(n, n)) * s[None, :]
    matching = [p for p in parts if verify_partition(a, p, strict=True)]
    assert len(matching) == 1
    assert matching[0].equivalent(detect_strict(a).members)


def test_signature_similarity_certificates(rng):
    for trial in range(50):
        n = int(rng.integers(2, 7))
        strict = trial % 2 == 0
        base = rng.uniform(0.1, 3.0, size=(n, n))
        if not strict:
            mask = rng.random(size=(n, n)) < 0.4
            np.fill_diagonal(mask, False)
            base[mask] = 0.0
        s = random_signature(rng, n)
        a = s[:, None] * base * s[None, :]

        j = detect_strict(a) if strict else detect_weak(a)
        d = signature_from_partition(j)
        positive = conjugate_signature(a, d)
        if strict:
            assert np.all(positive > 0)
        else:
            assert np.all(positive >= 0)
        assert verify_partition(a, j, strict=strict)

        before = eigenvalues(a)
        after = eigenvalues(positive)
        assert match_multisets(before.eigenvalues, after.eigenvalues) <= 1e-8 * max(before.rho, 1.0)
        assert is_irreducible(a) == is_irreducible(positive)

        if strict:
            # rho is a simple real eigenvalue that strictly dominates in modulus
            lead, runner_up = before.eigenvalues[0], abs(before.eigenvalues[1])
            assert abs(lead.imag) <= PERIPHERAL_TOL * before.rho
            assert lead.real == pytest.approx(before.rho)
            assert before.rho - runner_up > 10 * PERIPHERAL_TOL * before.rho
            assert before.h == 1


@settings(deadline=None, max_examples=80)
@given(
    st.integers(min_value=1, max_value=6).flatmap(
        lambda n: st.tuples(
            arrays(np.float64, (n, n), elements=st.sampled_from([0.0, 0.5, 1.0, 2.0, 7.0])),
            st.lists(st.sampled_from([-1.0, 1.0]), min_size=n, max_size=n),
        )
    )
)
def test_detected_partition_always_verifies(case):
    base, signs = case
    s = np.array(signs)
    a = s[:, None] * base * s[None, :]
    j = detect_weak(a)
    assert verify_partition(a, j, strict=False)
    assert np.all(conjugate_signature(a, signature_from_partition(j)) >= 0)
    for alt in j.alternatives():
        assert verify_partition(a, alt, strict=False)
