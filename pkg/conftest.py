"""Shared fixtures: the worked example matrices and seeded random generators."""

from pathlib import Path

import numpy as np
import pytest

FIXTURES = Path(__file__).parent / "fixtures"

SYMMETRIC4 = np.array([
    [30, 41, 3, 16],
    [41, 61, 3, 20],
    [3, 3, 1, 2],
    [16, 20, 2, 10],
], dtype=float)

SYMMETRIC4_COMPOUND = np.array([
    [149, -33, -56, -60, -156, 12],
    [-33, 21, 12, 32, 34, -10],
    [-56, 12, 44, 22, 90, -2],
    [-60, 32, 22, 52, 62, -14],
    [-156, 34, 90, 62, 210, -10],
    [12, -10, -2, -14, -10, 6],
], dtype=float)

POSITIVE4 = np.array([
    [2, 5, 4, 3],
    [3, 36, 25, 12],
    [3, 25, 18, 9],
    [3, 12, 9, 6],
], dtype=float)

POSITIVE4_COMPOUND = np.array([
    [57, 38, 15, -19, -48, -27],
    [35, 24, 9, -10, -30, -18],
    [9, 6, 3, -3, -6, -3],
    [-33, -21, -9, 23, 24, 9],
    [-72, -48, -18, 24, 72, 42],
    [-39, -27, -9, 9, 42, 27],
], dtype=float)

CYCLIC_SHIFT = np.array([
    [0, 0, 1],
    [1, 0, 0],
    [0, 1, 0],
], dtype=float)

CYCLIC_SHIFT_COMPOUND = np.array([
    [0, -1, 0],
    [0, 0, -1],
    [1, 0, 0],
], dtype=float)

WEAK3 = np.array([
    [8.5, 0, 6.1],
    [-5.6, 3.2, -7.4],
    [6, -2.8, 6.6],
])

WEAK3_COMPOUND = np.array([
    [27.2, -28.74, -19.52],
    [-23.8, 19.5, 17.08],
    [-3.52, 7.44, 0.4],
])

LOWER_ONES = np.tril(np.ones((3, 3)))


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


def random_signature(rng, n):
    return rng.choice([-1.0, 1.0], size=n)


def random_permutation(rng, n):
    return tuple(int(i) + 1 for i in rng.permutation(n))


def random_totally_nonnegative(rng, n, zero_fraction=0.3):
    """
    Product of elementary bidiagonal factors with nonnegative weights.

    Such products are totally nonnegative; zeroing some weights keeps them
    so while leaving zero entries and zero minors behind.
    """
    m = np.diag(rng.uniform(0.5, 2.0, size=n))
    for k in list(range(n - 1, 0, -1)) + list(range(1, n)):
        for lower in (True, False):
            weight = 0.0 if rng.random() < zero_fraction else rng.uniform(0.1, 1.5)
            e = np.eye(n)
            if lower:
                e[k, k - 1] = weight
            else:
                e[k - 1, k] = weight
            m = e @ m if lower else m @ e
    return m


def random_weighted_cycle(rng):
    """diag(a, b, c) times the cyclic shift, randomly permuted and re-signed."""
    shift = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=float)
    a = np.diag(rng.uniform(0.2, 5.0, size=3)) @ shift
    idx = rng.permutation(3)
    a = a[np.ix_(idx, idx)]
    s = random_signature(rng, 3)
    return s[:, None] * a * s[None, :]
