"""
Approximating sequences of strictly J-sign-symmetric matrices whose second
compounds are strictly J-sign-symmetric as well.

A nonnegative target with a transitive order relation is first permuted
into P with P >= 0 and P^(2) >= 0, then smoothed from both sides by a
Gaussian kernel G_eps (strictly totally positive):

    P_eps = G_eps P G_eps,    P_eps^(2) = G_eps^(2) P^(2) G_eps^(2)

Every factor of the compound product is entrywise nonnegative, so the
signs of P_eps^(2) are exact. The certificate itself runs detect_strict
with zero_tol = 0 on the approximant and on second_compound(approximant),
and the latter must carry the signs of the exact product mapped back
through the signed permutations D^(2) and Q_theta^(2). Minors that cancel
to zero once the kernel gets narrow end the sequence.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import logsumexp

from compound import compound_permutation_matrix, compound_signature, second_compound
from matrix_core import (
    Matrix,
    MatrixAnalysisError,
    Permutation,
    SignatureMatrix,
    as_matrix,
    conjugate_permutation,
    conjugate_signature,
    max_entry_distance,
    round_float,
)
from order_relation import (
    NotTransitive,
    PairIndexer,
    RelationSet,
    find_transitive_w_hat,
    is_transitive,
    permutation_from_w,
)
from signsym import (
    DEFAULT_RELATIVE_BAND,
    SignConflict,
    SignPartition,
    ZeroEntry,
    detect_strict,
    detect_weak,
    relative_band,
    signature_from_partition,
)
from spectral import complex_to_json, eigenvalues

# Configuration
DEFAULT_EPSILON0 = 1.0
DEFAULT_STEPS = 40
REPAIR_SCALE = 1e-3
LEADING_PAIR_TOL = 1e-4


class PreconditionFailed(MatrixAnalysisError):
    pass


class CertificationFailed(MatrixAnalysisError):
    def __init__(self, message: str, rejected: list["ApproxStep"]):
        super().__init__(message)
        self.rejected = rejected


def default_schedule(epsilon0: float = DEFAULT_EPSILON0, steps: int = DEFAULT_STEPS) -> list[float]:
    """eps_k = eps0 * 2^-k, k = 0..steps-1."""
    return [epsilon0 * 2.0 ** -k for k in range(steps)]


# =============================================================================
# Smoothing kernel
# =============================================================================

def _log_kernel(n: int, epsilon: float) -> np.ndarray:
    idx = np.arange(n)
    log_g = -((idx[:, None] - idx[None, :]) ** 2) / epsilon
    return log_g - logsumexp(log_g, axis=1, keepdims=True)


def smoothing_kernel(n: int, epsilon: float) -> Matrix:
    """G_eps with g_ij proportional to q^((i-j)^2), q = exp(-1/eps), rows summing to 1."""
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    return as_matrix(np.exp(_log_kernel(n, epsilon)))


def smoothing_kernel_compound(n: int, epsilon: float) -> Matrix:
    """
    G_eps^(2) in closed form.

    For rows i < j and columns k < l the minor is
    g_ik g_jl (1 - exp(-2 (j-i)(l-k) / eps)), evaluated in log space so
    it stays strictly positive until it underflows.
    """
    log_g = _log_kernel(n, epsilon)
    pairs = np.array(PairIndexer(n).pairs, dtype=np.intp).reshape(-1, 2) - 1
    i, j = pairs[:, 0][:, None], pairs[:, 1][:, None]
    k, l = pairs[:, 0][None, :], pairs[:, 1][None, :]
    log_lead = log_g[i, k] + log_g[j, l]
    return as_matrix(np.exp(log_lead) * -np.expm1(-2.0 * (j - i) * (l - k) / epsilon))


# =============================================================================
# Order normalization
# =============================================================================

@dataclass(frozen=True, eq=False)
class OrderedForm:
    """P = Q_theta^T A Q_theta with P >= 0 and P^(2) >= 0 (band entries zeroed)."""

    theta: Permutation
    p: Matrix
    p2: Matrix


def normalize_by_order(a: ArrayLike, w: RelationSet, zero_tol: float = 0.0) -> OrderedForm:
    """
    Reorder a nonnegative A along the linear order W.

    Raises PreconditionFailed when W is not transitive or when the
    reordered matrix or its compound has an entry below -zero_tol.
    """
    a = as_matrix(a)
    try:
        theta = permutation_from_w(w)
    except NotTransitive as e:
        raise PreconditionFailed(f"W is not transitive, no approximating sequence is available ({e})") from e
    p = conjugate_permutation(a, theta)
    if np.any(p < 0):
        raise PreconditionFailed("A has negative entries")
    p2 = np.array(second_compound(p))
    if np.any(p2 < -zero_tol):
        worst = float(p2.min())
        raise PreconditionFailed(f"reordered compound has a negative entry {worst:.6g}")
    p2[np.abs(p2) <= zero_tol] = 0.0
    return OrderedForm(theta, p, as_matrix(p2))


# =============================================================================
# Sequences
# =============================================================================

@dataclass(frozen=True, eq=False)
class ApproxStep:
    """One epsilon of the schedule with its verification record."""

    epsilon: float
    approximant: Matrix | None
    compound: Matrix | None
    distance: float
    accepted: bool
    reason: str = ""
    partition: SignPartition | None = None
    compound_partition: SignPartition | None = None
    repaired: bool = False

    def to_json(self) -> dict:
        return {
            "epsilon": round_float(self.epsilon),
            "distance": None if math.isinf(self.distance) else round_float(self.distance),
            "certificate": {
                "accepted": self.accepted,
                "strict": self.partition is not None,
                "compound_strict": self.compound_partition is not None,
                "J": None if self.partition is None else list(self.partition.members),
                "J_compound": None if self.compound_partition is None else list(self.compound_partition.members),
                "repaired": self.repaired,
                "reason": self.reason,
            },
        }


@dataclass(eq=False)
class ApproxSequence:
    target: Matrix
    steps: list[ApproxStep] = field(default_factory=list)
    rejected: list[ApproxStep] = field(default_factory=list)
    converged_norm: float = math.inf
    permutation: Permutation | None = None
    relation: RelationSet | None = None
    signature: SignatureMatrix | None = None
    leading_pair: tuple[complex, ...] = ()
    leading_pair_nonnegative: bool | None = None

    def to_json(self) -> dict:
        return {
            "steps": [s.to_json() for s in self.steps],
            "rejected": [s.to_json() for s in self.rejected],
            "converged_norm": round_float(self.converged_norm),
            "permutation": None if self.permutation is None else self.permutation.to_json(),
            "relation": None if self.relation is None else self.relation.to_json(),
            "signature": None if self.signature is None else list(self.signature.signs),
            "leading_pair": [complex_to_json(z) for z in self.leading_pair],
            "leading_pair_nonnegative": self.leading_pair_nonnegative,
        }


def _vanishes(m: np.ndarray) -> bool:
    return m.size == 0 or not np.any(m)


def _repair(form: OrderedForm, epsilon: float, epsilon0: float) -> tuple[Matrix, Matrix]:
    """P + eta*K with K the eps0 kernel and eta = REPAIR_SCALE * eps * max(1, max|P|)."""
    n = form.p.shape[0]
    eta = REPAIR_SCALE * epsilon * max(1.0, float(np.max(np.abs(form.p))))
    p = form.p + eta * smoothing_kernel(n, epsilon0)
    return as_matrix(p), second_compound(p)


def _leading_pair(a: Matrix) -> tuple[tuple[complex, ...], bool]:
    report = eigenvalues(a)
    pair = report.eigenvalues[:2]
    tol = LEADING_PAIR_TOL * max(report.rho, np.finfo(np.float64).tiny)
    return pair, all(abs(z.imag) <= tol and z.real >= -tol for z in pair)


def _approximate(target: Matrix, nonnegative: Matrix, w: RelationSet, d: SignatureMatrix,
                 epsilons, rel_band: float) -> ApproxSequence:
    n = target.shape[0]
    if n < 2:
        raise PreconditionFailed("approximation needs n >= 2")
    if np.any(nonnegative < 0):
        raise PreconditionFailed("the matrix to approximate is not nonnegative")
    if not is_transitive(w):
        raise PreconditionFailed(f"W = {w.pairs()} is not transitive, approximation is not always possible")
    band = relative_band(second_compound(nonnegative), rel_band)
    form = normalize_by_order(nonnegative, w, band)
    epsilons = default_schedule() if epsilons is None else list(epsilons)
    epsilon0 = epsilons[0] if epsilons else DEFAULT_EPSILON0
    needs_repair = _vanishes(form.p) or _vanishes(form.p2)
    if needs_repair:
        warnings.warn("reordered matrix or its compound vanishes; using the rank-repair fallback", RuntimeWarning)

    inverse = form.theta.inverse()
    s2 = compound_signature(d).matrix() @ compound_permutation_matrix(form.theta)

    sequence = ApproxSequence(target=target, permutation=form.theta, relation=w, signature=d)
    last_distance = math.inf
    for epsilon in epsilons:
        p, p2 = _repair(form, epsilon, epsilon0) if needs_repair else (form.p, form.p2)
        g = smoothing_kernel(n, epsilon)
        g2 = smoothing_kernel_compound(n, epsilon)
        p_eps = g @ p @ g
        p2_eps = g2 @ p2 @ g2
        if not (np.all(p_eps > 0) and np.all(p2_eps > 0)):
            sequence.rejected.append(ApproxStep(epsilon, None, None, math.inf, False,
                                                "smoothed matrix or compound is not strictly positive",
                                                repaired=needs_repair))
            if sequence.steps:
                break
            continue

        approximant = conjugate_signature(conjugate_permutation(p_eps, inverse), d)
        # certify the compound of the matrix actually handed out
        compound = second_compound(approximant)
        distance = max_entry_distance(approximant, target)
        try:
            j = detect_strict(approximant)
            j_tilde = detect_strict(compound)
        except (SignConflict, ZeroEntry) as e:
            reason = f"strict detection failed: {e}"
        else:
            exact = s2 @ p2_eps @ s2.T
            same = np.array_equal(np.sign(compound), np.sign(exact))
            reason = "" if same else "compound signs differ from the exact product"
        if reason:
            sequence.rejected.append(ApproxStep(epsilon, approximant, compound, distance, False,
                                                reason, repaired=needs_repair))
            if sequence.steps:
                break
            continue
        if distance > last_distance:
            sequence.rejected.append(ApproxStep(epsilon, approximant, compound, distance, False,
                                                "distance to the target increased", j, j_tilde, needs_repair))
            continue
        sequence.steps.append(ApproxStep(epsilon, approximant, compound, distance, True, "", j, j_tilde, needs_repair))
        last_distance = distance

    if not sequence.steps:
        raise CertificationFailed(
            f"no step certified within {len(epsilons)} values of epsilon", sequence.rejected
        )
    sequence.converged_norm = last_distance
    sequence.leading_pair, sequence.leading_pair_nonnegative = _leading_pair(target)
    return sequence


def approximate_nonnegative(a: ArrayLike, w: RelationSet, epsilons=None,
                            rel_band: float = DEFAULT_RELATIVE_BAND) -> ApproxSequence:
    """
    Certified positive approximants with positive (reordered) compounds.

    Needs A >= 0 and a transitive W for which the reordered compound is
    nonnegative. Each accepted step passes detect_strict on the
    approximant and on its compound; the first failure after an accepted
    step ends the sequence.
    """
    a = as_matrix(a)
    return _approximate(a, a, w, SignatureMatrix.identity(a.shape[0]), epsilons, rel_band)


def approximate_jss(a: ArrayLike, epsilons=None, rel_band: float = DEFAULT_RELATIVE_BAND) -> ApproxSequence:
    """
    Certified strictly J-sign-symmetric approximants of a weakly
    J-sign-symmetric A whose compound is weakly J-sign-symmetric.

    A = D A~ D with A~ >= 0; A~ is approximated along W-hat and every
    approximant is conjugated back by D.
    """
    a = as_matrix(a)
    n = a.shape[0]
    if n < 2:
        raise PreconditionFailed("approximation needs n >= 2")
    j = detect_weak(a)
    c = second_compound(a)
    j_tilde = detect_weak(c, relative_band(c, rel_band))
    w, j, j_tilde = find_transitive_w_hat(j, j_tilde, PairIndexer(n))
    if not is_transitive(w):
        raise PreconditionFailed(f"W-hat = {w.pairs()} is not transitive, approximation is not always possible")
    d = signature_from_partition(j)
    return _approximate(a, conjugate_signature(a, d), w, d, epsilons, rel_band)
