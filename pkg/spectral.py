"""
Eigenvalues, Perron/Frobenius data and the spectral classification of
J-sign-symmetric matrices with J-sign-symmetric second compounds.

The eigensolver is balancing + Hessenberg reduction (scipy) followed by a
Francis double-shift QR iteration with deflation written out below.
"""

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray
from scipy import sparse
from scipy.sparse import csgraph

from compound import second_compound, w_matrix
from matrix_core import (
    MatrixAnalysisError,
    as_matrix,
    is_irreducible,
    pattern,
    round_float,
)
from order_relation import (
    PairIndexer,
    RelationSet,
    find_transitive_w_hat,
    is_transitive,
    permutation_from_w,
)
from signsym import (
    DEFAULT_RELATIVE_BAND,
    NegativeDiagonal,
    SignConflict,
    SignPartition,
    detect_weak,
    relative_band,
    signature_from_partition,
)

# Configuration
PERIPHERAL_TOL = 1e-7
RESIDUAL_TOL = 1e-9
SIMPLICITY_FACTOR = 1e3
SWEEPS_PER_DIMENSION = 100
EXCEPTIONAL_SHIFT_EVERY = 10
PRODUCT_MATCH_TOL = 1e-8

EPS = np.finfo(np.float64).eps


class ConvergenceFailure(MatrixAnalysisError):
    """QR iteration hit its sweep cap; partial holds the eigenvalues found so far."""

    def __init__(self, message: str, partial: tuple[complex, ...]):
        super().__init__(message)
        self.partial = partial


class NotIrreducible(MatrixAnalysisError):
    pass


class MethodDisagreement(MatrixAnalysisError):
    pass


def complex_to_json(z: complex) -> dict:
    return {"re": round_float(z.real), "im": round_float(z.imag)}


# =============================================================================
# Eigensolver
# =============================================================================

def _sign(magnitude: float, reference: float) -> float:
    return abs(magnitude) if reference >= 0.0 else -abs(magnitude)


def _hessenberg_qr(h: np.ndarray, max_sweeps: int) -> tuple[list[complex], int]:
    """
    Eigenvalues of an upper Hessenberg matrix (overwritten).

    Works on the active block h[l:nn+1, l:nn+1], deflating 1x1 and 2x2
    blocks from the bottom. Returns the eigenvalues in deflation order
    and the number of double-shift sweeps spent.
    """
    n = h.shape[0]
    found: list[complex] = []
    anorm = float(np.abs(h).sum())
    nn = n - 1
    t = 0.0
    its = 0
    sweeps = 0
    x = y = w = 0.0
    while nn >= 0:
        l = nn
        while l >= 1:
            s = abs(h[l - 1, l - 1]) + abs(h[l, l])
            if s == 0.0:
                s = anorm
            if abs(h[l, l - 1]) <= EPS * s:
                h[l, l - 1] = 0.0
                break
            l -= 1

        x = h[nn, nn]
        if l == nn:
            found.append(complex(x + t, 0.0))
            nn -= 1
            its = 0
            continue

        y = h[nn - 1, nn - 1]
        w = h[nn, nn - 1] * h[nn - 1, nn]
        if l == nn - 1:
            p = 0.5 * (y - x)
            q = p * p + w
            z = math.sqrt(abs(q))
            x += t
            if q >= 0.0:
                z = p + _sign(z, p)
                second = x - w / z if z != 0.0 else x + z
                found.extend([complex(x + z, 0.0), complex(second, 0.0)])
            else:
                found.extend([complex(x + p, z), complex(x + p, -z)])
            nn -= 2
            its = 0
            continue

        if sweeps >= max_sweeps:
            raise ConvergenceFailure(
                f"no convergence after {sweeps} QR sweeps ({nn + 1} eigenvalues left)",
                tuple(found),
            )
        if its > 0 and its % EXCEPTIONAL_SHIFT_EVERY == 0:
            # exceptional shift
            t += x
            h[np.arange(nn + 1), np.arange(nn + 1)] -= x
            s = abs(h[nn, nn - 1]) + abs(h[nn - 1, nn - 2])
            x = y = 0.75 * s
            w = -0.4375 * s * s
        its += 1
        sweeps += 1

        # look for two consecutive small subdiagonal elements
        for m in range(nn - 2, l - 1, -1):
            z = h[m, m]
            r = x - z
            s = y - z
            p = (r * s - w) / h[m + 1, m] + h[m, m + 1]
            q = h[m + 1, m + 1] - z - r - s
            r = h[m + 2, m + 1]
            s = abs(p) + abs(q) + abs(r)
            p, q, r = p / s, q / s, r / s
            if m == l:
                break
            u = abs(h[m, m - 1]) * (abs(q) + abs(r))
            v = abs(p) * (abs(h[m - 1, m - 1]) + abs(z) + abs(h[m + 1, m + 1]))
            if u <= EPS * v:
                break

        for i in range(m + 2, nn + 1):
            h[i, i - 2] = 0.0
            if i != m + 2:
                h[i, i - 3] = 0.0

        # double-shift sweep on rows/columns l..nn
        for k in range(m, nn):
            last = k == nn - 1
            if k != m:
                p = h[k, k - 1]
                q = h[k + 1, k - 1]
                r = 0.0 if last else h[k + 2, k - 1]
                x = abs(p) + abs(q) + abs(r)
                if x != 0.0:
                    p, q, r = p / x, q / x, r / x
            s = _sign(math.sqrt(p * p + q * q + r * r), p)
            if s == 0.0:
                continue
            if k == m:
                if l != m:
                    h[k, k - 1] = -h[k, k - 1]
            else:
                h[k, k - 1] = -s * x
            p += s
            x, y, z = p / s, q / s, r / s
            q, r = q / p, r / p

            cols = slice(k, nn + 1)
            row = h[k, cols] + q * h[k + 1, cols]
            if not last:
                row += r * h[k + 2, cols]
                h[k + 2, cols] -= row * z
            h[k + 1, cols] -= row * y
            h[k, cols] -= row * x

            rows = slice(l, min(nn, k + 3) + 1)
            col = x * h[rows, k] + y * h[rows, k + 1]
            if not last:
                col += z * h[rows, k + 2]
                h[rows, k + 2] -= col * r
            h[rows, k + 1] -= col * q
            h[rows, k] -= col

    return found, sweeps


def _sort_key(scale: float):
    def key(z: complex):
        return (-round(abs(z) / scale, 9), -z.real, -z.imag)
    return key


@dataclass(frozen=True, eq=False)
class SpectralReport:
    """Eigenvalues (descending modulus) with residuals and Perron data."""

    eigenvalues: tuple[complex, ...]
    rho: float
    h: int
    peripheral: tuple[complex, ...]
    residuals: tuple[float, ...]
    leading_vector: NDArray[np.complex128]
    sweeps: int
    valid: bool

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    def to_json(self) -> dict:
        return {
            "eigenvalues": [complex_to_json(z) for z in self.eigenvalues],
            "rho": round_float(self.rho),
            "h": self.h,
            "peripheral": [complex_to_json(z) for z in self.peripheral],
            "max_residual": round_float(max(self.residuals)),
            "sweeps": self.sweeps,
            "valid": self.valid,
        }


def _hessenberg_band(h: np.ndarray) -> tuple[np.ndarray, tuple[int, int]]:
    """Upper Hessenberg h in the (lower, upper) band storage of solve_banded."""
    n = h.shape[0]
    lower, upper = min(1, n - 1), n - 1
    i, j = np.indices((n, n))
    keep = i - j <= lower
    band = np.zeros((lower + upper + 1, n), dtype=np.complex128)
    band[(upper + i - j)[keep], j[keep]] = h[keep]
    return band, (lower, upper)


def _inverse_iteration(band: np.ndarray, shape: tuple[int, int], z: complex, scale: float) -> np.ndarray:
    """
    Eigenvector of the Hessenberg matrix for the eigenvalue z.

    Two banded solves with H - (z + delta) I, delta a few ulps of scale so
    that exact eigenvalues do not hit a singular pivot.
    """
    lower, upper = shape
    n = band.shape[1]
    if n == 1:
        return np.ones(1, dtype=np.complex128)
    diagonal = band[upper].copy()
    for delta in (EPS * scale, 1e3 * EPS * scale, 1e6 * EPS * scale):
        band[upper] = diagonal - (z + delta)
        y = np.ones(n, dtype=np.complex128)
        try:
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                for _ in range(2):
                    y = scipy.linalg.solve_banded((lower, upper), band, y, check_finite=False)
                    y /= np.linalg.norm(y)
        except np.linalg.LinAlgError:
            continue
        if np.all(np.isfinite(y)):
            band[upper] = diagonal
            return y
    band[upper] = diagonal
    return np.ones(n, dtype=np.complex128) / math.sqrt(n)


def eigenvalues(a: ArrayLike, tol: float = RESIDUAL_TOL) -> SpectralReport:
    """
    All eigenvalues of A with per-eigenvalue backward errors.

    Each eigenvector comes from inverse iteration on the Hessenberg form
    (banded LU, O(n^2) per eigenvalue) mapped back through the Hessenberg
    and balancing similarities. The residual of lambda is
    ||A x - lambda x|| / ||x||. A report whose residuals exceed
    tol * ||A||_F is flagged invalid and warned about.
    """
    a = as_matrix(a)
    n = a.shape[0]
    balanced, transform = scipy.linalg.matrix_balance(a, permute=True, scale=True)
    hess, q = scipy.linalg.hessenberg(balanced, calc_q=True)
    h = np.triu(hess, -1)
    band, shape = _hessenberg_band(h)
    found, sweeps = _hessenberg_qr(h, SWEEPS_PER_DIMENSION * n)

    scale = max(max(abs(z) for z in found), np.finfo(np.float64).tiny)
    ordered = tuple(sorted(found, key=_sort_key(scale)))
    rho = float(max(abs(z) for z in ordered))

    norm = max(float(np.linalg.norm(a)), np.finfo(np.float64).tiny)
    ys = np.column_stack([_inverse_iteration(band, shape, z, norm) for z in ordered])
    vectors = transform @ (q @ ys)
    vectors /= np.linalg.norm(vectors, axis=0)
    lams = np.array(ordered, dtype=np.complex128)
    residuals = [float(r) for r in np.linalg.norm(a @ vectors - vectors * lams, axis=0)]
    valid = all(r <= tol * norm for r in residuals)
    if not valid:
        warnings.warn(
            f"eigen-residual {max(residuals):.3g} exceeds {tol:g} * ||A||_F", RuntimeWarning
        )

    peripheral = tuple(z for z in ordered if abs(z) >= rho * (1.0 - PERIPHERAL_TOL))
    return SpectralReport(
        eigenvalues=ordered,
        rho=rho,
        h=len(peripheral),
        peripheral=peripheral,
        residuals=tuple(residuals),
        leading_vector=vectors[:, 0],
        sweeps=sweeps,
        valid=valid,
    )


# =============================================================================
# Multiset matching
# =============================================================================

def match_multisets(xs, ys) -> float:
    """
    Greedy nearest-neighbour pairing of two complex multisets.

    Returns the worst pair distance (inf when the sizes differ).
    """
    xs = [complex(x) for x in xs]
    remaining = [complex(y) for y in ys]
    if len(xs) != len(remaining):
        return math.inf
    worst = 0.0
    for x in sorted(xs, key=lambda z: (-abs(z), -z.real, -z.imag)):
        distances = [abs(x - y) for y in remaining]
        best = int(np.argmin(distances))
        worst = max(worst, distances[best])
        remaining.pop(best)
    return worst


@dataclass(frozen=True)
class ProductMatch:
    """Outcome of comparing the spectrum of a W-matrix with pairwise products."""

    matched: bool
    worst: float
    tolerance: float

    def __bool__(self) -> bool:
        return self.matched


def check_product_spectrum(a: ArrayLike, w: RelationSet, tol: float = PRODUCT_MATCH_TOL) -> ProductMatch:
    """Eigenvalues of w_matrix(A, W) against {lambda_i * lambda_j : i < j}."""
    a = as_matrix(a)
    spectrum = eigenvalues(a)
    compound_spectrum = eigenvalues(w_matrix(a, w))
    lams = spectrum.eigenvalues
    products = [lams[i] * lams[j] for i in range(len(lams)) for j in range(i + 1, len(lams))]
    floor = EPS * float(np.linalg.norm(a)) ** 2
    tolerance = tol * max(spectrum.rho ** 2, floor, np.finfo(np.float64).tiny)
    worst = match_multisets(compound_spectrum.eigenvalues, products)
    return ProductMatch(worst <= tolerance, worst, tolerance)


def roots_of(rho: float, h: int) -> list[complex]:
    """The h-th roots of rho^h: rho * exp(2 pi i k / h)."""
    return [rho * complex(math.cos(2 * math.pi * k / h), math.sin(2 * math.pi * k / h)) for k in range(h)]


def is_rotation_invariant(report: SpectralReport, h: int, tol: float = PERIPHERAL_TOL) -> bool:
    """Spectrum unchanged (as a multiset) by multiplication with exp(2 pi i / h)."""
    turn = complex(math.cos(2 * math.pi / h), math.sin(2 * math.pi / h))
    rotated = [z * turn for z in report.eigenvalues]
    return match_multisets(report.eigenvalues, rotated) <= tol * max(report.rho, 1.0)


# =============================================================================
# Imprimitivity
# =============================================================================

def graph_period(adj: ArrayLike) -> int:
    """
    gcd of the cycle lengths of a strongly connected digraph.

    Levels come from a BFS tree rooted at node 0; the period is the gcd of
    level[u] - level[v] + 1 over all edges u -> v.
    """
    adj = np.asarray(adj, dtype=bool)
    n = adj.shape[0]
    if n == 1 or adj.diagonal().any():
        return 1
    graph = sparse.csr_matrix(adj)
    num_scc, _ = csgraph.connected_components(graph, directed=True, connection="strong")
    if num_scc != 1:
        raise NotIrreducible("period is only defined for strongly connected digraphs")
    order, predecessors = csgraph.breadth_first_order(graph, 0, directed=True, return_predecessors=True)
    level = np.zeros(n, dtype=int)
    for v in order[1:]:
        level[v] = level[predecessors[v]] + 1
    d = 0
    for u, v in np.argwhere(adj):
        d = math.gcd(d, int(level[u] - level[v] + 1))
        if d == 1:
            break
    return d


def imprimitivity_index(a: ArrayLike, report: SpectralReport | None = None, zero_tol: float = 0.0) -> int:
    """
    h(A) for an irreducible (signature-similar to) nonnegative matrix.

    The peripheral eigenvalue count is cross-checked against the cycle gcd
    of the nonzero pattern. The peripheral spectrum has to be the h-th
    roots of rho^h and the whole spectrum invariant under rotation by
    2 pi / h. For exact 0/1 pattern matrices the graph value is taken when
    the checks disagree.
    """
    a = as_matrix(a)
    if not is_irreducible(a, zero_tol):
        raise NotIrreducible("imprimitivity index needs an irreducible matrix")
    if report is None:
        report = eigenvalues(a)
    graph_h = graph_period(pattern(a, zero_tol))
    spectral_h = report.h
    roots_ok = (
        spectral_h == graph_h
        and match_multisets(report.peripheral, roots_of(report.rho, spectral_h))
        <= PERIPHERAL_TOL * report.rho
        and is_rotation_invariant(report, graph_h)
    )
    if roots_ok:
        return graph_h

    message = (
        f"spectral count {spectral_h} vs cycle gcd {graph_h}"
        f" (peripheral {[complex(round(z.real, 9), round(z.imag, 9)) for z in report.peripheral]})"
    )
    magnitudes = np.abs(a)
    if np.all((magnitudes == 0) | (magnitudes == 1)):
        warnings.warn(f"{message}; using the pattern value for a 0/1 matrix", RuntimeWarning)
        return graph_h
    raise MethodDisagreement(message)


# =============================================================================
# Classification
# =============================================================================

class Case(enum.Enum):
    TWO_POSITIVE_LEADING = "TwoPositiveLeading"
    TRIDENT_H3 = "TridentH3"
    INAPPLICABLE = "Inapplicable"


@dataclass(eq=False)
class Classification:
    case: Case
    lambda1: float | None = None
    lambda2: float | None = None
    h_a: int | None = None
    h_compound: int | None = None
    ring: tuple[complex, ...] = ()
    peripheral: tuple[complex, ...] = ()
    partition: SignPartition | None = None
    compound_partition: SignPartition | None = None
    relation: RelationSet | None = None
    transitive: bool | None = None
    perron_vector_positive: bool | None = None
    witness: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {
            "case": self.case.value,
            "lambda1": None if self.lambda1 is None else round_float(self.lambda1),
            "lambda2": None if self.lambda2 is None else round_float(self.lambda2),
            "h_a": self.h_a,
            "h_compound": self.h_compound,
            "ring": [complex_to_json(z) for z in self.ring],
            "peripheral": [complex_to_json(z) for z in self.peripheral],
            "transitive": self.transitive,
            "perron_vector_positive": self.perron_vector_positive,
            "witness": list(self.witness),
        }
        return out


def _is_simple(report: SpectralReport, index: int, scale: float) -> bool:
    """Gap to the rest of the spectrum exceeds SIMPLICITY_FACTOR times the residual bound."""
    z = report.eigenvalues[index]
    others = [abs(z - y) for k, y in enumerate(report.eigenvalues) if k != index]
    if not others:
        return True
    bound = max(report.residuals[index], EPS * scale)
    return min(others) > SIMPLICITY_FACTOR * bound


def _perron_sign(report: SpectralReport, partition: SignPartition) -> bool:
    """D x_1 has a single strict sign (x_1 the leading eigenvector)."""
    x = np.asarray(report.leading_vector)
    x = x * np.exp(-1j * np.angle(x[np.argmax(np.abs(x))]))
    signs = np.array(signature_from_partition(partition).signs, dtype=np.float64)
    v = signs * x.real
    return bool(np.all(v > RESIDUAL_TOL) or np.all(v < -RESIDUAL_TOL))


def classify(a: ArrayLike, rel_band: float = DEFAULT_RELATIVE_BAND) -> Classification:
    """
    Decide which spectral picture applies to a J-sign-symmetric matrix.

    Transitive relation: two positive simple leading eigenvalues (with the
    ring of eigenvalues of modulus lambda2 when A ^ A is imprimitive).
    Non-transitive relation with irreducible A and A^(2): exactly three
    peripheral eigenvalues, the cube roots of rho^3. Anything else is
    reported as Inapplicable together with the failed precondition.
    """
    a = as_matrix(a)
    n = a.shape[0]
    result = Classification(Case.INAPPLICABLE)
    trace = result.witness

    def inapplicable(reason: str) -> Classification:
        trace.append(f"inapplicable: {reason}")
        result.case = Case.INAPPLICABLE
        return result

    if n < 2:
        return inapplicable("n < 2, there is no second compound")

    try:
        j = detect_weak(a)
    except (SignConflict, NegativeDiagonal) as e:
        return inapplicable(f"A is not weakly J-sign-symmetric ({e})")
    trace.append(f"A weakly J-sign-symmetric with J = {list(j.members)}")

    c = second_compound(a)
    band = relative_band(c, rel_band)
    try:
        j_tilde = detect_weak(c, band)
    except (SignConflict, NegativeDiagonal) as e:
        return inapplicable(f"A^(2) is not weakly J-sign-symmetric ({e})")
    trace.append(f"A^(2) weakly J-sign-symmetric with J~ = {list(j_tilde.members)}")

    w, j, j_tilde = find_transitive_w_hat(j, j_tilde, PairIndexer(n))
    result.partition = j
    result.compound_partition = j_tilde
    result.relation = w
    result.transitive = is_transitive(w)
    trace.append(f"W-hat = {w.pairs()} is {'transitive' if result.transitive else 'not transitive'}")

    spec_a = eigenvalues(a)
    spec_c = eigenvalues(c)
    result.peripheral = spec_a.peripheral
    result.h_a = spec_a.h
    result.h_compound = spec_c.h
    result.perron_vector_positive = _perron_sign(spec_a, j)
    scale = max(float(np.linalg.norm(a)), np.finfo(np.float64).tiny)

    if result.transitive:
        theta = permutation_from_w(w)
        trace.append(f"order {' < '.join(map(str, theta.image))}")
        return _classify_transitive(result, spec_a, spec_c, scale, inapplicable)

    if not is_irreducible(a):
        return inapplicable("W-hat is not transitive and A is reducible")
    if not is_irreducible(c, band):
        return inapplicable("W-hat is not transitive and A^(2) is reducible")
    result.h_a = imprimitivity_index(a, spec_a)
    result.h_compound = imprimitivity_index(c, spec_c, band)
    trace.append(f"h(A) = {result.h_a}, h(A^A) = {result.h_compound}")
    if result.h_a != 3 or result.h_compound != 3:
        return inapplicable(f"expected h(A) = h(A^A) = 3, got {result.h_a} and {result.h_compound}")
    worst = match_multisets(spec_a.peripheral, roots_of(spec_a.rho, 3))
    if worst > PERIPHERAL_TOL * spec_a.rho:
        return inapplicable(f"peripheral spectrum is not the cube roots of rho^3 (off by {worst:.3g})")
    if not all(_is_simple(spec_a, k, scale) for k in range(3)):
        return inapplicable("a peripheral eigenvalue is not simple")
    result.case = Case.TRIDENT_H3
    result.lambda1 = spec_a.rho
    trace.append(f"three simple peripheral eigenvalues, cube roots of {spec_a.rho:.6g}^3")
    return result


def _classify_transitive(result, spec_a, spec_c, scale, inapplicable) -> Classification:
    trace = result.witness
    lead = spec_a.eigenvalues[0]
    rho = spec_a.rho
    tol = PERIPHERAL_TOL * rho
    if rho <= 0.0 or abs(lead.imag) > tol or lead.real <= 0.0:
        return inapplicable(f"leading eigenvalue {lead:.6g} is not real positive")
    if not _is_simple(spec_a, 0, scale):
        return inapplicable(f"lambda1 = {lead.real:.6g} is not simple")
    lambda1 = lead.real
    lambda2 = spec_c.rho / lambda1

    # cross-check against the spectrum of A
    rest = list(enumerate(spec_a.eigenvalues))[1:]
    hits = [k for k, z in rest if abs(z - lambda2) <= tol]
    if not hits or lambda2 <= tol:
        return inapplicable(f"rho(A^A)/rho(A) = {lambda2:.6g} is not a positive eigenvalue of A")
    if not _is_simple(spec_a, hits[0], scale):
        return inapplicable(f"lambda2 = {lambda2:.6g} is not simple")
    if abs(abs(spec_a.eigenvalues[1]) - lambda2) > tol:
        return inapplicable(f"lambda2 = {lambda2:.6g} is not the second largest in modulus")
    if lambda1 - lambda2 <= tol:
        return inapplicable("lambda1 and lambda2 coincide")

    result.lambda1 = lambda1
    result.lambda2 = lambda2
    trace.append(f"lambda1 = rho(A) = {lambda1:.6g} simple positive")
    trace.append(f"lambda2 = rho(A^A)/lambda1 = {lambda2:.6g} simple positive")

    k = spec_c.h
    if k > 1:
        ring = tuple(z for _, z in rest if abs(abs(z) - lambda2) <= tol)
        worst = match_multisets(ring, roots_of(lambda2, k))
        if worst > tol:
            return inapplicable(f"the {len(ring)} eigenvalues of modulus lambda2 are not the {k}-th roots of lambda2^{k}")
        result.ring = ring
        trace.append(f"h(A^A) = {k}: ring of {k} eigenvalues of modulus lambda2")
    result.case = Case.TWO_POSITIVE_LEADING
    return result
