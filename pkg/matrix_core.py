"""
Dense real matrices and the elementary constructions built on them.

- read-only float64 arrays validated by as_matrix()
- signature (diagonal +-1) and permutation similarities
- nonzero-pattern digraph and irreducibility
- CSV / JSON parsers and a canonical JSON form with digest
"""

import csv
import hashlib
import io
import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import sparse
from scipy.sparse import csgraph

# Configuration
DEFAULT_ZERO_TOL = 0.0
MAX_DIMENSION = 50
SIGNIFICANT_DIGITS = 12
DECIMAL = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?", re.ASCII)

Matrix = NDArray[np.float64]


class MatrixAnalysisError(Exception):
    """Base class for every error raised by the analyzer."""


class DimensionMismatch(MatrixAnalysisError):
    pass


class MatrixParseError(MatrixAnalysisError):
    pass


def as_matrix(data: ArrayLike) -> Matrix:
    """Validate a square finite real matrix and return a read-only copy."""
    a = np.array(data, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"matrix must be square, got shape {a.shape}")
    if a.shape[0] < 1:
        raise DimensionMismatch("matrix must have at least one row")
    if not np.all(np.isfinite(a)):
        raise DimensionMismatch("matrix contains NaN or infinite entries")
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SignatureMatrix:
    """Diagonal matrix D with d_ii = signs[i] in {+1, -1}; D^-1 = D."""

    signs: tuple[int, ...]

    def __post_init__(self):
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError(f"signature entries must be +1 or -1: {self.signs}")

    @property
    def n(self) -> int:
        return len(self.signs)

    @classmethod
    def identity(cls, n: int) -> "SignatureMatrix":
        return cls((1,) * n)

    @classmethod
    def from_members(cls, n: int, members) -> "SignatureMatrix":
        """d_ii = -1 exactly for the (1-based) indices in members."""
        chosen = set(members)
        return cls(tuple(-1 if i in chosen else 1 for i in range(1, n + 1)))

    def inverse(self) -> "SignatureMatrix":
        return self

    def matrix(self) -> Matrix:
        return np.diag(np.array(self.signs, dtype=np.float64))


@dataclass(frozen=True)
class Permutation:
    """Permutation theta of {1..n}; image[i-1] = theta(i)."""

    image: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.image) != list(range(1, len(self.image) + 1)):
            raise ValueError(f"not a permutation of 1..{len(self.image)}: {self.image}")

    @property
    def n(self) -> int:
        return len(self.image)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    def __call__(self, i: int) -> int:
        return self.image[i - 1]

    def position(self, i: int) -> int:
        """theta^-1(i)."""
        return self.image.index(i) + 1

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for k, target in enumerate(self.image, start=1):
            inv[target - 1] = k
        return Permutation(tuple(inv))

    def matrix(self) -> Matrix:
        """Q_theta with Q_theta e_i = e_theta(i)."""
        q = np.zeros((self.n, self.n))
        for i, target in enumerate(self.image):
            q[target - 1, i] = 1.0
        return q

    def to_json(self) -> list[int]:
        return list(self.image)


def _check_envelope(a: Matrix) -> Matrix:
    if a.shape[0] > MAX_DIMENSION:
        raise MatrixParseError(f"n = {a.shape[0]} exceeds the supported {MAX_DIMENSION}")
    return a


def _check_dimension(a: Matrix, n: int):
    if a.shape[0] != n:
        raise DimensionMismatch(f"matrix is {a.shape[0]}x{a.shape[0]}, operator has n = {n}")


def conjugate_signature(a: ArrayLike, d: SignatureMatrix) -> Matrix:
    """D A D^-1: entry (i,j) becomes signs[i]*signs[j]*a_ij."""
    a = as_matrix(a)
    _check_dimension(a, d.n)
    s = np.array(d.signs, dtype=np.float64)
    return as_matrix(s[:, None] * a * s[None, :])


def conjugate_permutation(a: ArrayLike, theta: Permutation) -> Matrix:
    """Q_theta^T A Q_theta, i.e. p_ij = a_{theta(i) theta(j)}."""
    a = as_matrix(a)
    _check_dimension(a, theta.n)
    idx = np.array(theta.image) - 1
    return as_matrix(a[np.ix_(idx, idx)])


def pattern(a: ArrayLike, zero_tol: float = DEFAULT_ZERO_TOL) -> NDArray[np.bool_]:
    """Adjacency of the digraph with an edge i -> j whenever |a_ij| > zero_tol."""
    return np.abs(as_matrix(a)) > zero_tol


def is_irreducible(a: ArrayLike, zero_tol: float = DEFAULT_ZERO_TOL) -> bool:
    """
    True iff the nonzero-pattern digraph is strongly connected.

    A 1x1 matrix counts as irreducible whatever its entry.
    """
    adj = pattern(a, zero_tol)
    if adj.shape[0] == 1:
        return True
    num_scc, _ = csgraph.connected_components(
        sparse.csr_matrix(adj), directed=True, connection="strong"
    )
    return num_scc == 1


def max_entry_distance(a: ArrayLike, b: ArrayLike) -> float:
    return float(np.max(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))))


# =============================================================================
# Input / output
# =============================================================================

def round_float(x: float) -> float:
    """Round to the report precision (12 significant digits)."""
    return float(f"{float(x):.{SIGNIFICANT_DIGITS}g}")


def parse_csv(text: str) -> Matrix:
    """Parse rows of comma-separated decimals (decimal point only)."""
    rows = []
    for line_no, row in enumerate(csv.reader(io.StringIO(text.removeprefix("\ufeff"))), start=1):
        cells = [c.strip() for c in row]
        if not any(cells):
            continue
        bad = [c for c in cells if not DECIMAL.fullmatch(c)]
        if bad:
            raise MatrixParseError(f"line {line_no}: {bad[0]!r} is not a decimal number")
        rows.append([float(c) for c in cells])
    if not rows:
        raise MatrixParseError("no rows found")
    widths = {len(r) for r in rows}
    if widths != {len(rows)}:
        raise MatrixParseError(
            f"expected a square matrix, got {len(rows)} rows with widths {sorted(widths)}"
            " (decimal commas are not accepted)"
        )
    try:
        return _check_envelope(as_matrix(rows))
    except DimensionMismatch as e:
        raise MatrixParseError(str(e)) from e


def parse_json(text: str) -> Matrix:
    """Parse {"n": int, "entries": [[...], ...]}."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise MatrixParseError(f"invalid JSON: {e}") from e
    if not isinstance(data, dict) or "entries" not in data:
        raise MatrixParseError('expected an object with "n" and "entries"')
    entries = data["entries"]
    if not isinstance(entries, list) or not all(isinstance(row, list) for row in entries):
        raise MatrixParseError('"entries" must be a list of rows')
    n = data.get("n", len(entries))
    if not isinstance(n, int) or len(entries) != n or any(len(row) != n for row in entries):
        raise MatrixParseError(f'"entries" is not an {n}x{n} array')
    try:
        return _check_envelope(as_matrix(entries))
    except (DimensionMismatch, TypeError, ValueError) as e:
        raise MatrixParseError(str(e)) from e


def load_matrix(path: str | Path, fmt: str | None = None) -> Matrix:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8-sig")
    except OSError as e:
        raise MatrixParseError(f"cannot read {path}: {e}") from e
    if fmt is None:
        fmt = "json" if path.suffix.lower() == ".json" else "csv"
    if fmt == "json":
        return parse_json(text)
    return parse_csv(text)


def matrix_to_json(a: ArrayLike) -> dict:
    a = as_matrix(a)
    return {
        "n": int(a.shape[0]),
        "entries": [[round_float(x) for x in row] for row in a],
    }


def matrix_digest(a: ArrayLike) -> str:
    """SHA-256 of the canonical JSON form (full precision)."""
    a = as_matrix(a)
    canonical = json.dumps(
        {"n": int(a.shape[0]), "entries": [[repr(float(x)) for x in row] for row in a]},
        separators=(",", ":"),
    )
    return hashlib.sha256(canonical.encode()).hexdigest()
