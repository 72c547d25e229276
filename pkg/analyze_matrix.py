#!/usr/bin/env python3
"""
Analyze a matrix for J-sign-symmetry of itself and its second compound.

Reads a square matrix (CSV rows or {"n", "entries"} JSON), detects the
sign partitions of A and A^(2), builds the order relation W-hat, computes
the spectrum and classifies it. Optionally builds a certified sequence of
strictly J-sign-symmetric approximants.

The JSON report goes to --out (or standard output); the human-readable
trace goes to standard error.

Usage:
    python analyze_matrix.py --in fixtures/weak3.csv
    python analyze_matrix.py --in fixtures/cyclic_shift.json --trace
    python analyze_matrix.py --in fixtures/weak3.csv --approx --out report.json
    python analyze_matrix.py --enumerate 3

Exit codes: 0 success, 2 parse error, 3 solver failure, 4 bad flags.
"""

import argparse
import json
import sys
import warnings
from math import comb
from pathlib import Path

from approx import CertificationFailed, PreconditionFailed, approximate_jss
from compound import second_compound
from matrix_core import (
    DimensionMismatch,
    MatrixAnalysisError,
    MatrixParseError,
    load_matrix,
    matrix_digest,
    matrix_to_json,
)
from order_relation import (
    EnumerationTooLarge,
    PairIndexer,
    enumerate_relations,
    find_transitive_w_hat,
    is_transitive,
    permutation_from_w,
)
from signsym import (
    DEFAULT_RELATIVE_BAND,
    NegativeDiagonal,
    SignConflict,
    ZeroEntry,
    detect_strict,
    detect_weak,
    relative_band,
)
from spectral import ConvergenceFailure, MethodDisagreement, classify, eigenvalues

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_SOLVER = 3
EXIT_FLAGS = 4


def log(*args):
    print(*args, file=sys.stderr)


class ArgumentParser(argparse.ArgumentParser):
    """argparse with bad flags reported as exit status 4."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FLAGS, f"{self.prog}: error: {message}\n")


def inapplicable(reason: str) -> dict:
    return {"inapplicable": reason}


# =============================================================================
# Report sections
# =============================================================================

def analyze_signs(a, zero_tol: float):
    """
    Strict detection first, weak detection as fallback.

    Returns (partition or None, JSON section).
    """
    try:
        j = detect_strict(a, zero_tol)
        return j, j.to_json()
    except (ZeroEntry, SignConflict, NegativeDiagonal):
        pass
    try:
        j = detect_weak(a, zero_tol)
        return j, j.to_json()
    except (SignConflict, NegativeDiagonal) as e:
        return None, inapplicable(f"not J-sign-symmetric: {e}")


def enumeration_counts(n: int) -> dict:
    total = transitive = 0
    for w in enumerate_relations(n):
        total += 1
        transitive += is_transitive(w)
    return {"n": n, "relations": total, "transitive": transitive}


def build_report(a, rel_band: float, run_approx: bool, trace: bool) -> tuple[dict, int]:
    """Run the full pipeline on A; returns the report and the exit status."""
    n = a.shape[0]
    report = {
        "schema": SCHEMA_VERSION,
        "input_digest": matrix_digest(a),
        "matrix": matrix_to_json(a),
    }

    log(f"\n2. Sign analysis (n = {n})...")
    j, section_a = analyze_signs(a, 0.0)
    if j is None:
        log(f"   A: {section_a['inapplicable']}")
    else:
        kind = "strictly" if j.strict else "weakly"
        log(f"   A is {kind} J-sign-symmetric, J = {{{', '.join(map(str, j.members))}}}")
        if trace:
            log(f"   constraint components: {len(j.components)}, alternatives: {j.alternatives_count}")

    if n < 2:
        j_tilde, section_c = None, inapplicable("n < 2, there is no second compound")
    else:
        c = second_compound(a)
        band = relative_band(c, rel_band)
        j_tilde, section_c = analyze_signs(c, band)
        section_c = {**section_c, "matrix": matrix_to_json(c)}
        if j_tilde is None:
            log(f"   A^(2): {section_c['inapplicable']}")
        else:
            kind = "strictly" if j_tilde.strict else "weakly"
            log(f"   A^(2) is {kind} J-sign-symmetric, J~ = {{{', '.join(map(str, j_tilde.members))}}}")
            if trace:
                log(f"   zero band for A^(2): {band:.3g}")
    report["sign_analysis"] = {"matrix": section_a, "compound": section_c}

    log("\n3. Order relation...")
    if j is None or j_tilde is None:
        report["relation"] = inapplicable("needs J-sign-symmetric A and A^(2)")
        report["permutation"] = inapplicable("needs J-sign-symmetric A and A^(2)")
        log("   skipped")
    else:
        w, _, _ = find_transitive_w_hat(j, j_tilde, PairIndexer(n))
        transitive = is_transitive(w)
        report["relation"] = {"pairs": w.to_json(), "transitive": transitive, "grid": w.grid()}
        log(f"   W-hat = {w.pairs()} ({'transitive' if transitive else 'not transitive'})")
        for line in w.grid():
            log(f"      {line}")
        if transitive:
            theta = permutation_from_w(w)
            report["permutation"] = theta.to_json()
            log(f"   order: {' < '.join(map(str, theta.image))}")
        else:
            report["permutation"] = inapplicable("W-hat is not transitive")

    log("\n4. Spectrum...")
    spectrum = eigenvalues(a)
    report["spectrum"] = spectrum.to_json()
    log(f"   rho = {spectrum.rho:.6g}, peripheral count = {spectrum.h}, {spectrum.sweeps} QR sweeps")

    log("\n5. Classification...")
    result = classify(a, rel_band)
    report["classification"] = result.to_json()
    log(f"   {result.case.value}")
    if result.lambda1 is not None:
        log(f"   lambda1 = {result.lambda1:.6g}")
    if result.lambda2 is not None:
        log(f"   lambda2 = {result.lambda2:.6g}")
    if trace:
        for line in result.witness:
            log(f"   - {line}")

    status = EXIT_OK
    if not run_approx:
        report["approx"] = inapplicable("not requested (--approx)")
    else:
        log("\n6. Approximating sequence...")
        try:
            sequence = approximate_jss(a, rel_band=rel_band)
        except (PreconditionFailed, SignConflict, NegativeDiagonal) as e:
            report["approx"] = inapplicable(str(e))
            log(f"   inapplicable: {e}")
        except CertificationFailed as e:
            report["approx"] = {
                "certification_failed": str(e),
                "rejected": [s.to_json() for s in e.rejected],
            }
            log(f"   CERTIFICATION FAILED: {e}")
            status = EXIT_SOLVER
        else:
            report["approx"] = sequence.to_json()
            log(f"   {'epsilon':>12}  {'distance':>12}  certificate")
            for step in sequence.steps:
                log(f"   {step.epsilon:12.6g}  {step.distance:12.6g}  strict A and A^(2)"
                    f"{' (rank repair)' if step.repaired else ''}")
            if sequence.rejected:
                log(f"   stopped: {sequence.rejected[-1].reason} at epsilon = {sequence.rejected[-1].epsilon:.6g}")
            log(f"   converged to {sequence.converged_norm:.3g} in the max-entry norm")

    return report, status


# =============================================================================
# Main
# =============================================================================

def main(argv=None) -> int:
    parser = ArgumentParser(
        description="Analyze J-sign-symmetry and the spectrum of a matrix and its second compound",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s --in fixtures/weak3.csv
  %(prog)s --in fixtures/cyclic_shift.json --trace
  %(prog)s --in fixtures/weak3.csv --approx --out report.json
  %(prog)s --enumerate 3
        """
    )
    parser.add_argument('--in', dest='input', help='Matrix file (CSV rows or JSON)')
    parser.add_argument('--format', choices=['csv', 'json'],
                        help='Input format (default: from the file extension, else csv)')
    parser.add_argument('--out', help='Write the JSON report here instead of standard output')
    parser.add_argument('--approx', action='store_true',
                        help='Also build a certified approximating sequence')
    parser.add_argument('--enumerate', type=int, metavar='N',
                        help='Count relation sets and transitive ones on 1..N')
    parser.add_argument('--tol', type=float, default=DEFAULT_RELATIVE_BAND,
                        help=f'Relative zero band for computed matrices (default: {DEFAULT_RELATIVE_BAND:g})')
    parser.add_argument('--trace', action='store_true',
                        help='Print every checked precondition')

    args = parser.parse_args(argv)
    if args.input is None and args.enumerate is None:
        parser.error("one of --in or --enumerate is required")
    if args.tol < 0:
        parser.error("--tol must be nonnegative")
    if args.enumerate is not None and args.enumerate < 1:
        parser.error("--enumerate needs N >= 1")

    log("=" * 60)
    log("J-Sign-Symmetric Matrix Analyzer")
    log("=" * 60)

    enumeration = None
    if args.enumerate is not None:
        try:
            enumeration = enumeration_counts(args.enumerate)
        except EnumerationTooLarge as e:
            parser.error(str(e))
        log(f"\nRelation sets on 1..{args.enumerate}: {enumeration['relations']}"
            f" (2^{comb(args.enumerate, 2)}), transitive: {enumeration['transitive']}")

    if args.input is None:
        report, status = {"schema": SCHEMA_VERSION, "enumeration": enumeration}, EXIT_OK
    else:
        log(f"\n1. Reading {args.input}...")
        try:
            a = load_matrix(args.input, args.format)
        except (MatrixParseError, DimensionMismatch) as e:
            log(f"   ERROR: {e}")
            return EXIT_PARSE
        log(f"   {a.shape[0]}x{a.shape[0]} matrix, digest {matrix_digest(a)[:12]}")

        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            try:
                report, status = build_report(a, args.tol, args.approx, args.trace)
            except (ConvergenceFailure, MethodDisagreement) as e:
                log(f"   SOLVER FAILURE: {e}")
                return EXIT_SOLVER
            except MatrixAnalysisError as e:
                log(f"   ERROR: {e}")
                return EXIT_SOLVER
        for w in caught:
            log(f"   WARNING: {w.message}")
        if enumeration is not None:
            report["enumeration"] = enumeration

    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        log(f"\nReport written to {args.out}")
    else:
        sys.stdout.write(text)

    log("=" * 60)
    return status


if __name__ == "__main__":
    sys.exit(main())
