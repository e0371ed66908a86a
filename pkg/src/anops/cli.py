"""File-based front end: classify, decompose, witness, verify, spectrum.

Exit codes: 0 success, 1 invalid spec or usage, 2 verification failure.
JSON reports always carry the keys (kind, verdict, alpha, reason,
conditions, witness, checks) in that order, with rationals rendered as
``p/q`` strings; rendering is deterministic so emitted JSON round-trips
byte-identically through ``json.loads`` / ``json.dumps``.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

import numpy as np

from . import numlab
from .classify import (
    CompositeOperator,
    CoordinateWitness,
    InfinitelyManyBelowAlpha,
    IsAN,
    MixedPairsWitness,
    MultipleEssentialPoints,
    NotAN,
    an_certificate,
    classify_an,
)
from .errors import (
    InvalidSpec,
    NoConvergence,
    NotApplicable,
    NotPositive,
    PredictionMismatch,
    RankDeficient,
)
from .rationals import format_rational
from .seqmodel import FiniteBelow, SequenceSpec
from .shiftapp import FiniteSpectrumBranch, WeightedShift, classify_shift
from .specfile import parse_spec

__all__ = ["main"]

DEFAULT_SIZES = (10, 50, 200)
WITNESS_CAP = 50


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # the contract reserves exit code 2 for verification failures, so
    # usage problems must not go through argparse's default exit(2)
    def error(self, message):
        raise _UsageError(message)


def _parse_sizes(text: str) -> list[int]:
    try:
        sizes = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list: {text!r}")
    if not sizes or min(sizes) < 1:
        raise argparse.ArgumentTypeError(f"bad size list: {text!r}")
    return sizes


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="anops", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="decide norm attainment on all subspaces")
    p.add_argument("file")
    p.add_argument("--json", action="store_true", dest="as_json")

    p = sub.add_parser("decompose", help="print the alpha*I + K+ + F split")
    p.add_argument("file")
    p.add_argument("--entries", type=int, default=20)

    p = sub.add_parser("witness", help="print the non-attainment witness")
    p.add_argument("file")
    p.add_argument("--pairs", type=int, default=10)

    p = sub.add_parser("verify", help="run the numeric verification suite")
    p.add_argument("file")
    p.add_argument("--sizes", type=_parse_sizes, default=list(DEFAULT_SIZES))
    p.add_argument("--tol", type=float, default=numlab.DEFAULT_TOL)

    p = sub.add_parser("spectrum", help="truncated eigenvalues and spectral summary")
    p.add_argument("file")
    p.add_argument("--truncate", type=int, required=True)
    p.add_argument("--csv", dest="csv_path", default=None)
    return parser


# ---------------------------------------------------------------------------
# report rendering


def _rat(value: Fraction) -> str:
    return format_rational(value)


def _sorted_rats(values) -> list[str]:
    return [_rat(v) for v in sorted(values)]


def _report(kind, verdict, alpha, reason, conditions, witness, checks) -> dict:
    return {
        "kind": kind,
        "verdict": verdict,
        "alpha": alpha,
        "reason": reason,
        "conditions": conditions,
        "witness": witness,
        "checks": checks,
    }


def _reason_json(reason):
    if isinstance(reason, MultipleEssentialPoints):
        return {
            "type": "multiple_essential_points",
            "points": _sorted_rats(reason.points),
        }
    return {
        "type": "infinitely_many_below_alpha",
        "alpha": _rat(reason.alpha),
        "strand_index": reason.strand_index,
    }


def _witness_json(witness):
    if isinstance(witness, CoordinateWitness):
        return {
            "type": "coordinate",
            "strand_index": witness.strand_index,
            "excluded_indices": sorted(witness.excluded_indices),
            "sup": _rat(witness.sup),
        }
    return {
        "type": "mixed_pairs",
        "low_strand": witness.low_strand,
        "top_strand": witness.top_strand,
        "low": _rat(witness.low),
        "sup": _rat(witness.sup),
    }


def _conditions_json(branch) -> dict:
    if isinstance(branch, FiniteSpectrumBranch):
        return {
            "branch": "finite_spectrum",
            "i_prime": branch.i_prime,
            "ii_prime": branch.ii_prime,
            "sigma": _sorted_rats(branch.sigma),
            "infinite_multiplicity_values": _sorted_rats(
                branch.infinite_multiplicity_values
            ),
        }
    return {
        "branch": "infinite_spectrum",
        "i": branch.i,
        "ii": branch.ii,
        "iii": branch.iii,
        "alpha": _rat(branch.alpha),
        "violating_values": _sorted_rats(branch.violating_values),
        "below_alpha_indices": (
            "infinite"
            if branch.below_alpha_indices is None
            else list(branch.below_alpha_indices)
        ),
    }


def _certificate_json(certificate) -> dict:
    return {
        "certificate": {
            "rank_f": certificate.rank_f,
            "min_eigenvalue_per_size": {
                str(n): certificate.min_eigenvalue_per_size[n]
                for n in sorted(certificate.min_eigenvalue_per_size)
            },
        }
    }


def _verdict_alpha(verdict) -> str | None:
    if isinstance(verdict, IsAN):
        return _rat(verdict.alpha)
    if isinstance(verdict.reason, InfinitelyManyBelowAlpha):
        return _rat(verdict.reason.alpha)
    return None


def _print_branch(branch):
    if isinstance(branch, FiniteSpectrumBranch):
        print(f"  (i')  sigma(|T|) is a finite set: {_yn(branch.i_prime)} "
              f"{{{', '.join(_sorted_rats(branch.sigma))}}}")
        print(f"  (ii') single infinitely repeated value: {_yn(branch.ii_prime)} "
              f"{{{', '.join(_sorted_rats(branch.infinite_multiplicity_values))}}}")
        return
    print(f"  (i)   unique limit point alpha: {_yn(branch.i)} (alpha = {_rat(branch.alpha)})")
    violating = ", ".join(_sorted_rats(branch.violating_values)) or "none"
    print(f"  (ii)  no other infinitely repeated value: {_yn(branch.ii)} "
          f"(violating values: {violating})")
    if branch.below_alpha_indices is None:
        detail = "infinitely many"
    else:
        detail = f"indices {list(branch.below_alpha_indices)}" if branch.below_alpha_indices else "none"
    print(f"  (iii) finitely many weights below alpha: {_yn(branch.iii)} ({detail})")


def _yn(flag: bool) -> str:
    return "yes" if flag else "no"


def _describe_reason(reason) -> str:
    if isinstance(reason, MultipleEssentialPoints):
        return ("multiple essential-spectrum points: "
                + ", ".join(_sorted_rats(reason.points)))
    return (f"infinitely many spectrum elements below alpha = {_rat(reason.alpha)} "
            f"(strand {reason.strand_index})")


def _describe_witness(witness) -> str:
    if isinstance(witness, CoordinateWitness):
        excluded = sorted(witness.excluded_indices)
        tail = f", excluding indices {excluded}" if excluded else ""
        return (f"coordinate witness on strand {witness.strand_index}{tail}; "
                f"sup = {_rat(witness.sup)} (not attained)")
    return (f"mixed-pairs witness between strands {witness.low_strand} "
            f"(limit {_rat(witness.low)}) and {witness.top_strand} "
            f"(limit {_rat(witness.sup)}); sup = {_rat(witness.sup)} (not attained)")


# ---------------------------------------------------------------------------
# commands


def _cmd_classify(args) -> int:
    model = parse_spec(args.file)
    if isinstance(model, CompositeOperator):
        return _classify_composite(model, args.as_json)
    if isinstance(model, WeightedShift):
        condition_report, verdict = classify_shift(model)
        conditions = _conditions_json(condition_report.branch)
        kind = "shift"
    else:
        verdict = classify_an(model)
        condition_report = None
        conditions = None
        kind = "diagonal"
    report = _report(
        kind,
        verdict.is_an,
        _verdict_alpha(verdict),
        None if isinstance(verdict, IsAN) else _reason_json(verdict.reason),
        conditions,
        None if isinstance(verdict, IsAN) else _witness_json(verdict.witness),
        None,
    )
    if args.as_json:
        print(json.dumps(report, indent=2))
        return 0
    headline = f"AN: {_yn(verdict.is_an)}"
    alpha = _verdict_alpha(verdict)
    if alpha is not None:
        headline += f", alpha = {alpha}"
    if condition_report is not None:
        branch_tag = (
            "(i')(ii')"
            if isinstance(condition_report.branch, FiniteSpectrumBranch)
            else "(i)(ii)(iii)"
        )
        headline += f", branch {branch_tag}"
    print(headline)
    if condition_report is not None:
        _print_branch(condition_report.branch)
    if isinstance(verdict, NotAN):
        print(f"reason: {_describe_reason(verdict.reason)}")
        print(f"witness: {_describe_witness(verdict.witness)}")
    else:
        support = sorted(verdict.decomposition.f_entries)
        if support:
            pairs = ", ".join(
                f"{n} -> {_rat(verdict.decomposition.f_entries[n])}" for n in support
            )
            print(f"F entries: {pairs}")
        else:
            print("F entries: none (empty sum)")
    return 0


def _classify_composite(op: CompositeOperator, as_json: bool) -> int:
    try:
        certificate = an_certificate(op, DEFAULT_SIZES)
    except NotPositive as exc:
        report = _report(
            "composite",
            None,
            None,
            {"type": "not_positive", "min_eigenvalue": exc.eigenvalue, "size": exc.size},
            None,
            None,
            None,
        )
        if as_json:
            print(json.dumps(report, indent=2))
        else:
            print(f"AN: undetermined, certificate withheld: {exc}")
        return 2
    report = _report(
        "composite",
        True,
        _rat(op.alpha),
        None,
        _certificate_json(certificate),
        None,
        None,
    )
    if as_json:
        print(json.dumps(report, indent=2))
        return 0
    print(f"AN: yes, alpha = {_rat(op.alpha)} (positivity certified)")
    print(f"rank F = {certificate.rank_f}")
    for n in sorted(certificate.min_eigenvalue_per_size):
        print(f"  min eigenvalue at size {n}: {certificate.min_eigenvalue_per_size[n]:.12g}")
    return 0


def _diagonal_of(model) -> SequenceSpec:
    return model.modulus() if isinstance(model, WeightedShift) else model


def _cmd_decompose(args) -> int:
    model = parse_spec(args.file)
    if isinstance(model, CompositeOperator):
        raise NotApplicable("decompose applies to diagonal and shift specs")
    seq = _diagonal_of(model)
    verdict = classify_an(seq)
    if isinstance(verdict, NotAN):
        raise NotApplicable(
            "operator does not attain its norm on every subspace: "
            + _describe_reason(verdict.reason)
        )
    decomposition = verdict.decomposition
    print(f"alpha = {_rat(decomposition.alpha)}")
    support = sorted(decomposition.f_entries)
    if support:
        print("F (finite, strictly negative):")
        for n in support:
            print(f"  {n} -> {_rat(decomposition.f_entries[n])}")
    else:
        print("F: zero (no entries below alpha)")
    count = max(1, args.entries)
    values = ", ".join(_rat(decomposition.kplus(n)) for n in range(1, count + 1))
    print(f"K+ entries 1..{count}: {values}")
    return 0


def _cmd_witness(args) -> int:
    model = parse_spec(args.file)
    if isinstance(model, CompositeOperator):
        raise NotApplicable("witness applies to diagonal and shift specs")
    seq = _diagonal_of(model)
    verdict = classify_an(seq)
    if isinstance(verdict, IsAN):
        raise NotApplicable("operator attains its norm on every subspace; no witness")
    witness = verdict.witness
    count = max(1, args.pairs)
    print(_describe_witness(witness))
    if isinstance(witness, CoordinateWitness):
        indices = witness.indices(count)
        print(f"coordinate indices: {indices}")
    else:
        print("pairs (k, low index, top index, mu_k):")
        for k, a_idx, b_idx, _v, _u, mu, _t in witness.pair_table(count):
            print(f"  {k}: ({a_idx}, {b_idx}) mu = {_rat(mu)}")
    norms = ", ".join(_rat(v) for v in witness.predicted_norms(count))
    print(f"predicted restricted norms: {norms}")
    print(f"sup = {_rat(witness.sup)} (not attained)")
    return 0


def _fit_witness_m(witness, n: int, cap: int = WITNESS_CAP) -> int:
    if isinstance(witness, CoordinateWitness):
        count = 0
        for idx in witness.seq.strand_indices(witness.strand_index):
            if idx > n or count >= cap:
                break
            count += 1
        return count
    count = 0
    for _k, a_idx, b_idx, *_rest in witness.pair_table(cap):
        if max(a_idx, b_idx) > n:
            break
        count += 1
    return count


def _check(name, size, ok, detail) -> dict:
    return {"name": name, "size": size, "ok": bool(ok), "detail": detail}


def _verify_sequence(seq: SequenceSpec, sizes, tol) -> list[dict]:
    checks = []
    verdict = classify_an(seq)
    if isinstance(verdict, IsAN):
        d = verdict.decomposition
        n_max = min(1000, max(sizes))
        bad = [
            n
            for n in range(1, n_max + 1)
            if d.alpha + d.kplus(n) + d.f(n) != seq.entry(n) or d.kplus(n) < 0
        ]
        checks.append(
            _check(
                "decomposition_identity",
                None,
                not bad,
                f"exact for n <= {n_max}" if not bad else f"fails at n = {bad[0]}",
            )
        )
    for n in sizes:
        truncation = numlab.truncate_diagonal(seq, n)
        eigenvalues, _ = numlab.jacobi_eigenvalues(truncation)
        expected = np.sort([float(v) for v in seq.entries(n)])
        gap = float(np.max(np.abs(eigenvalues - expected)))
        checks.append(
            _check(
                "truncated_eigenvalues",
                n,
                gap <= 1e-12,
                f"max deviation {gap:.3e}",
            )
        )
        if isinstance(verdict, NotAN):
            m = _fit_witness_m(verdict.witness, n)
            if m < 1:
                checks.append(
                    _check("witness_escape", n, True, "skipped: truncation too small")
                )
                continue
            try:
                outcome = numlab.verify_witness_numeric(seq, verdict.witness, m, n, tol)
            except (PredictionMismatch, RankDeficient) as exc:
                checks.append(_check("witness_escape", n, False, str(exc)))
                continue
            ok = outcome.strictly_increasing and outcome.below_sup
            checks.append(
                _check(
                    "witness_escape",
                    n,
                    ok,
                    f"m = {m}, max prediction error {outcome.max_prediction_error:.3e}",
                )
            )
    return checks


def _verify_shift(shift: WeightedShift, sizes, tol) -> list[dict]:
    checks = _verify_sequence(shift.modulus(), sizes, tol)
    for n in sizes:
        if n < 2:
            checks.append(
                _check("modulus_identity", n, True, "skipped: size too small")
            )
            continue
        _t, tt = numlab.truncate_shift(shift, n)
        root = numlab.matrix_sqrt(tt, tol)
        expected = np.diag(
            [float(shift.moduli.entry(k)) for k in range(1, n)] + [0.0]
        )
        gap = float(np.max(np.abs(root - expected)))
        checks.append(
            _check("modulus_identity", n, gap <= 1e-10, f"max deviation {gap:.3e}")
        )
    return checks


def _verify_composite(op: CompositeOperator, sizes, tol) -> list[dict]:
    checks = []
    try:
        certificate = an_certificate(op, sizes, tol)
    except NotPositive as exc:
        checks.append(_check("positivity_certificate", exc.size, False, str(exc)))
        return checks
    checks.append(
        _check(
            "positivity_certificate",
            None,
            True,
            f"rank F = {certificate.rank_f}",
        )
    )
    for n in sizes:
        count = numlab.spectral_count_below(
            numlab.truncate_composite(op, n), float(op.alpha), tol
        )
        checks.append(
            _check(
                "eigencount_below_alpha",
                n,
                count <= certificate.rank_f,
                f"{count} eigenvalue(s) below alpha - tol, rank F = {certificate.rank_f}",
            )
        )
    return checks


def _cmd_verify(args) -> int:
    model = parse_spec(args.file)
    sizes = sorted(set(args.sizes))
    if isinstance(model, CompositeOperator):
        checks = _verify_composite(model, sizes, args.tol)
    elif isinstance(model, WeightedShift):
        checks = _verify_shift(model, sizes, args.tol)
    else:
        checks = _verify_sequence(model, sizes, args.tol)
    failed = [c for c in checks if not c["ok"]]
    for c in checks:
        status = "ok " if c["ok"] else "FAIL"
        where = f" (size={c['size']})" if c["size"] is not None else ""
        print(f"[{status}] {c['name']}{where}: {c['detail']}")
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return 2 if failed else 0


def _cmd_spectrum(args) -> int:
    model = parse_spec(args.file)
    n = args.truncate
    if n < 1:
        raise _UsageError("--truncate must be >= 1")
    if isinstance(model, CompositeOperator):
        matrix = numlab.truncate_composite(model, n)
        essential = frozenset({model.alpha})
        eigenvalues, _ = numlab.jacobi_eigenvalues(matrix)
        count = numlab.spectral_count_below(matrix, float(model.alpha))
        below_line = (
            f"eigenvalues below alpha = {_rat(model.alpha)} (numeric): {count}"
        )
    else:
        seq = _diagonal_of(model)
        eigenvalues, _ = numlab.jacobi_eigenvalues(numlab.truncate_diagonal(seq, n))
        essential = seq.essential_spectrum()
        top = max(essential)
        below = seq.spectrum_elements_below(top)
        if isinstance(below, FiniteBelow):
            listed = ", ".join(_sorted_rats(below.values)) or "none"
            below_line = f"spectrum elements below {_rat(top)}: {listed}"
        else:
            below_line = (
                f"spectrum elements below {_rat(top)}: infinitely many "
                f"(strand {below.strand_index})"
            )
    shown = ", ".join(f"{v:.10g}" for v in eigenvalues[: min(12, len(eigenvalues))])
    suffix = ", ..." if len(eigenvalues) > 12 else ""
    print(f"truncation size {n}; eigenvalues ascending: {shown}{suffix}")
    print(f"essential spectrum: {{{', '.join(_sorted_rats(essential))}}}")
    print(below_line)
    if args.csv_path:
        with open(args.csv_path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["index", "eigenvalue"])
            for i, value in enumerate(eigenvalues, start=1):
                writer.writerow([i, repr(float(value))])
        print(f"wrote {len(eigenvalues)} eigenvalues to {args.csv_path}")
    return 0


_COMMANDS = {
    "classify": _cmd_classify,
    "decompose": _cmd_decompose,
    "witness": _cmd_witness,
    "verify": _cmd_verify,
    "spectrum": _cmd_spectrum,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"anops: error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"anops: error: {exc}", file=sys.stderr)
        return 1
    except (InvalidSpec, NotApplicable) as exc:
        print(f"anops: error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"anops: error: {exc}", file=sys.stderr)
        return 1
    except (NoConvergence, PredictionMismatch, RankDeficient) as exc:
        print(f"anops: verification failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
