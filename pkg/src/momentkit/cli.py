"""Command line front end.

Subcommands wrap the library and emit deterministic reports (JSON by
default, ``--format human`` for plain text).  Exit codes: 0 success,
1 negative verdict, 2 usage or parse failure, 3 numerical failure.
The ``MOMENTKIT_PRECISION`` environment variable overrides the default
floating tolerance.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from typing import Optional, Tuple

from . import io
from .completion import COMPLETABLE, NOT_COMPLETABLE, complete_via_pullback, decide_completable
from .config import Settings, from_env
from .errors import (
    AtomAtZero,
    DegenerateCircle,
    EigenFailure,
    InsufficientTerms,
    MomentKitError,
    NegativeAtomEvenRoot,
    NotPositiveDefinite,
    NotPositiveInput,
    ParseError,
    PoleError,
    PrecisionLoss,
    QuadratureFailure,
    RealLambda,
    TooFewIndices,
)
from .generators import (
    exp_decay_sequence,
    geometric_sequence,
    hilbert_sequence,
    measure_sequence,
    stieltjes_wigert_sequence,
)
from .orthopoly import recurrence_coefficients
from .rational import format_complex, format_scalar, parse_complex
from .sequence_core import (
    PositivityVerdict,
    hamburger_test,
    hausdorff_test,
    stieltjes_test,
)
from .submoment import extract, mask_universal_check
from .weyl import circle_parametrization, determinacy_diagnostics, weyl_circle

OK, NEGATIVE, USAGE, NUMERICAL = 0, 1, 2, 3

_USAGE_ERRORS = (ParseError, InsufficientTerms, TooFewIndices, RealLambda, ValueError)
_NUMERICAL_ERRORS = (
    PrecisionLoss,
    EigenFailure,
    QuadratureFailure,
    DegenerateCircle,
    PoleError,
    NegativeAtomEvenRoot,
    AtomAtZero,
    NotPositiveDefinite,
    NotPositiveInput,
    OverflowError,
)


def _enc(value):
    if isinstance(value, Fraction):
        return format_scalar(value)
    if isinstance(value, complex):
        return format_complex(value)
    if isinstance(value, (list, tuple)):
        return [_enc(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _enc(v) for k, v in value.items()}
    return value


def _verdict_dict(v: PositivityVerdict) -> dict:
    out = {
        "kind": v.describe(),
        "positive": v.is_positive,
        "tested_up_to": v.tested_up_to,
        "exact": v.exact,
        "leading_minors": _enc(list(v.leading_minors)),
    }
    if v.rank is not None:
        out["rank"] = v.rank
        out["leading_rank_consistent"] = v.leading_rank_consistent
    if v.certificate is not None:
        out["certificate"] = {
            "order": v.certificate.order,
            "indices": list(v.certificate.indices),
            "value": _enc(v.certificate.value),
        }
    return out


def _input_digest(**paths) -> dict:
    return {
        name: {"path": str(path), "sha256": io.sha256_file(path)}
        for name, path in paths.items()
        if path is not None
    }


def _emit(report: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
        return
    for line in _human_lines(report, 0):
        print(line)


def _human_lines(obj, depth):
    pad = "  " * depth
    lines = []
    if isinstance(obj, dict):
        for key in sorted(obj):
            value = obj[key]
            if isinstance(value, (dict, list)):
                lines.append(f"{pad}{key}:")
                lines.extend(_human_lines(value, depth + 1))
            else:
                lines.append(f"{pad}{key}: {value}")
    elif isinstance(obj, list):
        for value in obj:
            if isinstance(value, (dict, list)):
                lines.append(f"{pad}-")
                lines.extend(_human_lines(value, depth + 1))
            else:
                lines.append(f"{pad}- {value}")
    else:
        lines.append(f"{pad}{obj}")
    return lines


def _parse_orders(text: str):
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        orders = list(range(int(lo), int(hi) + 1))
    elif "," in text:
        orders = [int(x) for x in text.split(",")]
    else:
        orders = [int(text)]
    if not orders or any(n < 1 for n in orders):
        raise ParseError(f"orders must be positive: {text!r}")
    return orders


# ---------------------------------------------------------------------------
# command handlers


def _cmd_analyze(args, settings: Settings) -> Tuple[dict, int]:
    seq = io.load_sequence(args.sequence)
    report = {
        "command": "analyze",
        "arguments": {"depth": args.depth, "test": args.test},
        "inputs": _input_digest(sequence=args.sequence),
        "float_tolerance": settings.float_tolerance,
        "warnings": [],
    }
    if args.test == "hamburger":
        verdict = hamburger_test(seq, args.depth, settings=settings)
        report["results"] = {"hamburger": _verdict_dict(verdict)}
        ok = verdict.is_positive
    elif args.test == "stieltjes":
        result = stieltjes_test(seq, args.depth, settings=settings)
        report["results"] = {
            "unshifted": _verdict_dict(result.unshifted),
            "shifted": _verdict_dict(result.shifted),
            "stieltjes_solvable": result.solvable,
        }
        ok = result.solvable
    else:
        n_max = args.n_max if args.n_max is not None else args.depth
        k_max = args.k_max if args.k_max is not None else args.depth
        result = hausdorff_test(seq, n_max, k_max, settings=settings)
        report["results"] = {
            "completely_monotonic": result.completely_monotonic,
            "first_violation": list(result.first_violation)
            if result.first_violation
            else None,
            "violation_value": _enc(result.violation_value),
            "exact": result.exact,
        }
        ok = result.completely_monotonic
    if not any(v.exact if hasattr(v, "exact") else True for v in []):
        pass
    report["status"] = "ok" if ok else "negative"
    return report, OK if ok else NEGATIVE


def _cmd_extract(args, settings: Settings) -> Tuple[dict, int]:
    seq = io.load_sequence(args.sequence)
    mask = io.load_mask(args.mask)
    sub = extract(seq, mask, args.count)
    report = {
        "command": "extract",
        "arguments": {"count": args.count, "check": args.check},
        "inputs": _input_digest(sequence=args.sequence, mask=args.mask),
        "float_tolerance": settings.float_tolerance,
        "warnings": [],
        "results": {
            "indices": [mask.index(k) for k in range(args.count)],
            "terms": _enc(list(sub.terms)),
        },
    }
    code = OK
    if args.check:
        universal = mask_universal_check(mask, args.cap)
        depth = (args.count - 1) // 2
        verdict = hamburger_test(sub, depth, settings=settings)
        report["results"]["universal"] = _universal_dict(universal)
        report["results"]["per_sequence"] = _verdict_dict(verdict)
        code = OK if verdict.is_positive else NEGATIVE
    report["status"] = "ok" if code == OK else "negative"
    return report, code


def _universal_dict(universal) -> dict:
    out = {
        "valid_for_all_positive_sequences": universal.valid,
        "checked_cap": universal.checked_cap,
    }
    if universal.note:
        out["note"] = universal.note
    if universal.witness is not None:
        w = universal.witness
        out["witness"] = {
            "condition": w.condition,
            "indices": list(w.indices),
            "polynomial": w.polynomial.text(),
            "coefficients": {
                str(i): _enc(c)
                for i, c in enumerate(w.polynomial.coeffs)
                if c != 0
            },
            "negative_at": _enc(w.point),
        }
    return out


def _cmd_mask_check(args, settings: Settings) -> Tuple[dict, int]:
    mask = io.load_mask(args.mask)
    universal = mask_universal_check(mask, args.cap)
    report = {
        "command": "mask-check",
        "arguments": {"cap": args.cap},
        "inputs": _input_digest(mask=args.mask),
        "float_tolerance": settings.float_tolerance,
        "warnings": [],
        "results": {"universal": _universal_dict(universal)},
        "status": "ok" if universal.valid else "negative",
    }
    return report, OK if universal.valid else NEGATIVE


def _cmd_weyl(args, settings: Settings) -> Tuple[dict, int]:
    seq = io.load_sequence(args.sequence)
    lam = parse_complex(args.lam)
    orders = _parse_orders(args.orders)
    coeffs = recurrence_coefficients(seq, max(orders) - 1, settings=settings)
    circles = []
    for n in orders:
        circle = weyl_circle(coeffs, lam, n)
        entry = {
            "order": n,
            "center": format_complex(circle.center),
            "radius": circle.radius,
        }
        if args.tau is not None:
            w = circle_parametrization(coeffs, lam, args.tau, n)
            entry["parametrized_point"] = format_complex(w)
            entry["on_circle_residual"] = abs(abs(w - circle.center) - circle.radius)
        circles.append(entry)
    radii = [c["radius"] for c in circles]
    report = {
        "command": "weyl",
        "arguments": {"lambda": args.lam, "orders": orders, "tau": args.tau},
        "inputs": _input_digest(sequence=args.sequence),
        "float_tolerance": settings.float_tolerance,
        "warnings": [],
        "results": {
            "circles": circles,
            "radii_strictly_decreasing": all(
                a > b for a, b in zip(radii, radii[1:])
            ),
        },
        "status": "ok",
    }
    return report, OK


def _cmd_determinacy(args, settings: Settings) -> Tuple[dict, int]:
    seq = io.load_sequence(args.sequence)
    probe = parse_complex(args.lam) if args.lam else 1j
    result = determinacy_diagnostics(
        seq, None, probe, n_max=args.depth, settings=settings
    )
    report = {
        "command": "determinacy",
        "arguments": {"depth": args.depth, "lambda": args.lam},
        "inputs": _input_digest(sequence=args.sequence),
        "float_tolerance": settings.float_tolerance,
        "warnings": [],
        "results": {
            "verdict": result.verdict,
            "rank": result.rank,
            "carleman_b_partial": list(result.carleman_b_partial),
            "carleman_s_partial": list(result.carleman_s_partial),
            "carleman_s_summands": list(result.carleman_s_summands),
            "radius_sequence": list(result.radius_sequence),
            "details": _enc(result.details),
        },
        "status": "ok",
    }
    return report, OK


def _cmd_complete(args, settings: Settings) -> Tuple[dict, int]:
    partial = io.load_partial(args.partial)
    result = complete_via_pullback(partial, args.target_depth, settings=settings)
    decision = result.decision
    results = {
        "status": result.status,
        "reason": decision.reason,
        "pattern": {
            "kind": decision.pattern.kind,
            "mask": {
                "d": decision.pattern.mask.d,
                "l0": decision.pattern.mask.l0,
            }
            if decision.pattern.mask
            else None,
            "witness_triple": list(decision.pattern.witness)
            if decision.pattern.witness
            else None,
        },
    }
    if decision.values_verdict is not None:
        results["values_verdict"] = _verdict_dict(decision.values_verdict)
    if decision.certificate is not None:
        results["certificate"] = {
            "order": decision.certificate.order,
            "indices": list(decision.certificate.indices),
            "value": _enc(decision.certificate.value),
        }
    code = OK
    if result.status == "completed":
        results["completed_terms"] = _enc(list(result.sequence.terms))
        results["certified_depth"] = result.certified_depth
        results["construction"] = {
            "sub_measure": _enc([list(a) for a in result.trace.sub_measure.atoms]),
            "pulled_measure": _enc(
                [list(a) for a in result.trace.pulled_measure.atoms]
            ),
            "slack_value": _enc(result.trace.slack_value),
            "exact": result.trace.exact,
        }
    elif result.status == NOT_COMPLETABLE:
        code = NEGATIVE
    report = {
        "command": "complete",
        "arguments": {"target_depth": args.target_depth},
        "inputs": _input_digest(partial=args.partial),
        "float_tolerance": settings.float_tolerance,
        "warnings": [],
        "results": results,
        "status": "ok" if code == OK else "negative",
    }
    return report, code


def _cmd_generate(args, settings: Settings) -> Tuple[dict, int]:
    family = args.family
    if family == "hilbert":
        seq = hilbert_sequence(args.count)
    elif family == "geometric":
        if args.ratio is None:
            raise ParseError("geometric needs --ratio")
        seq = geometric_sequence(args.ratio, args.count)
    elif family == "exp_decay":
        seq = exp_decay_sequence(args.count)
    elif family == "stieltjes_wigert":
        if args.q is None:
            raise ParseError("stieltjes_wigert needs --q")
        seq = stieltjes_wigert_sequence(args.q, args.count)
    elif family == "measure":
        if args.measure is None:
            raise ParseError("measure needs --measure FILE")
        seq = measure_sequence(io.load_measure(args.measure), args.count)
    else:
        raise ParseError(f"unknown family {family!r}")
    report = {
        "command": "generate",
        "arguments": {
            "family": family,
            "count": args.count,
            "ratio": args.ratio,
            "q": args.q,
        },
        "inputs": _input_digest(measure=args.measure),
        "float_tolerance": settings.float_tolerance,
        "warnings": [],
        "results": {"terms": _enc(list(seq.terms))},
        "status": "ok",
    }
    if args.output:
        io.dump_sequence(seq, args.output)
        report["results"]["written"] = str(args.output)
    return report, OK


# ---------------------------------------------------------------------------
# parser / dispatch


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="momentkit",
        description="Positivity, orthogonal polynomials, Weyl circles, "
        "sub-moment masks and Hankel completion for moment sequences.",
    )
    parser.add_argument(
        "--format", choices=("json", "human"), default="json", help="report format"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="positivity tests on a sequence file")
    p.add_argument("sequence")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument(
        "--test", choices=("hamburger", "stieltjes", "hausdorff"), default="hamburger"
    )
    p.add_argument("--n-max", type=int, default=None, help="hausdorff difference depth")
    p.add_argument("--k-max", type=int, default=None, help="hausdorff shift depth")
    p.set_defaults(handler=_cmd_analyze)

    p = sub.add_parser("extract", help="extract a subsequence through a mask")
    p.add_argument("sequence")
    p.add_argument("mask")
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--check", action="store_true", help="report both verdicts")
    p.add_argument("--cap", type=int, default=3, help="pattern-check minor cap")
    p.set_defaults(handler=_cmd_extract)

    p = sub.add_parser("mask-check", help="pattern-level mask validity")
    p.add_argument("mask")
    p.add_argument("--cap", type=int, default=3)
    p.set_defaults(handler=_cmd_mask_check)

    p = sub.add_parser("weyl", help="nested circle table at a complex point")
    p.add_argument("sequence")
    p.add_argument("--lambda", dest="lam", default="1i")
    p.add_argument("--orders", default="1..3", help="e.g. 3, 1..4 or 1,2,4")
    p.add_argument("--tau", type=float, default=None, help="parametrize each circle")
    p.set_defaults(handler=_cmd_weyl)

    p = sub.add_parser("determinacy", help="Carleman sums and radius decay")
    p.add_argument("sequence")
    p.add_argument("--depth", type=int, default=20)
    p.add_argument("--lambda", dest="lam", default=None)
    p.set_defaults(handler=_cmd_determinacy)

    p = sub.add_parser("complete", help="complete a partial Hankel matrix")
    p.add_argument("partial")
    p.add_argument("--target-depth", type=int, required=True)
    p.set_defaults(handler=_cmd_complete)

    p = sub.add_parser("generate", help="emit a sequence file from a family")
    p.add_argument(
        "family",
        choices=("hilbert", "geometric", "exp_decay", "stieltjes_wigert", "measure"),
    )
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--ratio", default=None, help="geometric ratio, e.g. 1/2")
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--measure", default=None, help="measure file for family=measure")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(handler=_cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code not in (0, None) else 0
    settings = from_env()
    try:
        report, code = args.handler(args, settings)
    except FileNotFoundError as exc:
        print(json.dumps({"error": str(exc), "status": "error"}), file=sys.stderr)
        return USAGE
    except _USAGE_ERRORS as exc:
        print(
            json.dumps({"error": str(exc), "status": "error"}, sort_keys=True),
            file=sys.stderr,
        )
        return USAGE
    except _NUMERICAL_ERRORS as exc:
        print(
            json.dumps(
                {"error": str(exc), "kind": type(exc).__name__, "status": "error"},
                sort_keys=True,
            ),
            file=sys.stderr,
        )
        return NUMERICAL
    _emit(report, args.format)
    return code


if __name__ == "__main__":
    sys.exit(main())
