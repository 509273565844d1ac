"""Command-line front end.

Exit codes: 0 success, 1 usage or validation failure, 2 internal invariant
violation (a stated inequality came out false, which indicates a bug).
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from fractions import Fraction

from . import configgen
from .counting import (
    INCIDENCE_SOFT_CAP,
    COUNT_SOFT_CAP,
    InternalInvariantError,
    build_report,
    count_incidences,
    double_count,
    reduce_S1_outside_D2,
    scaling_experiment,
)
from .curves import CurveFamily, CurveRef, DegenerateSpecializationError
from .phi import ConstructionFailedError, trace_chain, trace_csv
from .polys import InvalidInputError, sturm_real_roots

AUDIT_SOFT_CAP = 4


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; this tool reserves 2 for invariant bugs."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}")


def _n_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")


def _branches(text: str) -> tuple[int, int, int, int]:
    table = {"+": 1, "-": -1, "1": 1, "-1": -1}
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4 or any(p not in table for p in parts):
        raise argparse.ArgumentTypeError(
            f"branches must be four of +,- (or 1,-1), got {text!r}"
        )
    return tuple(table[p] for p in parts)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tricircles", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a configuration file")
    gen.add_argument("--kind", default="random-uniform", choices=configgen.KINDS)
    gen.add_argument("--n", type=int, default=8)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--in", "-i", dest="input", help="source file for --kind from-file")
    gen.add_argument("--out", "-o", dest="out")

    count = sub.add_parser("count", help="count unit triples and check the bounds")
    count.add_argument("--in", "-i", dest="input", required=True)
    count.add_argument("--out", "-o", dest="out")
    count.add_argument("--jobs", type=int, default=1)
    count.add_argument("--force", action="store_true")
    count.add_argument("--no-timestamp", action="store_true")

    curves = sub.add_parser("curves", help="evaluate and classify a curve at a point")
    curves.add_argument("--in", "-i", dest="input", required=True)
    curves.add_argument("--ta", type=_fraction, required=True)
    curves.add_argument("--tb", type=_fraction, required=True)
    curves.add_argument("--swap", action="store_true", help="swap the roles of C1 and C2")
    curves.add_argument("--x", type=_fraction, required=True)
    curves.add_argument("--y", type=_fraction, required=True)
    curves.add_argument("--out", "-o", dest="out")
    curves.add_argument("--no-timestamp", action="store_true")

    inc = sub.add_parser("incidence", help="count curve-point incidences")
    inc.add_argument("--in", "-i", dest="input", required=True)
    inc.add_argument("--method", default="auto", choices=("auto", "brute", "fast"))
    inc.add_argument("--jobs", type=int, default=1)
    inc.add_argument("--force", action="store_true")
    inc.add_argument("--out", "-o", dest="out")
    inc.add_argument("--no-timestamp", action="store_true")

    audit = sub.add_parser("audit-overlap", help="shared-component audit over all curves")
    audit.add_argument("--in", "-i", dest="input", required=True)
    audit.add_argument("--threshold", type=int, default=None)
    audit.add_argument("--force", action="store_true")
    audit.add_argument("--out", "-o", dest="out")
    audit.add_argument("--no-timestamp", action="store_true")

    trace = sub.add_parser("trace", help="march a 4-step chain and dump the arc CSV")
    trace.add_argument("--in", "-i", dest="input", required=True)
    trace.add_argument("--ta", type=_fraction, required=True)
    trace.add_argument("--tb", type=_fraction, required=True)
    trace.add_argument("--swap", action="store_true")
    trace.add_argument("--start", type=_fraction, required=True)
    trace.add_argument("--stop", type=_fraction, required=True)
    trace.add_argument("--branches", type=_branches, default=(1, 1, 1, 1))
    trace.add_argument("--step", type=float, default=1e-3)
    trace.add_argument("--tol", type=float, default=1e-4,
                       help="tolerance for degeneracy flags on sampled states")
    trace.add_argument("--out", "-o", dest="out")
    trace.add_argument("--transitions-out", dest="transitions_out",
                       help="also bisect ok/failed flips and write them as JSON")

    scaling = sub.add_parser("scaling", help="run the generator at several n, emit CSV")
    scaling.add_argument("--kind", default="random-uniform", choices=configgen.KINDS)
    scaling.add_argument("--n", type=_n_list, required=True, help="e.g. 8,16,32,64")
    scaling.add_argument("--seed", type=int, default=0)
    scaling.add_argument("--jobs", type=int, default=1)
    scaling.add_argument("--no-timestamp", action="store_true",
                         help="zero the seconds column for byte-identical output")
    scaling.add_argument("--out", "-o", dest="out")

    verify = sub.add_parser("verify", help="run every counting check on a configuration")
    verify.add_argument("--in", "-i", dest="input", required=True)
    verify.add_argument("--jobs", type=int, default=1)
    verify.add_argument("--force", action="store_true")
    verify.add_argument("--no-timestamp", action="store_true")
    verify.add_argument("--out", "-o", dest="out")
    return parser


def _emit(text: str, out) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(doc: dict, args) -> None:
    if not getattr(args, "no_timestamp", True):
        doc["timestamp"] = datetime.now(timezone.utc).isoformat()
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", getattr(args, "out", None))


def _load_config(args):
    return configgen.load(args.input)


def _check_cap(value: int, cap: int, what: str, force: bool) -> None:
    if value > cap and not force:
        raise InvalidInputError(
            f"{what} has n={value} > soft cap {cap}; pass --force to run anyway"
        )


def _cmd_gen(args) -> int:
    spec = configgen.GeneratorSpec(
        kind=args.kind, n=args.n, seed=args.seed, path=args.input
    )
    cfg = configgen.generate(spec)
    _emit(configgen.dumps(cfg), args.out)
    return 0


def _cmd_count(args) -> int:
    cfg = _load_config(args)
    _check_cap(max(cfg.sizes), COUNT_SOFT_CAP, "count", args.force)
    report = build_report(cfg, jobs=args.jobs)
    doc = report.as_json_dict()
    _emit_json(doc, args)
    return 0 if report.all_hold() else 2


def _cmd_curves(args) -> int:
    cfg = _load_config(args)
    fam = CurveFamily(cfg.c1, cfg.c2, cfg.c3)
    ref = CurveRef(args.ta, args.tb, role_swap=args.swap)
    value = fam.curve_eval(ref, args.x, args.y)
    cls = fam.classify_point(ref, args.x, args.y)
    fiber = fam.curve_fiber(ref, args.x)
    doc = {
        "t_a": str(args.ta),
        "t_b": str(args.tb),
        "role_swap": args.swap,
        "x": str(args.x),
        "y": str(args.y),
        "value": str(value),
        "on_curve": value == 0,
        "class": cls.value,
        "fiber_vertical": fiber.vertical,
        "fiber_degree": fiber.poly.degree,
        "fiber_real_roots": (
            0 if fiber.vertical else sturm_real_roots(fiber.poly).count
        ),
        "ultra_candidate": fam.ultra_candidate(ref),
    }
    _emit_json(doc, args)
    return 0


def _cmd_incidence(args) -> int:
    cfg = _load_config(args)
    _check_cap(max(cfg.sizes), INCIDENCE_SOFT_CAP, "incidence", args.force)
    inc = count_incidences(cfg, method=args.method, jobs=args.jobs)
    _, q, _ = double_count(cfg, jobs=args.jobs)
    applicable = not inc.degenerate_cells
    holds = (q <= 4 * inc.i_prime) if applicable else None
    doc = {
        "I_prime": inc.i_prime,
        "I": inc.i,
        "same_pair": inc.same_pair,
        "Q": q,
        "method": inc.method,
        "degenerate_cells": [[str(a), str(b)] for a, b in inc.degenerate_cells],
        "verdict": {"name": "Q<=4*I_prime", "holds": holds, "lhs": q, "rhs": 4 * inc.i_prime},
    }
    _emit_json(doc, args)
    return 0 if holds is not False else 2


def _cmd_audit(args) -> int:
    cfg = _load_config(args)
    _check_cap(len(cfg.theta1), AUDIT_SOFT_CAP, "audit-overlap", args.force)
    fam = CurveFamily(cfg.c1, cfg.c2, cfg.c3)
    refs = [CurveRef(ta, tb) for ta in cfg.theta1 for tb in cfg.theta1]
    doc = fam.overlap_audit(refs, threshold=args.threshold)
    _emit_json(doc, args)
    return 0


def _cmd_trace(args) -> int:
    cfg = _load_config(args)
    fam = CurveFamily(cfg.c1, cfg.c2, cfg.c3)
    ref = CurveRef(args.ta, args.tb, role_swap=args.swap)
    chain = fam.chain_for(ref)
    trace = trace_chain(
        chain, args.start, args.stop, args.branches,
        step=args.step, flag_tol=args.tol,
    )
    _emit(trace_csv(trace), args.out)
    if args.transitions_out:
        transitions = fam.find_transitions(ref, trace, annotation_tol=args.tol)
        doc = [
            {
                "bracket": [repr(float(t.bracket[0])), repr(float(t.bracket[1]))],
                "failing_step": t.failing_step,
                "annotations": list(t.annotations),
            }
            for t in transitions
        ]
        with open(args.transitions_out, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def _cmd_scaling(args) -> int:
    result = scaling_experiment(
        args.kind,
        args.n,
        seed=args.seed,
        include_seconds=not args.no_timestamp,
        jobs=args.jobs,
    )
    _emit(result.csv_text(), args.out)
    sys.stderr.write(f"fitted log-log slope of M vs n: {result.slope:.12f}\n")
    return 0


def _cmd_verify(args) -> int:
    cfg = _load_config(args)
    _check_cap(max(cfg.sizes), INCIDENCE_SOFT_CAP, "verify", args.force)
    inc = count_incidences(cfg, jobs=args.jobs)
    report = build_report(cfg, incidences=inc, jobs=args.jobs)
    reduction = reduce_S1_outside_D2(cfg, jobs=args.jobs)
    doc = report.as_json_dict()
    doc["reduction"] = {
        "role": list(reduction.role),
        "original_triples": reduction.original_triples,
        "retained_triples": reduction.retained_triples,
        "retention": str(reduction.retention),
    }
    ok = report.all_hold()
    doc["all_hold"] = ok
    _emit_json(doc, args)
    return 0 if ok else 2


_COMMANDS = {
    "gen": _cmd_gen,
    "count": _cmd_count,
    "curves": _cmd_curves,
    "incidence": _cmd_incidence,
    "audit-overlap": _cmd_audit,
    "trace": _cmd_trace,
    "scaling": _cmd_scaling,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (InvalidInputError, configgen.ParseError, DegenerateSpecializationError,
            ConstructionFailedError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except InternalInvariantError as exc:
        sys.stderr.write(f"invariant violation: {exc}\n")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
