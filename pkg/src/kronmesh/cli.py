"""Command-line front end.

Subcommands
    gaps      three-gap structure of a Kronecker prefix + identity checks
    analyze   fill distance, separation radius, mesh ratio for one n
    sweep     metrics over an n range (CSV by default)
    classify  badly-approximable verdict from the digit expansion
    points    dump a generated point set

Exit codes: 0 success; 1 usage or parse error; 2 unsupported input class
(e.g. rational alpha where the three-gap form needs an irrational); 3
precision unresolved at the configured ceiling; 4 infinite mesh ratio.

Output is deterministic: the same arguments produce byte-identical output.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional, Tuple

from .contfrac import (
    CFExpansion,
    PrecisionContext,
    is_badly_approximable,
    parse_alpha,
)
from .errors import (
    AlphaSpecError,
    OutOfRangeError,
    PrecisionUnresolvedError,
    UnsupportedAlphaError,
)
from .metrics import (
    SweepRow,
    kronecker_bounds,
    mesh_ratio,
    mesh_ratio_structural,
    metrics_to_json,
    sweep,
    sweep_to_csv,
)
from .sequences import (
    GreedyGen,
    KroneckerGen,
    VdcGen,
    generate,
    points_to_csv,
    points_to_json,
)
from .threegap import gap_structure, gap_structure_json, lengths_check

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNSUPPORTED = 2
EXIT_PRECISION = 3
EXIT_INFINITE = 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; the exit-code contract
    # reserves 2 for unsupported input classes, so route through exceptions
    def error(self, message):
        raise _UsageError(message)


def _add_precision(sp) -> None:
    sp.add_argument("--bits", type=int, default=192,
                    help="working precision in bits (default 192)")
    sp.add_argument("--max-bits", type=int, default=65536,
                    help="escalation ceiling in bits (default 65536)")


def _add_output(sp, fmt_default: str, fmt_choices=("csv", "json")) -> None:
    sp.add_argument("--format", choices=list(fmt_choices), default=fmt_default,
                    help=f"output format (default {fmt_default})")
    sp.add_argument("--digits", type=int, default=40,
                    help="significant decimal digits in output (default 40)")
    sp.add_argument("--out", default=None, help="output path (default stdout)")


def _add_generator(sp) -> None:
    sp.add_argument("--alpha", default=None,
                    help="alpha spec: golden | sqrt:D | quad:P,D,Q | rat:p/q "
                         "| cf:a0;a1,...[(period)]")
    sp.add_argument("--gen", choices=["kronecker", "vdc", "greedy"], default=None,
                    help="generator (default kronecker when --alpha is given)")
    sp.add_argument("--base", type=int, default=2,
                    help="van der Corput base (default 2)")
    sp.add_argument("--tie-break", choices=["leftmost", "rightmost"],
                    default="leftmost", help="greedy packing tie rule")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kronmesh", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("gaps", help="three-gap structure for one n")
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--n", required=True)
    _add_precision(sp)
    _add_output(sp, "json", fmt_choices=("json",))

    sp = sub.add_parser("analyze", help="quasi-uniformity metrics for one n")
    _add_generator(sp)
    sp.add_argument("--n", required=True)
    _add_precision(sp)
    _add_output(sp, "json", fmt_choices=("json",))

    sp = sub.add_parser("sweep", help="metrics over an n range")
    _add_generator(sp)
    sp.add_argument("--n", default=None, help="range a..b")
    sp.add_argument("--n-range", default=None, help="range a..b (alias of --n)")
    sp.add_argument("--n-at", choices=["nm"], default=None,
                    help="evaluate at n = n_m instead of a contiguous range")
    sp.add_argument("--m", default=None, help="m range a..b for --n-at nm")
    sp.add_argument("--no-bounds", action="store_true",
                    help="skip closed-form bound columns")
    _add_precision(sp)
    _add_output(sp, "csv")

    sp = sub.add_parser("classify", help="badly-approximable verdict")
    sp.add_argument("--alpha", required=True)
    sp.add_argument("--probe", type=int, default=64,
                    help="digit probe depth for non-periodic specs")
    _add_output(sp, "json", fmt_choices=("json",))

    sp = sub.add_parser("points", help="dump generated points")
    _add_generator(sp)
    sp.add_argument("--n", required=True)
    _add_precision(sp)
    _add_output(sp, "csv")
    return p


def _parse_int(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise _UsageError(f"{what} must be an integer, got {text!r}")


def _parse_range(text: str, what: str) -> Tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise _UsageError(f"{what} must be a range a..b, got {text!r}")
    a = _parse_int(lo, what)
    b = _parse_int(hi, what)
    if a > b:
        raise _UsageError(f"{what} range is reversed: {text!r}")
    return a, b


def _context(args) -> PrecisionContext:
    try:
        return PrecisionContext(args.bits, args.max_bits)
    except ValueError as e:
        raise _UsageError(str(e))


def _generator(args):
    gen = args.gen
    if gen is None:
        if args.alpha is None:
            raise _UsageError("need --alpha or --gen")
        gen = "kronecker"
    if gen == "kronecker":
        if args.alpha is None:
            raise _UsageError("--gen kronecker needs --alpha")
        return KroneckerGen(parse_alpha(args.alpha))
    if args.alpha is not None:
        raise _UsageError(f"--alpha does not apply to --gen {gen}")
    if gen == "vdc":
        return VdcGen(args.base)
    return GreedyGen(args.tie_break)


def _cmd_gaps(args) -> Tuple[str, int]:
    ctx = _context(args)
    n = _parse_int(args.n, "--n")
    exp = CFExpansion(parse_alpha(args.alpha))
    gs = gap_structure(exp, n)
    report = lengths_check(gs)
    payload = gap_structure_json(gs, exp, ctx, args.digits)
    payload["checks"] = [
        {"name": c.name, "passed": c.passed, "detail": c.detail}
        for c in report.checks
    ]
    payload["all_passed"] = report.all_passed
    code = EXIT_OK if report.all_passed else EXIT_PRECISION
    return _dumps(payload), code


def _cmd_analyze(args) -> Tuple[str, int]:
    ctx = _context(args)
    n = _parse_int(args.n, "--n")
    gen = _generator(args)
    try:
        ps = generate(gen, n, ctx)
        qm = mesh_ratio(ps)
    except ValueError as e:
        raise _UsageError(str(e))
    br = None
    if isinstance(gen, KroneckerGen):
        exp = CFExpansion(gen.alpha)
        if not exp.is_rational:
            br = kronecker_bounds(exp, n, ctx)
    payload = metrics_to_json(qm, br, args.digits)
    return _dumps(payload), EXIT_INFINITE if qm.is_infinite else EXIT_OK


def _sweep_rows(args, ctx) -> List[SweepRow]:
    gen = _generator(args)
    want_bounds = not args.no_bounds
    if args.n_at is not None:
        if args.m is None:
            raise _UsageError("--n-at nm needs --m a..b")
        if not isinstance(gen, KroneckerGen):
            raise _UsageError("--n-at nm applies to Kronecker sequences only")
        exp = CFExpansion(gen.alpha)
        if exp.is_rational:
            raise UnsupportedAlphaError("n_m sweep needs irrational alpha")
        m_lo, m_hi = _parse_range(args.m, "--m")
        if m_lo < 1:
            raise _UsageError("--m range must start at m >= 1")
        rows = []
        for m in range(m_lo, m_hi + 1):
            if not exp.ensure(m):
                raise _UsageError(
                    f"--m reaches m={m} but the expansion ends at a_{exp.depth}"
                )
            n = exp.n_at(m)
            qm = mesh_ratio_structural(exp, n, ctx)
            br = kronecker_bounds(exp, n, ctx) if want_bounds else None
            rows.append(SweepRow(qm, br))
        return rows
    spec = args.n if args.n is not None else args.n_range
    if spec is None:
        raise _UsageError("sweep needs --n a..b (or --n-at nm --m a..b)")
    lo, hi = _parse_range(spec, "--n")
    try:
        return sweep(gen, lo, hi, ctx, with_bounds=want_bounds)
    except ValueError as e:
        raise _UsageError(str(e))


def _cmd_sweep(args) -> Tuple[str, int]:
    ctx = _context(args)
    rows = _sweep_rows(args, ctx)
    if args.format == "csv":
        return sweep_to_csv(rows, args.digits), EXIT_OK
    payload = {"rows": [metrics_to_json(r.metrics, r.bounds, args.digits)
                        for r in rows]}
    return _dumps(payload), EXIT_OK


def _cmd_classify(args) -> Tuple[str, int]:
    if args.probe < 1:
        raise _UsageError("--probe must be >= 1")
    verdict = is_badly_approximable(parse_alpha(args.alpha), args.probe)
    payload = {
        "verdict": verdict.verdict,
        "digit_sup": verdict.digit_sup,
        "certainty": verdict.certainty,
        "c_bound": verdict.c_bound,
    }
    return _dumps(payload), EXIT_OK


def _cmd_points(args) -> Tuple[str, int]:
    ctx = _context(args)
    n = _parse_int(args.n, "--n")
    gen = _generator(args)
    try:
        ps = generate(gen, n, ctx)
    except ValueError as e:
        raise _UsageError(str(e))
    if args.format == "csv":
        return points_to_csv(ps, args.digits), EXIT_OK
    return _dumps(points_to_json(ps, args.digits)), EXIT_OK


def _dumps(payload) -> str:
    return json.dumps(payload, indent=2) + "\n"


_COMMANDS = {
    "gaps": _cmd_gaps,
    "analyze": _cmd_analyze,
    "sweep": _cmd_sweep,
    "classify": _cmd_classify,
    "points": _cmd_points,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        text, code = _COMMANDS[args.command](args)
    except _UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    # note: UnsupportedAlphaError and AlphaSpecError are ValueError
    # subclasses, so the order of these clauses is load-bearing
    except UnsupportedAlphaError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except PrecisionUnresolvedError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PRECISION
    except OutOfRangeError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (AlphaSpecError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    out_path = getattr(args, "out", None)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
