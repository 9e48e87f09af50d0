"""Command-line entry point.

Exit status: 0 on success, 1 on usage or input errors, 2 when a checked
inequality fails or a witness search comes up empty.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import lemmas
from .counting import mult_energy_J
from .families import FamilyError, FamilySpec, gen_family
from .field_sets import (FieldError, difference, format_set, make_field, productset,
                         read_set, sumset)
from .sweep import ExperimentConfig, render, run_sweep
from .trace import IntersectionAnomaly, run_trace

EXIT_OK, EXIT_USAGE, EXIT_CHECK = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _sets(args, expected: int | None = None, minimum: int = 1):
    paths = args.set or []
    if len(paths) < minimum or (expected is not None and len(paths) != expected):
        want = expected if expected is not None else f"at least {minimum}"
        raise UsageError(f"expected {want} --set file(s), got {len(paths)}")
    sets = [read_set(p) for p in paths]
    if args.p is not None:
        for S in sets:
            if S.p != args.p:
                raise UsageError(f"set file modulus {S.p} differs from --p {args.p}")
    return sets


def cmd_gen(args) -> int:
    if args.p is None or args.family is None:
        raise UsageError("gen needs --p and --family")
    spec = FamilySpec(kind=args.family, size=args.size, start=args.start, step=args.step,
                      ratio=args.ratio, order=args.order if args.order is not None else args.size,
                      seed=args.seed)
    _emit(format_set(gen_family(make_field(args.p), spec)), args.out)
    return EXIT_OK


def _binary(op):
    def run(args) -> int:
        sets = _sets(args, minimum=1)
        if len(sets) > 2:
            raise UsageError("at most two --set files")
        X = sets[0]
        Y = sets[1] if len(sets) == 2 else X
        _emit(format_set(op(X, Y)), args.out)
        return EXIT_OK
    return run


def cmd_energy(args) -> int:
    (A,) = _sets(args, expected=1)
    report = mult_energy_J(A)
    _emit(_json(report.to_dict()), args.out)
    lo, hi = report.bound_sides
    return EXIT_OK if lo >= hi else EXIT_CHECK


def cmd_lemma(args) -> int:
    n = args.number
    if n in (1, 2):
        sets = _sets(args, minimum=1)
        if len(sets) > 2:
            raise UsageError(f"lemma {n} takes A1 and optionally an ambient set")
        finder = lemmas.find_gk_witness if n == 1 else lemmas.find_big_witness
        rep = finder(sets[0], sets[-1], seed=args.seed)
        _emit(_json(rep.to_dict()), args.out)
        return EXIT_OK if rep.holds else EXIT_CHECK
    if n == 3:
        X, Y, Z = _sets(args, expected=3)
        rep = lemmas.check_ruzsa_triangle(X, Y, Z)
    elif n == 4:
        X, *B = _sets(args, minimum=2)
        rep = lemmas.check_plunnecke(X, B)
    else:
        X, Y, G = _sets(args, expected=3)
        rep = lemmas.find_xi_witness(X, Y, G, mode=args.mode)
    _emit(_json(rep.to_dict()), args.out)
    return EXIT_OK if rep.holds else EXIT_CHECK


def cmd_trace(args) -> int:
    (A,) = _sets(args, expected=1)
    rec = run_trace(A, seed=args.seed)
    _emit(rec.to_json() + "\n", args.out)
    for c in rec.failed_checks():
        print(f"check failed: {c.name}: {c.lhs} {c.relation} {c.rhs}", file=sys.stderr)
    return EXIT_OK if rec.passed else EXIT_CHECK


def cmd_sweep(args) -> int:
    if not args.config:
        raise UsageError("sweep needs --config")
    cfg = ExperimentConfig.load(args.config)
    fmt = args.format or cfg.output_format
    rows = run_sweep(cfg, workers=args.workers)
    _emit(render(rows, fmt), args.out)
    if cfg.emit_trace and not all(r.trace_pass for r in rows):
        return EXIT_CHECK
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, help="prime modulus")
    common.add_argument("--set", action="append", metavar="PATH",
                        help="set file (repeat for several operands)")
    common.add_argument("--family", help="family kind for gen")
    common.add_argument("--size", type=int)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="sumprod", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", parents=[common], help="emit a set file")
    g.add_argument("--start", type=int, default=1)
    g.add_argument("--step", type=int, default=1)
    g.add_argument("--ratio", type=int)
    g.add_argument("--order", type=int)
    g.set_defaults(func=cmd_gen)

    for name, op in (("sumset", sumset), ("product", productset), ("difference", difference)):
        sp = sub.add_parser(name, parents=[common], help=f"{name} of one or two set files")
        sp.set_defaults(func=_binary(op))

    e = sub.add_parser("energy", parents=[common], help="multiplicative energy report")
    e.set_defaults(func=cmd_energy)

    lm = sub.add_parser("lemma", parents=[common], help="witness search / predicate check")
    lm.add_argument("number", type=int, choices=(1, 2, 3, 4, 5))
    lm.add_argument("--mode", choices=("direct", "proof-following"), default="direct")
    lm.set_defaults(func=cmd_lemma)

    t = sub.add_parser("trace", parents=[common], help="run the executable proof on a set")
    t.set_defaults(func=cmd_trace)

    sw = sub.add_parser("sweep", parents=[common], help="run an experiment sweep")
    sw.add_argument("--config", metavar="PATH", help="JSON experiment config")
    sw.add_argument("--workers", type=int, default=1)
    sw.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, FieldError, FamilyError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (lemmas.WitnessNotFound, lemmas.LemmaViolation, IntersectionAnomaly) as exc:
        print(f"check failure: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
