"""Command-line interface.

Exit codes: 0 success or affirmative verdict, 1 negative verdict,
2 input error, 3 undecided (ambiguous sign or iteration cap exceeded).
Output is plain text (never colored) or JSON with ``--format json``.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import iet as iet_mod
from .errors import AmbiguousSign, CapExceeded, DocumentError, IETError, NotRepresentable
from .iet import IET, apply, compose, inverse, order, rank_of_iet
from .induction import (
    DEFAULT_INDUCE_CAP,
    SatisfiedUpTo,
    check_saf_preserved,
    induce,
    keane_check,
    resolve_subinterval,
)
from .saf import member_G1, saf, saf_3iet_closed_form
from .scalar import DEFAULT_PRECISION_CAP, parse_real, precision_cap
from .serialize import (
    dump_iet,
    induction_to_json,
    iet_to_json,
    keane_to_json,
    parse_iet_document,
    report_to_json,
    wedge_to_json,
)

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_UNDECIDED = 0, 1, 2, 3

COMMANDS = ("saf", "member", "factor", "induce", "rank", "order", "compose", "check")


@dataclass
class JobSpec:
    command: str
    inputs: list[str]
    options: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        need = 2 if self.command == "compose" else 1
        if len(self.inputs) != need:
            raise ValueError(f"{self.command} needs {need} input document(s)")
        if self.command == "induce" and not ("left" in self.options and "right" in self.options):
            raise ValueError("induce needs --left and --right")


@dataclass
class Outcome:
    code: int
    data: dict
    text: str


def _fmt(f: IET) -> str:
    lengths = "; ".join(str(x) for x in f.lengths)
    perm = " ".join(str(p) for p in f.perm)
    return f"  on [{f.left}, {f.right}) over {f.context}: lengths [{lengths}], perm [{perm}]"


def _cmd_saf(f: IET, opts: dict) -> Outcome:
    w = saf(f)
    return Outcome(EXIT_OK, {"saf": wedge_to_json(w)}, f"SAF = {w}")


def _cmd_member(f: IET, opts: dict) -> Outcome:
    cls = opts.get("class", "g1")
    rep = member_G1(f, factor=opts.get("factor", False))
    data = report_to_json(rep)
    data["class"] = cls
    verdict = rep.in_Gper if cls == "gper" else rep.in_G1
    lines = [
        f"SAF = {rep.saf}",
        f"in G_per: {'yes' if rep.in_Gper else 'no'}",
        f"in G_1:   {'yes' if rep.in_G1 else 'no'}",
    ]
    if rep.obstruction:
        terms = ", ".join(f"p'[{i},{j}] = {c}" for i, j, c in rep.obstruction)
        lines.append(f"obstruction (basis with v_1 = |X|): {terms}")
    if rep.factorization:
        lines += _factor_lines(rep.factorization)
    return Outcome(EXIT_OK if verdict else EXIT_NEGATIVE, data, "\n".join(lines))


def _factor_lines(fac) -> list[str]:
    g, h1, h2 = fac
    return [
        "rotation g:", _fmt(g), "h1 (f = h1 o g):", _fmt(h1), "h2 (f = g o h2):", _fmt(h2),
        "verified: f = g o h2 = h1 o g and SAF(h1) = SAF(h2) = 0",
    ]


def _cmd_factor(f: IET, opts: dict) -> Outcome:
    rep = member_G1(f, factor=True)
    if not rep.in_G1:
        data = report_to_json(rep)
        return Outcome(EXIT_NEGATIVE, data, "f is not in G_1; no factorization exists")
    data = report_to_json(rep)
    data["verified"] = True
    return Outcome(EXIT_OK, data, "\n".join(_factor_lines(rep.factorization)))


def _cmd_induce(f: IET, opts: dict) -> Outcome:
    g, a, b = resolve_subinterval(f, parse_real(opts["left"]), parse_real(opts["right"]))
    verdict = keane_check(g, opts.get("keane_depth", 64))
    res = induce(g, a, b, opts.get("induce_cap", DEFAULT_INDUCE_CAP))
    data = induction_to_json(res)
    data["keane"] = keane_to_json(verdict)
    preserved = saf(g) == saf(res.induced)
    data["saf_preserved"] = preserved
    data["induced_in_G1"] = member_G1(res.induced).in_G1
    lines = [
        "induced map:",
        _fmt(res.induced),
        "return times:",
        *(f"  start {p.start}, length {p.length}: {p.steps} steps" for p in res.return_times),
        f"SAF(f_Y) = SAF(f): {preserved}",
        f"f_Y in G_1(Y): {data['induced_in_G1']}",
    ]
    if not isinstance(verdict, SatisfiedUpTo):
        lines.append(f"minimality not attested: {verdict.witness}")
    return Outcome(EXIT_OK, data, "\n".join(lines))


def _cmd_rank(f: IET, opts: dict) -> Outcome:
    n = rank_of_iet(f)
    return Outcome(EXIT_OK, {"rank": n}, f"rank = {n}")


def _cmd_order(f: IET, opts: dict) -> Outcome:
    cap = opts.get("cap", 10_000)
    n = order(f, cap)
    if n is None:
        return Outcome(EXIT_NEGATIVE, {"order": None, "cap": cap}, f"order exceeds {cap}")
    return Outcome(EXIT_OK, {"order": n, "cap": cap}, f"order = {n}")


def _run_checks(f: IET, opts: dict) -> list[tuple[str, bool]]:
    checks = []
    canon = iet_mod.make_iet(f.context, f.left, f.lengths, f.perm)
    checks.append(("canonical form is a fixpoint", canon == f))
    checks.append(("r - 1 discontinuities", len(f.discontinuities()) == f.r - 1))
    products = [_mul(lam, gam) for lam, gam in zip(f.lengths, f.gammas)]
    if all(x is not None for x in products):
        total = f.context.zero()
        for x in products:
            total = total + x
        checks.append(("sum lambda_k * gamma_k = 0", total.is_zero()))
    ident = iet_mod.identity(f.context, f.length, f.left)
    checks.append(("f o f^-1 = id", compose(f, inverse(f)) == ident))
    checks.append(("f^-1 o f = id", compose(inverse(f), f) == ident))
    w = saf(f)
    checks.append(("SAF(f^-1) = -SAF(f)", saf(inverse(f)) == -w))
    ff = compose(f, f)
    checks.append(("SAF(f o f) = 2 SAF(f)", saf(ff) == w + w))
    samples = [f.left + lam * Fraction(k, 5) for lam in f.lengths[:1] for k in range(5)]
    samples += [s for s in f.starts()]
    checks.append(("apply(f o f, x) = f(f(x))", all(apply(ff, x) == apply(f, apply(f, x)) for x in samples)))
    rep = member_G1(f, factor=True)
    checks.append(("G_per implies G_1", rep.in_G1 or not rep.in_Gper))
    if f.r == 3 and f.perm == (3, 2, 1):
        closed = saf_3iet_closed_form(f.lengths[0], f.lengths[2], f.length)
        checks.append(("3-IET closed form equals SAF", closed == w))
        checks.append(("3-IET criterion: G_1 iff rank <= 2", rep.in_G1 == (rank_of_iet(f) <= 2)))
    checks.append(("document round-trip", parse_iet_document(dump_iet(f)) == f))
    verdict = keane_check(f, opts.get("keane_depth", 64))
    if isinstance(verdict, SatisfiedUpTo) and not f.is_identity():
        left, right = f.left, f.left + f.lengths[0]
        checks.append(("SAF preserved on first-interval induction",
                       check_saf_preserved(f, left, right, opts.get("induce_cap", DEFAULT_INDUCE_CAP))))
    return checks


def _mul(a, b):
    try:
        return a * b
    except NotRepresentable:
        return None


def _cmd_check(f: IET, opts: dict) -> Outcome:
    checks = _run_checks(f, opts)
    ok = all(passed for _, passed in checks)
    data = {"checks": [{"name": n, "passed": p} for n, p in checks], "passed": ok}
    text = "\n".join(f"[{'PASS' if p else 'FAIL'}] {n}" for n, p in checks)
    return Outcome(EXIT_OK if ok else EXIT_NEGATIVE, data, text)


_DISPATCH = {
    "saf": _cmd_saf,
    "member": _cmd_member,
    "factor": _cmd_factor,
    "induce": _cmd_induce,
    "rank": _cmd_rank,
    "order": _cmd_order,
    "check": _cmd_check,
}


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def run(job: JobSpec) -> Outcome:
    """Execute one job; every failure is mapped to an exit code, never raised."""
    try:
        with precision_cap(job.options.get("precision_bits", DEFAULT_PRECISION_CAP)):
            docs = [parse_iet_document(_read(p)) for p in job.inputs]
            if job.command == "compose":
                h = compose(docs[0], docs[1])
                return Outcome(EXIT_OK, {"result": iet_to_json(h)}, _fmt(h))
            return _DISPATCH[job.command](docs[0], job.options)
    except (AmbiguousSign, CapExceeded) as exc:
        return Outcome(EXIT_UNDECIDED, {"error": type(exc).__name__, "message": str(exc)},
                       f"undecided: {type(exc).__name__}: {exc}")
    except (DocumentError, IETError, OSError, ValueError, UnicodeDecodeError) as exc:
        return Outcome(EXIT_INPUT, {"error": type(exc).__name__, "message": str(exc)},
                       f"input error: {type(exc).__name__}: {exc}")


def render(outcome: Outcome, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"exit_code": outcome.code, **outcome.data}, indent=2)
    return outcome.text


def _batch_one(args: tuple[JobSpec, str, Path]) -> int:
    job, fmt, out_dir = args
    outcome = run(job)
    src = Path(job.inputs[0])
    suffix = "json" if fmt == "json" else "txt"
    (out_dir / f"{src.stem}.{job.command}.{suffix}").write_text(render(outcome, fmt) + "\n", encoding="utf-8")
    return outcome.code


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision-bits", type=int, default=DEFAULT_PRECISION_CAP,
                        help="bit cap for symbolic sign refinement (default %(default)s)")
    common.add_argument("--induce-cap", type=int, default=DEFAULT_INDUCE_CAP,
                        help="maximum first-return steps (default %(default)s)")
    common.add_argument("--keane-depth", type=int, default=64,
                        help="orbit depth of the minimality check (default %(default)s)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--batch", metavar="DIR", type=Path,
                        help="process every *.json document in DIR")
    common.add_argument("--out", metavar="DIR", type=Path,
                        help="batch output directory (default DIR/results)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="ietgroup",
        description="Exact interval exchange computations: SAF invariant, G_per / G_1 membership, "
        "rotation factorization and first-return maps. Basis reals of symbolic contexts are "
        "trusted to be linearly independent over Q; this is not verified.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help: str, nfiles: str = "?") -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help)
        p.add_argument("files", nargs=nfiles, help="IET document(s); '-' reads stdin")
        return p

    add("saf", "print the SAF invariant")
    p = add("member", "decide membership in G_per or G_1")
    p.add_argument("--class", dest="cls", choices=("gper", "g1"), default="g1")
    p.add_argument("--factor", action="store_true", help="include the rotation factorization")
    add("factor", "factor f = g o h2 = h1 o g through a rotation")
    p = add("induce", "first-return map on [LEFT, RIGHT)")
    p.add_argument("--left", required=True, help="e.g. 0, 1/2, sqrt(2)-1, sqrt(3)/3")
    p.add_argument("--right", required=True)
    add("rank", "dimension over Q of the span of the lengths")
    p = add("order", "order of f in its group")
    p.add_argument("--cap", type=int, default=10_000)
    add("compose", "compose two IETs (first o second)", nfiles="*")
    add("check", "run the invariant suite against the input")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    options = {
        "precision_bits": args.precision_bits,
        "induce_cap": args.induce_cap,
        "keane_depth": args.keane_depth,
    }
    if args.command == "member":
        options.update({"class": args.cls, "factor": args.factor})
    elif args.command == "induce":
        options.update({"left": args.left, "right": args.right})
    elif args.command == "order":
        options["cap"] = args.cap

    files = args.files if isinstance(args.files, list) else ([args.files] if args.files else [])
    try:
        if args.batch is not None:
            if args.command == "compose" or files:
                raise ValueError("--batch takes no file arguments and does not support compose")
            paths = sorted(args.batch.glob("*.json"))
            out_dir = args.out or args.batch / "results"
            out_dir.mkdir(parents=True, exist_ok=True)
            jobs = [(JobSpec(args.command, [str(p)], options), args.format, out_dir) for p in paths]
            with ProcessPoolExecutor() as pool:
                codes = list(pool.map(_batch_one, jobs))
            for (job, _, _), code in zip(jobs, codes):
                print(f"{job.inputs[0]}: exit {code}")
            return max(codes, default=EXIT_OK)
        job = JobSpec(args.command, files, options)
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    outcome = run(job)
    stream = sys.stderr if outcome.code in (EXIT_INPUT, EXIT_UNDECIDED) and args.format == "text" else sys.stdout
    print(render(outcome, args.format), file=stream)
    return outcome.code


if __name__ == "__main__":
    sys.exit(main())
