"""JSON documents for contexts, scalars, IETs and reports.

Rationals are always written as ``"p/q"`` strings in lowest terms so that no
binary float ever touches the data.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any

from .errors import (
    DocumentSyntaxError,
    IETError,
    InvalidPermutation,
    InvariantViolation,
    NonPositiveLength,
    SchemaError,
)
from .iet import IET, make_iet
from .induction import InductionResult, SatisfiedUpTo, ViolatedAt
from .linalg import QMatrix
from .saf import MembershipReport, WedgeElement
from .scalar import (
    BasisContext,
    BasisEntry,
    Scalar,
    context_express,
    format_fraction,
    parse_fraction,
    parse_real,
)

__all__ = [
    "context_to_json",
    "context_from_json",
    "scalar_to_json",
    "scalar_from_json",
    "iet_to_json",
    "iet_from_json",
    "parse_iet_document",
    "dump_iet",
    "wedge_to_json",
    "wedge_from_json",
    "report_to_json",
    "induction_to_json",
    "keane_to_json",
]


def context_to_json(ctx: BasisContext) -> dict:
    out: dict[str, Any] = {"kind": ctx.kind}
    if ctx.kind == "quadratic":
        out["d"] = ctx.d
    out["entries"] = [{"name": e.name, "decimal": e.decimal} for e in ctx.entries]
    return out


def _require(doc: Any, key: str, kind: type | tuple, where: str) -> Any:
    if not isinstance(doc, dict):
        raise SchemaError(f"{where}: expected an object")
    if key not in doc:
        raise SchemaError(f"{where}: missing key {key!r}")
    value = doc[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise SchemaError(f"{where}.{key}: wrong type {type(value).__name__}")
    return value


def context_from_json(doc: Any) -> BasisContext:
    kind = _require(doc, "kind", str, "context")
    try:
        if kind == "rational":
            ctx = BasisContext.rational()
        elif kind == "quadratic":
            ctx = BasisContext.quadratic(_require(doc, "d", int, "context"))
        elif kind == "symbolic":
            entries = _require(doc, "entries", list, "context")
            if not entries:
                raise SchemaError("context.entries: empty")
            parsed = []
            for i, e in enumerate(entries):
                name = _require(e, "name", str, f"context.entries[{i}]")
                if i == 0 and name == "1":
                    parsed.append(BasisEntry.one())
                elif "decimal" not in e and (m := re.fullmatch(r"sqrt\((\d+)\)", name)):
                    # radicals need no decimal; their enclosures are exact
                    parsed.append(BasisEntry.radical(int(m.group(1))))
                else:
                    decimal = _require(e, "decimal", str, f"context.entries[{i}]")
                    parsed.append(BasisEntry.declared(name, decimal))
            ctx = BasisContext("symbolic", tuple(parsed))
        else:
            raise SchemaError(f"context.kind: unknown kind {kind!r}")
    except ValueError as exc:
        raise SchemaError(f"context: {exc}") from None
    if "entries" in doc and kind != "symbolic":
        names = [_require(e, "name", str, "context.entries[]") for e in doc["entries"]]
        if names != ctx.names:
            raise SchemaError(f"context.entries: expected names {ctx.names}, got {names}")
    return ctx


def scalar_to_json(s: Scalar) -> dict:
    return {"coords": [format_fraction(c) for c in s.coords]}


def scalar_from_json(doc: Any, ctx: BasisContext, where: str = "scalar") -> Scalar:
    """A scalar given as ``{"coords": [...]}`` or as an expression like ``"sqrt(2)-1"``."""
    if isinstance(doc, str):
        try:
            return context_express(ctx, parse_real(doc))
        except (ValueError, IETError) as exc:
            raise SchemaError(f"{where}: {exc}") from None
    coords = _require(doc, "coords", list, where)
    if len(coords) != ctx.size:
        raise SchemaError(f"{where}.coords: {len(coords)} entries for a context of size {ctx.size}")
    try:
        return Scalar(ctx, tuple(parse_fraction(c) for c in coords))
    except ValueError as exc:
        raise SchemaError(f"{where}.coords: {exc}") from None


def iet_to_json(f: IET) -> dict:
    return {
        "context": context_to_json(f.context),
        "left": scalar_to_json(f.left),
        "length": scalar_to_json(f.length),
        "lengths": [scalar_to_json(x) for x in f.lengths],
        "perm": list(f.perm),
    }


def iet_from_json(doc: Any) -> IET:
    ctx = context_from_json(_require(doc, "context", dict, "iet"))
    left = scalar_from_json(doc["left"], ctx, "iet.left") if "left" in doc else ctx.zero()
    raw = _require(doc, "lengths", list, "iet")
    lengths = [scalar_from_json(x, ctx, f"iet.lengths[{i}]") for i, x in enumerate(raw)]
    perm = _require(doc, "perm", list, "iet")
    if not all(isinstance(p, int) and not isinstance(p, bool) for p in perm):
        raise SchemaError("iet.perm: entries must be integers")
    try:
        f = make_iet(ctx, left, lengths, perm)
    except (NonPositiveLength, InvalidPermutation) as exc:
        raise InvariantViolation(str(exc)) from None
    if "length" in doc:
        declared = scalar_from_json(doc["length"], ctx, "iet.length")
        residual = declared - f.length
        if not residual.is_zero():
            raise InvariantViolation(
                f"lengths sum to {f.length}, not the domain length {declared}; residual {residual}"
            )
    return f


def parse_iet_document(text: str) -> IET:
    """Parse and fully validate an IET document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return iet_from_json(doc)


def dump_iet(f: IET) -> str:
    return json.dumps(iet_to_json(f), indent=2)


def wedge_to_json(w: WedgeElement) -> dict:
    return {
        "basis": w.context.names,
        "p": [[i + 1, j + 1, format_fraction(c)] for i, j, c in w.entries()],
    }


def wedge_from_json(doc: Any, ctx: BasisContext) -> WedgeElement:
    basis = _require(doc, "basis", list, "wedge")
    if basis != ctx.names:
        raise SchemaError(f"wedge.basis: {basis} does not match context {ctx.names}")
    n = ctx.size
    rows = [[Fraction(0)] * n for _ in range(n)]
    for item in _require(doc, "p", list, "wedge"):
        if not (isinstance(item, list) and len(item) == 3):
            raise SchemaError("wedge.p: entries must be [i, j, \"p/q\"]")
        i, j, c = item
        if not (isinstance(i, int) and isinstance(j, int) and 1 <= i < j <= n):
            raise SchemaError(f"wedge.p: bad index pair ({i}, {j})")
        try:
            q = parse_fraction(c)
        except ValueError as exc:
            raise SchemaError(f"wedge.p: {exc}") from None
        rows[i - 1][j - 1] = q
        rows[j - 1][i - 1] = -q
    return WedgeElement(ctx, QMatrix.from_rows(rows))


def report_to_json(rep: MembershipReport) -> dict:
    out: dict[str, Any] = {
        "in_Gper": rep.in_Gper,
        "in_G1": rep.in_G1,
        "saf": wedge_to_json(rep.saf),
        "obstruction": [[i, j, format_fraction(c)] for i, j, c in rep.obstruction],
    }
    if rep.factorization is not None:
        g, h1, h2 = rep.factorization
        out["factorization"] = {"g": iet_to_json(g), "h1": iet_to_json(h1), "h2": iet_to_json(h2)}
    return out


def induction_to_json(res: InductionResult) -> dict:
    return {
        "context": context_to_json(res.induced.context),
        "induced": iet_to_json(res.induced),
        "return_times": [
            {"start": scalar_to_json(p.start), "length": scalar_to_json(p.length), "steps": p.steps}
            for p in res.return_times
        ],
        "max_return": res.max_return,
    }


def keane_to_json(verdict: SatisfiedUpTo | ViolatedAt) -> dict:
    if isinstance(verdict, SatisfiedUpTo):
        return {"verdict": "satisfied", "depth": verdict.depth, "note": verdict.note}
    return {
        "verdict": "violated",
        "discontinuity": scalar_to_json(verdict.discontinuity),
        "hit": scalar_to_json(verdict.hit),
        "step": verdict.step,
        "witness": verdict.witness,
    }
