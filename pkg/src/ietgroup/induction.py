"""First-return maps on standard subintervals and related checks."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

from .errors import CapExceeded, NotInSpan, OutOfDomain
from .iet import IET, apply, embed_iet, from_pieces, locate
from .linalg import antisym_decompose
from .saf import member_G1, saf
from .scalar import ExternalReal, Scalar, Sign, context_adjoin, context_express

__all__ = [
    "InductionResult",
    "SatisfiedUpTo",
    "ViolatedAt",
    "DEFAULT_INDUCE_CAP",
    "resolve_subinterval",
    "induce",
    "check_saf_preserved",
    "find_G1_inducing_subinterval",
    "keane_check",
]

log = logging.getLogger(__name__)

DEFAULT_INDUCE_CAP = 100_000


@dataclass(frozen=True)
class ReturnPiece:
    start: Scalar
    length: Scalar
    steps: int


@dataclass(frozen=True)
class InductionResult:
    induced: IET
    return_times: tuple[ReturnPiece, ...]
    max_return: int

    def return_time(self, y: Scalar) -> int:
        for piece in self.return_times:
            off = y - piece.start
            if off.sign() >= 0 and (off - piece.length).sign() < 0:
                return piece.steps
        raise OutOfDomain(f"{y} is not in the induced domain")


@dataclass(frozen=True)
class SatisfiedUpTo:
    depth: int
    note: str = "no coincidence found; this does not prove minimality"


@dataclass(frozen=True)
class ViolatedAt:
    discontinuity: Scalar
    hit: Scalar
    step: int

    @property
    def witness(self) -> str:
        return f"f^{self.step}({self.discontinuity}) = {self.hit}"


def resolve_subinterval(f: IET, a: ExternalReal, b: ExternalReal) -> tuple[IET, Scalar, Scalar]:
    """Express the endpoints of ``[a, b)`` in ``f``'s context, adjoining new basis
    entries when needed; returns ``f`` re-embedded and the two endpoints."""
    ctx = f.context
    out = []
    for value in (a, b):
        if isinstance(value, Scalar):
            out.append(value)
            continue
        try:
            context_express(ctx, value)
        except NotInSpan:
            ctx, _ = context_adjoin(ctx, value)
        out.append(value)
    f = embed_iet(f, ctx)
    ends = [
        v.embed(ctx) if isinstance(v, Scalar) else context_express(ctx, v) for v in out
    ]
    return f, ends[0], ends[1]


def _split_at(pos: Scalar, length: Scalar, cut: Scalar) -> Scalar | None:
    """Length of ``[pos, pos + length)`` left of ``cut`` if ``cut`` is strictly inside."""
    head = cut - pos
    if head.sign() > 0 and (length - head).sign() > 0:
        return head
    return None


def induce(f: IET, left: Scalar, right: Scalar, cap: int = DEFAULT_INDUCE_CAP) -> InductionResult:
    """First-return map of ``f`` on ``[left, right)``.

    Pieces of the subinterval are pushed forward by ``f``; they are split at
    the discontinuities of ``f`` and at the endpoints of the subinterval and
    retire as soon as they land back inside it.
    """
    ctx = f.context
    ylen = right - left
    if ylen.sign() != Sign.POSITIVE:
        raise ValueError("subinterval must have positive length")
    if (left - f.left).sign() < 0 or (f.right - right).sign() < 0:
        raise OutOfDomain("subinterval is not contained in the domain")
    active = [(left, left, ylen, 0)]  # (origin, position, length, steps)
    retired: list[tuple[Scalar, Scalar, Scalar, int]] = []
    while active:
        origin, pos, length, steps = active.pop()
        steps += 1
        if steps > cap:
            raise CapExceeded(f"a piece of the subinterval did not return within {cap} steps")
        # split by the intervals of f
        loc = locate(f, pos)
        m, offset = loc.index, loc.offset
        chunks = []
        while True:
            avail = f.lengths[m] - offset
            diff = length - avail
            if diff.sign() <= 0:
                chunks.append((origin, pos + f.gammas[m], length))
                break
            chunks.append((origin, pos + f.gammas[m], avail))
            origin, pos, length = origin + avail, pos + avail, diff
            m, offset = m + 1, ctx.zero()
        # split images at the subinterval endpoints
        for o, p, n in chunks:
            for cut in (left, right):
                head = _split_at(p, n, cut)
                if head is not None:
                    pieces = [(o, p, head), (o + head, p + head, n - head)]
                    break
            else:
                pieces = [(o, p, n)]
            if len(pieces) == 2:
                # the tail may still straddle the other endpoint
                o2, p2, n2 = pieces[1]
                head = _split_at(p2, n2, right)
                if head is not None:
                    pieces[1:] = [(o2, p2, head), (o2 + head, p2 + head, n2 - head)]
            for o3, p3, n3 in pieces:
                inside = (p3 - left).sign() >= 0 and (right - p3).sign() > 0
                if inside:
                    retired.append((o3, p3, n3, steps))
                else:
                    active.append((o3, p3, n3, steps))
    by_origin = {o.coords: (o, p, n, s) for o, p, n, s in retired}
    ordered, x = [], left
    while x != right:
        o, p, n, s = by_origin[x.coords]
        ordered.append((o, p, n, s))
        x = o + n
    induced = from_pieces(ctx, left, [(n, p - o) for o, p, n, _ in ordered])
    if induced.r > f.r + 2:
        raise AssertionError(f"induced map exchanges {induced.r} > r + 2 intervals")
    if induced.r > f.r + 1:
        log.warning("induced map exchanges %d intervals, more than r + 1 = %d", induced.r, f.r + 1)
    pieces = tuple(ReturnPiece(o, n, s) for o, _, n, s in ordered)
    return InductionResult(induced, pieces, max(p.steps for p in pieces))


def keane_check(f: IET, depth: int):
    """Search forward orbits of the discontinuities for a discontinuity, up to ``depth`` steps."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    discs = f.discontinuities()
    targets = {d.coords: d for d in discs}
    for d in discs:
        x = d
        for step in range(1, depth + 1):
            x = apply(f, x)
            if x.coords in targets:
                return ViolatedAt(d, targets[x.coords], step)
    return SatisfiedUpTo(depth)


def check_saf_preserved(
    f: IET,
    left: ExternalReal | Scalar,
    right: ExternalReal | Scalar,
    cap: int = DEFAULT_INDUCE_CAP,
    keane_depth: int = 64,
) -> bool:
    """Whether ``SAF(f) == SAF(f_Y)`` on ``Y = [left, right)``.

    Equality is only guaranteed for minimal ``f``; a warning is logged when the
    Keane check does not attest it.
    """
    g, a, b = resolve_subinterval(f, left, right)
    if not isinstance(keane_check(g, keane_depth), SatisfiedUpTo) or g.is_identity():
        log.warning("minimality not attested for %s", f)
    result = induce(g, a, b, cap)
    return saf(g) == saf(result.induced)


def find_G1_inducing_subinterval(
    f: IET, cap: int = DEFAULT_INDUCE_CAP
) -> tuple[Scalar, Scalar] | None:
    """A subinterval ``[left, left + q*u)`` on which the first-return map lies in G_1,
    or ``None`` when ``SAF(f)`` is not a single wedge ``u ^ v``."""
    w = saf(f)
    if w.is_zero():
        return f.left, f.right
    uv = antisym_decompose(w.p, f.context)
    if uv is None:
        return None
    u, v = uv
    su, sv = u.sign(), v.sign()
    if su > 0 and sv < 0:
        u, v = -v, u
    elif su < 0 and sv > 0:
        u, v = v, -u
    elif su < 0 and sv < 0:
        u, v = -u, -v
    q = Fraction(1)
    while (u * q - f.length).sign() >= 0:
        q /= 2
    right = f.left + u * q
    induced = induce(f, f.left, right, cap).induced
    if not member_G1(induced).in_G1:
        raise AssertionError("first-return map on the constructed subinterval is not in G_1")
    return f.left, right
