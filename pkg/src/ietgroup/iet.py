"""Interval exchange transformations with exact scalar data.

An r-IET on ``X = [left, left + |X|)`` cuts ``X`` into consecutive source
intervals of lengths ``lengths[0..r-1]`` and places source interval ``k`` at
target slot ``perm[k]`` (1-based).  Adjacent source intervals that stay
adjacent in the image are merged on construction, so an r-IET always has
exactly ``r - 1`` discontinuities and equality of IETs is equality of fields.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    ContextMismatch,
    DomainMismatch,
    InvalidPermutation,
    NonPositiveLength,
    OutOfDomain,
)
from .linalg import QMatrix, qmat_rank
from .scalar import BasisContext, Scalar, Sign

__all__ = [
    "IET",
    "PointLocation",
    "make_iet",
    "identity",
    "rotation",
    "reversal",
    "translation_constants",
    "locate",
    "apply",
    "compose",
    "inverse",
    "conjugate_affine",
    "order",
    "rank_of_iet",
    "embed_iet",
    "from_pieces",
]


@dataclass(frozen=True)
class IET:
    context: BasisContext
    left: Scalar
    lengths: tuple[Scalar, ...]
    perm: tuple[int, ...]
    gammas: tuple[Scalar, ...]
    length: Scalar

    @property
    def r(self) -> int:
        return len(self.lengths)

    @property
    def right(self) -> Scalar:
        return self.left + self.length

    def is_identity(self) -> bool:
        return self.r == 1

    def starts(self) -> list[Scalar]:
        """Left endpoints of the source intervals."""
        out, x = [], self.left
        for lam in self.lengths:
            out.append(x)
            x = x + lam
        return out

    def discontinuities(self) -> list[Scalar]:
        return self.starts()[1:]

    def same_domain(self, other: IET) -> bool:
        return self.left == other.left and self.length == other.length

    def __str__(self) -> str:
        lens = ", ".join(str(x) for x in self.lengths)
        return f"IET on [{self.left}, {self.right}) lengths ({lens}) perm {self.perm}"


@dataclass(frozen=True)
class PointLocation:
    index: int
    offset: Scalar


def _check_perm(perm: Sequence[int], r: int) -> tuple[int, ...]:
    perm = tuple(int(p) for p in perm)
    if len(perm) != r or sorted(perm) != list(range(1, r + 1)):
        raise InvalidPermutation(f"{list(perm)} is not a permutation of 1..{r}")
    return perm


def _canonicalize(
    lengths: list[Scalar], perm: tuple[int, ...]
) -> tuple[list[Scalar], tuple[int, ...]]:
    groups: list[list[int]] = [[0]]
    for k in range(1, len(perm)):
        if perm[k] == perm[k - 1] + 1:
            groups[-1].append(k)
        else:
            groups.append([k])
    if len(groups) == len(perm):
        return lengths, perm
    new_lengths = []
    for g in groups:
        total = lengths[g[0]]
        for k in g[1:]:
            total = total + lengths[k]
        new_lengths.append(total)
    heads = [perm[g[0]] for g in groups]
    ranks = {t: i + 1 for i, t in enumerate(sorted(heads))}
    return new_lengths, tuple(ranks[t] for t in heads)


def translation_constants(lengths: Sequence[Scalar], perm: Sequence[int]) -> list[Scalar]:
    """``gamma_k = (sum of lengths placed before k) - (sum of lengths before k)``."""
    r = len(lengths)
    if r == 0:
        return []
    zero = lengths[0].context.zero()
    by_target = sorted(range(r), key=lambda k: perm[k])
    target_start = [zero] * r
    acc = zero
    for k in by_target:
        target_start[k] = acc
        acc = acc + lengths[k]
    out, acc = [], zero
    for k in range(r):
        out.append(target_start[k] - acc)
        acc = acc + lengths[k]
    return out


def _as_scalar(ctx: BasisContext, x) -> Scalar:
    if isinstance(x, Scalar):
        if x.context != ctx:
            raise ContextMismatch(f"scalar from {x.context} used in {ctx}")
        return x
    return ctx.scalar(Fraction(x))


def make_iet(
    ctx: BasisContext,
    left,
    lengths: Iterable,
    perm: Sequence[int],
) -> IET:
    """Validated, canonical IET.  Rational numbers are accepted for any scalar."""
    left = ctx.zero() if left is None else _as_scalar(ctx, left)
    lengths = [_as_scalar(ctx, lam) for lam in lengths]
    if not lengths:
        raise InvalidPermutation("an IET needs at least one interval")
    perm = _check_perm(perm, len(lengths))
    for k, lam in enumerate(lengths):
        if lam.sign() != Sign.POSITIVE:
            raise NonPositiveLength(f"length {k + 1} is {lam}, not positive")
    lengths, perm = _canonicalize(lengths, perm)
    total = ctx.zero()
    for lam in lengths:
        total = total + lam
    gammas = translation_constants(lengths, perm)
    return IET(ctx, left, tuple(lengths), perm, tuple(gammas), total)


def identity(ctx: BasisContext, length=1, left=0) -> IET:
    return make_iet(ctx, left, [length], [1])


def rotation(ctx: BasisContext, shift, length=1, left=0) -> IET:
    """``x -> x + shift`` modulo ``length`` on ``[left, left + length)``; needs ``0 <= shift < length``."""
    shift = _as_scalar(ctx, shift)
    length = _as_scalar(ctx, length)
    if shift.is_zero():
        return identity(ctx, length, left)
    return make_iet(ctx, left, [length - shift, shift], [2, 1])


def reversal(ctx: BasisContext, lengths: Sequence, left=0) -> IET:
    """The IET reversing the order of its intervals (permutation ``(r, ..., 1)``)."""
    r = len(lengths)
    return make_iet(ctx, left, lengths, list(range(r, 0, -1)))


def locate(f: IET, x: Scalar) -> PointLocation:
    offset = x - f.left
    if offset.sign() < 0:
        raise OutOfDomain(f"{x} lies left of the domain of {f}")
    for k, lam in enumerate(f.lengths):
        rest = offset - lam
        if rest.sign() < 0:
            return PointLocation(k, offset)
        offset = rest
    raise OutOfDomain(f"{x} lies right of the domain of {f}")


def apply(f: IET, x) -> Scalar:
    x = _as_scalar(f.context, x)
    return x + f.gammas[locate(f, x).index]


def from_pieces(
    ctx: BasisContext, left: Scalar, pieces: Sequence[tuple[Scalar, Scalar]]
) -> IET:
    """IET from consecutive source pieces given as ``(length, translation)``.

    The images must tile the domain; the permutation is read off by chaining
    image intervals, which needs only exact coordinate equality.
    """
    starts: dict[tuple, int] = {}
    x = left
    images = []
    for k, (lam, tr) in enumerate(pieces):
        img = x + tr
        images.append(img)
        if img.coords in starts:
            raise AssertionError("two pieces share an image start")
        starts[img.coords] = k
        x = x + lam
    end = x
    perm = [0] * len(pieces)
    y = left
    for slot in range(1, len(pieces) + 1):
        k = starts.get(y.coords)
        if k is None:
            raise AssertionError("piece images do not tile the domain")
        perm[k] = slot
        y = y + pieces[k][0]
    if y != end:
        raise AssertionError("piece images do not tile the domain")
    return make_iet(ctx, left, [lam for lam, _ in pieces], perm)


def compose(f: IET, g: IET) -> IET:
    """``f o g`` (``g`` applied first)."""
    if f.context != g.context:
        raise ContextMismatch(f"IETs over {f.context} and {g.context}")
    if not f.same_domain(g):
        raise DomainMismatch("compose needs IETs on the same interval")
    pieces: list[tuple[Scalar, Scalar]] = []
    for lam, gam, start in zip(g.lengths, g.gammas, g.starts()):
        loc = locate(f, start + gam)
        m, offset, remaining = loc.index, loc.offset, lam
        while True:
            avail = f.lengths[m] - offset
            diff = remaining - avail
            if diff.sign() <= 0:
                pieces.append((remaining, gam + f.gammas[m]))
                break
            pieces.append((avail, gam + f.gammas[m]))
            remaining = diff
            m, offset = m + 1, f.context.zero()
    return from_pieces(f.context, f.left, pieces)


def inverse(f: IET) -> IET:
    sigma = sorted(range(f.r), key=lambda k: f.perm[k])
    return make_iet(f.context, f.left, [f.lengths[k] for k in sigma], [k + 1 for k in sigma])


def conjugate_affine(f: IET, left: Scalar, length: Scalar) -> IET:
    """Transport ``f`` to ``[left, left + length)`` by the increasing affine map.

    The ratio ``length / |X|`` must be representable: rational, or any ratio in
    a quadratic context.
    """
    left = _as_scalar(f.context, left)
    length = _as_scalar(f.context, length)
    if length.sign() != Sign.POSITIVE:
        raise NonPositiveLength(f"target interval length {length} is not positive")
    ratio = length / f.length
    return make_iet(f.context, left, [lam * ratio for lam in f.lengths], f.perm)


def _rational_cells(f: IET) -> list[int] | None:
    """Cell permutation induced on ``|X|*q`` equal cells when every length is rational."""
    if not all(lam.is_rational() for lam in f.lengths):
        return None
    values = [lam.rational_value() for lam in f.lengths]
    q = math.lcm(*(v.denominator for v in values))
    units = [int(v * q) for v in values]
    gammas = [int(g.rational_value() * q) for g in f.gammas]
    cells = [0] * sum(units)
    pos = 0
    for u, g in zip(units, gammas):
        for i in range(pos, pos + u):
            cells[i] = i + g
        pos += u
    return cells


def _cycle_order(cells: list[int]) -> int:
    seen = [False] * len(cells)
    n = 1
    for i in range(len(cells)):
        if seen[i]:
            continue
        length, j = 0, i
        while not seen[j]:
            seen[j] = True
            j = cells[j]
            length += 1
        n = math.lcm(n, length)
    return n


def order(f: IET, cap: int) -> int | None:
    """Least ``n >= 1`` with ``f**n`` the identity, or ``None`` if ``n > cap``."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    if f.is_identity():
        return 1
    cells = _rational_cells(f)
    if cells is not None:
        n = _cycle_order(cells)
        return n if n <= cap else None
    from .saf import saf

    if not saf(f).is_zero():
        return None  # elements of finite order have vanishing SAF
    power = f
    for n in range(2, cap + 1):
        power = compose(f, power)
        if power.is_identity():
            return n
    return None


def rank_of_iet(f: IET) -> int:
    return qmat_rank(QMatrix.from_rows(lam.coords for lam in f.lengths))


def embed_iet(f: IET, ctx: BasisContext) -> IET:
    """The same IET with its data re-expressed in an extension of its context."""
    if ctx == f.context:
        return f
    return IET(
        ctx,
        f.left.embed(ctx),
        tuple(x.embed(ctx) for x in f.lengths),
        f.perm,
        tuple(x.embed(ctx) for x in f.gammas),
        f.length.embed(ctx),
    )
