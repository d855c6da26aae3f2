"""Random exact data for property tests."""
from __future__ import annotations

import functools
import random
from fractions import Fraction

from ietgroup.iet import IET, make_iet, rank_of_iet, reversal
from ietgroup.scalar import RATIONAL, BasisContext, Scalar

Q2 = BasisContext.quadratic(2)
Q5 = BasisContext.quadratic(5)
SYM23 = BasisContext.symbolic([2, 3])

CONTEXTS = {"rational": RATIONAL, "quadratic2": Q2, "quadratic5": Q5, "symbolic23": SYM23}


def _cmp(a: Scalar, b: Scalar) -> int:
    return int((a - b).sign())


def random_point(rng: random.Random, ctx: BasisContext, lo=0, hi=1) -> Scalar:
    """A scalar strictly inside ``(lo, hi)`` using every basis direction of ``ctx``."""
    lo = lo if isinstance(lo, Scalar) else ctx.scalar(lo)
    hi = hi if isinstance(hi, Scalar) else ctx.scalar(hi)
    flo, fhi = float(lo), float(hi)
    while True:
        coeffs = [Fraction(rng.randint(-6, 6), rng.randint(1, 8)) for _ in range(ctx.size - 1)]
        target = rng.uniform(flo, fhi)
        irr = sum(float(c) * float(ctx.unit(i + 1)) for i, c in enumerate(coeffs))
        a0 = Fraction(target - irr).limit_denominator(97)
        x = ctx.scalar(a0, *coeffs)
        if x > lo and x < hi:
            return x


def random_lengths(rng: random.Random, ctx: BasisContext, r: int, total=1) -> list[Scalar]:
    total = total if isinstance(total, Scalar) else ctx.scalar(total)
    cuts: list[Scalar] = []
    while len(cuts) < r - 1:
        x = random_point(rng, ctx, 0, total)
        if all(x != c for c in cuts):
            cuts.append(x)
    cuts.sort(key=functools.cmp_to_key(_cmp))
    pts = [ctx.zero()] + cuts + [total]
    return [b - a for a, b in zip(pts, pts[1:])]


def random_perm(rng: random.Random, r: int) -> list[int]:
    perm = list(range(1, r + 1))
    rng.shuffle(perm)
    return perm


def random_iet(rng: random.Random, ctx: BasisContext, rmax: int = 5, total=1, left=0) -> IET:
    r = rng.randint(2, rmax)
    return make_iet(ctx, left, random_lengths(rng, ctx, r, total), random_perm(rng, r))


def random_rational_iet(rng: random.Random, q: int, rmax: int = 5, left=0) -> IET:
    """IET on ``[left, left+1)`` whose lengths are multiples of ``1/q``."""
    r = rng.randint(1, min(rmax, q))
    cuts = sorted(rng.sample(range(1, q), r - 1))
    pts = [0] + cuts + [q]
    lengths = [Fraction(b - a, q) for a, b in zip(pts, pts[1:])]
    return make_iet(RATIONAL, left, lengths, random_perm(rng, r))


def random_reversal3(rng: random.Random, rank: int) -> IET:
    """Reversal 3-IET whose lengths span a space of the given dimension."""
    if rank == 1:
        ctx = rng.choice([RATIONAL, Q2, SYM23])
        lengths = [Fraction(rng.randint(1, 20), rng.randint(1, 12)) for _ in range(3)]
        return reversal(ctx, lengths)
    if rank == 2:
        choice = rng.randrange(3)
        if choice == 0:
            ctx = rng.choice([Q2, Q5])
            return reversal(ctx, random_lengths(rng, ctx, 3, Fraction(rng.randint(1, 5), rng.randint(1, 3))))
        if choice == 1:
            # lengths in span{sqrt(2), sqrt(3)} inside a three-dimensional context
            ctx = SYM23
            while True:
                lengths = [ctx.scalar(0, Fraction(rng.randint(-5, 5), rng.randint(1, 6)),
                                      Fraction(rng.randint(-5, 5), rng.randint(1, 6))) for _ in range(3)]
                if all(x.sign() > 0 for x in lengths):
                    f = reversal(ctx, lengths)
                    if rank_of_iet(f) == 2:
                        return f
        ctx = SYM23
        lengths = random_lengths(rng, Q2, 3)
        return reversal(ctx, [x.embed(ctx) for x in lengths])
    ctx = SYM23
    while True:
        f = reversal(ctx, random_lengths(rng, ctx, 3))
        if rank_of_iet(f) == 3:
            return f
