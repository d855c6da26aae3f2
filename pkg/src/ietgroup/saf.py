"""The Sah-Arnoux-Fathi invariant and membership in G_per and G_1.

A bivector over a basis ``v_0, ..., v_{n-1}`` is stored as its full
antisymmetric coefficient matrix ``p``: the element is
``sum_{i<j} p[i, j] v_i ^ v_j``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ContextMismatch, NonPositiveLength, NotInG1, NotInKX, ZeroScalar
from .iet import IET, compose, identity, inverse, make_iet
from .linalg import QMatrix, complete_basis_with_first, congruence, inverse as qinverse
from .scalar import BasisContext, Scalar, Sign

__all__ = [
    "WedgeElement",
    "MembershipReport",
    "wedge",
    "saf",
    "saf_3iet_closed_form",
    "normalize_against",
    "in_K_of",
    "member_Gper",
    "member_G1",
    "rotation_with_saf",
    "factor_through_rotation",
]


@dataclass(frozen=True)
class WedgeElement:
    context: BasisContext
    p: QMatrix

    def __post_init__(self) -> None:
        if self.p.rows != self.context.size or not self.p.is_antisymmetric():
            raise ValueError("wedge coefficients must form an antisymmetric n x n matrix")

    @classmethod
    def zero(cls, ctx: BasisContext) -> WedgeElement:
        return cls(ctx, QMatrix.zeros(ctx.size, ctx.size))

    def _check(self, other: WedgeElement) -> None:
        if self.context != other.context:
            raise ContextMismatch(f"bivectors over {self.context} and {other.context}")

    def __add__(self, other: WedgeElement) -> WedgeElement:
        self._check(other)
        return WedgeElement(self.context, self.p + other.p)

    def __neg__(self) -> WedgeElement:
        return WedgeElement(self.context, -self.p)

    def __sub__(self, other: WedgeElement) -> WedgeElement:
        return self + (-other)

    def __mul__(self, q) -> WedgeElement:
        q = Fraction(q)
        return WedgeElement(self.context, QMatrix(self.p.rows, self.p.cols, tuple(x * q for x in self.p.data)))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.p.is_zero()

    def coefficient(self, i: int, j: int) -> Fraction:
        return self.p[i, j]

    def entries(self) -> list[tuple[int, int, Fraction]]:
        """Nonzero ``(i, j, p_ij)`` with ``i < j`` (0-based), lexicographic."""
        n = self.p.rows
        return [(i, j, self.p[i, j]) for i in range(n) for j in range(i + 1, n) if self.p[i, j]]

    def embed(self, ctx: BasisContext) -> WedgeElement:
        if ctx == self.context:
            return self
        if not self.context.is_prefix_of(ctx):
            raise ContextMismatch(f"{self.context} does not embed into {ctx}")
        n, m = self.context.size, ctx.size
        rows = [[self.p[i, j] if i < n and j < n else 0 for j in range(m)] for i in range(m)]
        return WedgeElement(ctx, QMatrix.from_rows(rows))

    def __str__(self) -> str:
        names = self.context.names
        terms = [f"{c}*({names[i]} ^ {names[j]})" for i, j, c in self.entries()]
        return " + ".join(terms) if terms else "0"


@dataclass
class MembershipReport:
    in_Gper: bool
    in_G1: bool
    saf: WedgeElement
    obstruction: list[tuple[int, int, Fraction]] = field(default_factory=list)
    factorization: tuple[IET, IET, IET] | None = None


def wedge(u: Scalar, v: Scalar) -> WedgeElement:
    if u.context != v.context:
        raise ContextMismatch(f"scalars from {u.context} and {v.context}")
    a, b = u.coords, v.coords
    n = len(a)
    return WedgeElement(
        u.context, QMatrix.from_rows([[a[i] * b[j] - a[j] * b[i] for j in range(n)] for i in range(n)])
    )


def saf(f: IET) -> WedgeElement:
    """``sum_k lambda_k (x) gamma_k``, checked to be antisymmetric and stored as a bivector."""
    n = f.context.size
    m = [[Fraction(0)] * n for _ in range(n)]
    for lam, gam in zip(f.lengths, f.gammas):
        for i, a in enumerate(lam.coords):
            if a:
                row = m[i]
                for j, b in enumerate(gam.coords):
                    if b:
                        row[j] += a * b
    for i in range(n):
        for j in range(i, n):
            if m[i][j] != -m[j][i]:
                raise AssertionError("SAF tensor has a nonvanishing symmetric part")
    # u^v = u(x)v - v(x)u, so the coefficient of v_i ^ v_j (i<j) is the tensor entry m[i][j]
    return WedgeElement(f.context, QMatrix.from_rows(m))


def saf_3iet_closed_form(lam1: Scalar, lam3: Scalar, total: Scalar) -> WedgeElement:
    """SAF of the reversal 3-IET from its outer lengths and domain length:
    ``|X| ^ (lam3 - lam1) - lam1 ^ lam3``."""
    for name, x in (("lambda_1", lam1), ("lambda_3", lam3), ("lambda_2", total - lam1 - lam3)):
        if x.sign() != Sign.POSITIVE:
            raise NonPositiveLength(f"{name} = {x} is not positive")
    return wedge(total, lam3 - lam1) - wedge(lam1, lam3)


def normalize_against(w: WedgeElement, s: Scalar) -> tuple[QMatrix, QMatrix]:
    """Coefficients of ``w`` in a basis whose first vector is ``s``.

    Returns ``(p', T)`` where the columns of ``T`` are the new basis vectors in
    old coordinates.
    """
    if s.context != w.context:
        raise ContextMismatch(f"{s} is not in {w.context}")
    if s.is_zero():
        raise ZeroScalar("cannot normalize against zero")
    t = complete_basis_with_first(s.coords)
    return congruence(w.p, qinverse(t)), t


def _obstruction(p: QMatrix) -> list[tuple[int, int, Fraction]]:
    n = p.rows
    return [(i, j, p[i, j]) for i in range(1, n) for j in range(i + 1, n) if p[i, j]]


def in_K_of(w: WedgeElement, s: Scalar) -> bool:
    """Whether ``w = s ^ t`` for some real ``t`` in the span of the basis."""
    p, _ = normalize_against(w, s)
    return not _obstruction(p)


def member_Gper(f: IET) -> bool:
    return saf(f).is_zero()


def member_G1(f: IET, factor: bool = False) -> MembershipReport:
    w = saf(f)
    p, _ = normalize_against(w, f.length)
    obstruction = [(i + 1, j + 1, c) for i, j, c in _obstruction(p)]
    report = MembershipReport(
        in_Gper=w.is_zero(), in_G1=not obstruction, saf=w, obstruction=obstruction
    )
    if factor and report.in_G1:
        report.factorization = factor_through_rotation(f)
    return report


def _floor_ratio(t: Scalar, x: Scalar) -> int:
    """``floor(t / x)`` for positive ``x`` with ``t / x`` irrational."""
    bits = 64
    while True:
        tlo, thi = t.enclosure(bits)
        xlo, xhi = x.enclosure(bits)
        if xlo > 0:
            cands = [tlo / xlo, tlo / xhi, thi / xlo, thi / xhi]
            lo, hi = math.floor(min(cands)), math.floor(max(cands))
            if lo == hi:
                return lo
        bits *= 2
        if bits > 1 << 16:
            break
    # fall back to exact sign search around the float estimate
    k = math.floor(float(t) / float(x))
    while (t - x * k).sign() < 0:
        k -= 1
    while (t - x * (k + 1)).sign() >= 0:
        k += 1
    return k


def rotation_with_saf(left: Scalar, length: Scalar, target: WedgeElement) -> IET:
    """A rotation of ``[left, left + length)`` whose SAF is exactly ``target``."""
    ctx = target.context
    if target.is_zero():
        return identity(ctx, length, left)
    p, t_basis = normalize_against(target, length)
    if _obstruction(p):
        raise NotInKX("target is not of the form |X| ^ t")
    # target = b_1 ^ sum_j p'[0, j] b_j
    tcoords = [Fraction(0)] + [p[0, j] for j in range(1, ctx.size)]
    t = Scalar(ctx, tuple(sum(t_basis[i, j] * tcoords[j] for j in range(ctx.size)) for i in range(ctx.size)))
    r = -_floor_ratio(t, length)
    lam1 = length * r + t
    if lam1.sign() != Sign.POSITIVE or (length - lam1).sign() != Sign.POSITIVE:
        raise AssertionError("rotation length outside (0, |X|)")
    for lengths in ([length - lam1, lam1], [lam1, length - lam1]):
        g = make_iet(ctx, left, lengths, [2, 1])
        if saf(g) == target:
            return g
    raise AssertionError("neither rotation orientation reproduces the target SAF")


def factor_through_rotation(f: IET) -> tuple[IET, IET, IET]:
    """``(g, h1, h2)`` with ``g`` a rotation, ``f = g o h2 = h1 o g`` and ``SAF(h1) = SAF(h2) = 0``."""
    w = saf(f)
    p, _ = normalize_against(w, f.length)
    if _obstruction(p):
        raise NotInG1("SAF(f) is not in K(|X|)")
    g = rotation_with_saf(f.left, f.length, w)
    g_inv = inverse(g)
    h2 = compose(g_inv, f)
    h1 = compose(f, g_inv)
    if compose(g, h2) != f or compose(h1, g) != f:
        raise AssertionError("factorization does not reproduce f")
    if not (saf(h1).is_zero() and saf(h2).is_zero()):
        raise AssertionError("factors h1, h2 have nonzero SAF")
    return g, h1, h2
