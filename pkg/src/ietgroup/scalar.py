"""Exact real numbers as rational coordinate vectors over a declared basis.

A :class:`BasisContext` fixes finitely many reals ``1 = v_0, v_1, ..., v_{n-1}``
that are (declared) linearly independent over Q.  A :class:`Scalar` is a
rational combination of them.  Equality is coordinate equality; the sign of a
nonzero scalar is decided exactly for rational and quadratic contexts and by
certified interval refinement for symbolic ones.
"""
from __future__ import annotations

import contextlib
import enum
import math
import re
from contextvars import ContextVar
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Union

from .errors import (
    AlreadyInSpan,
    AmbiguousSign,
    ContextMismatch,
    NotInSpan,
    NotRepresentable,
    ZeroScalar,
)

__all__ = [
    "Sign",
    "BasisEntry",
    "BasisContext",
    "Scalar",
    "Surd",
    "NamedReal",
    "BasisRef",
    "RATIONAL",
    "precision_cap",
    "current_precision_cap",
    "scalar_arith",
    "scalar_scale",
    "scalar_sign",
    "multiply",
    "divide",
    "context_express",
    "context_adjoin",
    "parse_real",
    "format_fraction",
    "parse_fraction",
]

START_BITS = 64
DEFAULT_PRECISION_CAP = 4096
MIN_SIGNIFICANT_DIGITS = 64
_RADICAL_DIGITS = 80

_precision_cap: ContextVar[int] = ContextVar("precision_cap", default=DEFAULT_PRECISION_CAP)


def current_precision_cap() -> int:
    return _precision_cap.get()


@contextlib.contextmanager
def precision_cap(bits: int) -> Iterator[None]:
    """Temporarily change the bit cap used when refining symbolic signs."""
    if bits < START_BITS:
        raise ValueError(f"precision cap must be at least {START_BITS} bits")
    token = _precision_cap.set(bits)
    try:
        yield
    finally:
        _precision_cap.reset(token)


class Sign(enum.IntEnum):
    NEGATIVE = -1
    ZERO = 0
    POSITIVE = 1


# ---------------------------------------------------------------------------
# small helpers


def format_fraction(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def parse_fraction(text: str) -> Fraction:
    """Parse ``"p/q"`` (or a bare integer); rejects floats and non-reduced forms."""
    if not isinstance(text, str):
        raise ValueError(f"rational must be a string, got {type(text).__name__}")
    m = re.fullmatch(r"\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*", text)
    if m is None:
        raise ValueError(f"not a rational 'p/q': {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator: {text!r}")
    q = Fraction(num, den)
    if m.group(2) is not None and (q.numerator != num or q.denominator != den):
        raise ValueError(f"rational not in lowest terms: {text!r}")
    return q


def _squarefree_part(n: int) -> tuple[int, int]:
    """Return ``(s, d)`` with ``n = s*s*d`` and ``d`` squarefree."""
    if n <= 0:
        raise ValueError("radicand must be positive")
    s, d, p = 1, 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            s *= p
        if n % p == 0:
            n //= p
            d *= p
        p += 1
    return s, d * n


def _is_squarefree(n: int) -> bool:
    return n > 1 and _squarefree_part(n)[0] == 1


def _radical_decimal(n: int, digits: int = _RADICAL_DIGITS) -> str:
    root = math.isqrt(n * 10 ** (2 * digits))
    s = str(root).rjust(digits + 1, "0")
    return f"{s[:-digits]}.{s[-digits:]}"


def _significant_digits(decimal: str) -> int:
    body = decimal.strip().lstrip("+-").replace(".", "")
    return len(body.lstrip("0"))


def _decimal_enclosure(decimal: str) -> tuple[Fraction, Fraction]:
    text = decimal.strip()
    if not re.fullmatch(r"[+-]?\d+(\.\d+)?", text):
        raise ValueError(f"malformed decimal: {decimal!r}")
    value = Fraction(text)
    places = len(text.split(".")[1]) if "." in text else 0
    ulp = Fraction(1, 10**places)
    return value - ulp, value + ulp


# ---------------------------------------------------------------------------
# contexts


@dataclass(frozen=True)
class BasisEntry:
    """One basis real.  ``radicand`` marks an entry known to equal ``sqrt(radicand)``,
    which lets sign refinement compute enclosures of any width."""

    name: str
    decimal: str
    radicand: int | None = None

    @classmethod
    def one(cls) -> BasisEntry:
        return cls("1", "1")

    @classmethod
    def radical(cls, d: int) -> BasisEntry:
        if not _is_squarefree(d):
            raise ValueError(f"radicand {d} is not a squarefree integer > 1")
        return cls(f"sqrt({d})", _radical_decimal(d), d)

    @classmethod
    def declared(cls, name: str, decimal: str) -> BasisEntry:
        """Entry from user input; names of the form ``sqrt(n)`` become exact radicals."""
        m = re.fullmatch(r"sqrt\((\d+)\)", name.strip())
        if m and _is_squarefree(int(m.group(1))):
            d = int(m.group(1))
            lo, hi = _decimal_enclosure(decimal)
            if not (lo * lo <= d <= hi * hi):
                raise ValueError(f"decimal for {name} is inconsistent with its value")
            return cls(name.strip(), decimal.strip(), d)
        return cls(name, decimal.strip())

    @property
    def is_one(self) -> bool:
        return self.name == "1" and self.radicand is None


@lru_cache(maxsize=4096)
def _entry_enclosure(entry: BasisEntry, bits: int) -> tuple[Fraction, Fraction]:
    if entry.is_one:
        return Fraction(1), Fraction(1)
    if entry.radicand is not None:
        scale = 1 << bits
        lo = math.isqrt(entry.radicand * scale * scale)
        return Fraction(lo, scale), Fraction(lo + 1, scale)
    return _decimal_enclosure(entry.decimal)


@dataclass(frozen=True)
class BasisContext:
    """Ordered basis of reals; entry 0 is always the constant 1."""

    kind: str
    entries: tuple[BasisEntry, ...]
    d: int | None = None

    def __post_init__(self) -> None:
        if not self.entries or not self.entries[0].is_one:
            raise ValueError("basis entry 0 must be the constant 1")
        if self.kind == "rational":
            if len(self.entries) != 1:
                raise ValueError("rational context has exactly one entry")
        elif self.kind == "quadratic":
            if self.d is None or not _is_squarefree(self.d):
                raise ValueError("quadratic context needs a squarefree d > 1")
            if len(self.entries) != 2 or self.entries[1].radicand != self.d:
                raise ValueError(f"quadratic context must be {{1, sqrt({self.d})}}")
        elif self.kind == "symbolic":
            names = [e.name for e in self.entries]
            if len(set(names)) != len(names):
                raise ValueError("duplicate basis entry names")
            radicands = [e.radicand for e in self.entries if e.radicand is not None]
            if len(set(radicands)) != len(radicands):
                raise ValueError("duplicate radical entries")
            for e in self.entries[1:]:
                if e.is_one:
                    raise ValueError("only entry 0 may be the constant 1")
                if _significant_digits(e.decimal) < MIN_SIGNIFICANT_DIGITS:
                    raise ValueError(
                        f"entry {e.name!r} needs a decimal with at least "
                        f"{MIN_SIGNIFICANT_DIGITS} significant digits"
                    )
        else:
            raise ValueError(f"unknown context kind {self.kind!r}")

    @classmethod
    def rational(cls) -> BasisContext:
        return RATIONAL

    @classmethod
    def quadratic(cls, d: int) -> BasisContext:
        return cls("quadratic", (BasisEntry.one(), BasisEntry.radical(d)), d)

    @classmethod
    def symbolic(cls, entries: Iterable[BasisEntry | int]) -> BasisContext:
        """Symbolic context over ``1`` plus ``entries``; ints stand for radicals."""
        rest = [BasisEntry.radical(e) if isinstance(e, int) else e for e in entries]
        return cls("symbolic", (BasisEntry.one(), *rest))

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def names(self) -> list[str]:
        return [e.name for e in self.entries]

    def index_of(self, name: str) -> int | None:
        for i, e in enumerate(self.entries):
            if e.name == name:
                return i
        return None

    def scalar(self, *coords) -> Scalar:
        """Scalar from coordinates; missing trailing coordinates are zero."""
        if len(coords) > self.size:
            raise ValueError(f"{len(coords)} coordinates for a context of size {self.size}")
        full = [Fraction(c) for c in coords] + [Fraction(0)] * (self.size - len(coords))
        return Scalar(self, tuple(full))

    def zero(self) -> Scalar:
        return Scalar(self, (Fraction(0),) * self.size)

    def unit(self, i: int) -> Scalar:
        coords = [Fraction(0)] * self.size
        coords[i] = Fraction(1)
        return Scalar(self, tuple(coords))

    def is_prefix_of(self, other: BasisContext) -> bool:
        return other.entries[: self.size] == self.entries

    def __str__(self) -> str:
        return "{" + ", ".join(self.names) + "}"


RATIONAL = BasisContext("rational", (BasisEntry.one(),))


# ---------------------------------------------------------------------------
# scalars


def _same(a: BasisContext, b: BasisContext) -> bool:
    return a is b or a == b


@dataclass(frozen=True, repr=False)
class Scalar:
    context: BasisContext
    coords: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.coords) != self.context.size:
            raise ValueError(
                f"{len(self.coords)} coordinates for a context of size {self.context.size}"
            )
        if not all(type(c) is Fraction for c in self.coords):
            object.__setattr__(self, "coords", tuple(Fraction(c) for c in self.coords))

    def _check(self, other: Scalar) -> None:
        if not _same(self.context, other.context):
            raise ContextMismatch(f"scalars from {self.context} and {other.context}")

    def _coerce(self, other) -> Scalar | None:
        if isinstance(other, Scalar):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.context.scalar(other)
        return None

    def __add__(self, other) -> Scalar:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return Scalar(self.context, tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __sub__(self, other) -> Scalar:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return Scalar(self.context, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __rsub__(self, other) -> Scalar:
        return -self + other

    def __neg__(self) -> Scalar:
        return Scalar(self.context, tuple(-a for a in self.coords))

    def __mul__(self, q) -> Scalar:
        if isinstance(q, Scalar):
            return multiply(self, q)
        if not isinstance(q, (int, Fraction)):
            return NotImplemented
        q = Fraction(q)
        return Scalar(self.context, tuple(a * q for a in self.coords))

    __rmul__ = __mul__

    def __truediv__(self, q) -> Scalar:
        if isinstance(q, Scalar):
            return divide(self, q)
        if not isinstance(q, (int, Fraction)):
            return NotImplemented
        if q == 0:
            raise ZeroDivisionError("scalar division by zero")
        return self * (1 / Fraction(q))

    def __lt__(self, other) -> bool:
        return (self - other).sign() < 0

    def __le__(self, other) -> bool:
        return (self - other).sign() <= 0

    def __gt__(self, other) -> bool:
        return (self - other).sign() > 0

    def __ge__(self, other) -> bool:
        return (self - other).sign() >= 0

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coords[0]

    def sign(self) -> Sign:
        return scalar_sign(self)

    def enclosure(self, bits: int = START_BITS) -> tuple[Fraction, Fraction]:
        """Rational interval certainly containing the represented real."""
        lo = hi = Fraction(0)
        for c, entry in zip(self.coords, self.context.entries):
            if not c:
                continue
            elo, ehi = _entry_enclosure(entry, bits)
            if c > 0:
                lo += c * elo
                hi += c * ehi
            else:
                lo += c * ehi
                hi += c * elo
        return lo, hi

    def __float__(self) -> float:
        lo, hi = self.enclosure()
        return float((lo + hi) / 2)

    def embed(self, ctx: BasisContext) -> Scalar:
        """Re-express in a context whose basis extends this one."""
        if _same(ctx, self.context):
            return self
        if not self.context.is_prefix_of(ctx):
            raise ContextMismatch(f"{self.context} does not embed into {ctx}")
        return Scalar(ctx, self.coords + (Fraction(0),) * (ctx.size - self.context.size))

    def __repr__(self) -> str:
        return f"Scalar({self})"

    def __str__(self) -> str:
        parts = []
        for c, name in zip(self.coords, self.context.names):
            if not c:
                continue
            if name == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(name)
            elif c == -1:
                parts.append(f"-{name}")
            else:
                parts.append(f"{c}*{name}")
        if not parts:
            return "0"
        return " + ".join(parts).replace("+ -", "- ")


def scalar_arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    raise ValueError(f"unknown operation {op!r}")


def scalar_scale(a: Scalar, q) -> Scalar:
    return a * Fraction(q)


def _sign_of(x: Fraction) -> Sign:
    return Sign.POSITIVE if x > 0 else Sign.NEGATIVE if x < 0 else Sign.ZERO


def _quadratic_sign(a: Fraction, b: Fraction, d: int) -> Sign:
    sa, sb = _sign_of(a), _sign_of(b)
    if sb == 0:
        return sa
    if sa == 0:
        return sb
    if sa == sb:
        return sa
    # opposite signs: compare a^2 with b^2 d; never equal since sqrt(d) is irrational
    return sa if a * a > b * b * d else sb


def scalar_sign(a: Scalar, cap: int | None = None) -> Sign:
    """Exact sign of the real represented by ``a``."""
    if a.is_zero():
        return Sign.ZERO
    if a.is_rational():
        return _sign_of(a.coords[0])
    ctx = a.context
    if ctx.kind == "quadratic":
        return _quadratic_sign(a.coords[0], a.coords[1], ctx.d)
    nonzero = [e for c, e in zip(a.coords, ctx.entries) if c]
    if len(nonzero) == 1:
        lo, hi = _entry_enclosure(nonzero[0], START_BITS)
        c = next(c for c in a.coords if c)
        if lo > 0:
            return _sign_of(c)
        if hi < 0:
            return Sign(-_sign_of(c))
    if cap is None:
        cap = current_precision_cap()
    refinable = any(e.radicand is not None for e in nonzero)
    bits = START_BITS
    while True:
        lo, hi = a.enclosure(bits)
        if lo > 0:
            return Sign.POSITIVE
        if hi < 0:
            return Sign.NEGATIVE
        if bits >= cap or not refinable:
            raise AmbiguousSign(
                f"could not separate {a} from zero with {bits}-bit enclosures"
            )
        bits = min(2 * bits, cap)


def multiply(a: Scalar, b: Scalar) -> Scalar:
    """Product of two scalars, when it is representable in their context."""
    a._check(b)
    if b.is_rational():
        return a * b.coords[0]
    if a.is_rational():
        return b * a.coords[0]
    if a.context.kind == "quadratic":
        d = a.context.d
        a0, a1 = a.coords
        b0, b1 = b.coords
        return Scalar(a.context, (a0 * b0 + a1 * b1 * d, a0 * b1 + a1 * b0))
    raise NotRepresentable(f"product of {a} and {b} has no coordinates in {a.context}")


def divide(a: Scalar, b: Scalar) -> Scalar:
    a._check(b)
    if b.is_zero():
        raise ZeroScalar("division by a zero scalar")
    if b.is_rational():
        return a / b.coords[0]
    if a.context.kind == "quadratic":
        d = a.context.d
        b0, b1 = b.coords
        norm = b0 * b0 - b1 * b1 * d
        return multiply(a, Scalar(a.context, (b0 / norm, -b1 / norm)))
    # a rational multiple of b divides exactly in any context
    k = next(i for i, c in enumerate(b.coords) if c)
    ratio = a.coords[k] / b.coords[k]
    if a == b * ratio:
        return a.context.scalar(ratio)
    raise NotRepresentable(f"quotient of {a} by {b} has no coordinates in {a.context}")


# ---------------------------------------------------------------------------
# external reals


@dataclass(frozen=True)
class Surd:
    """The real ``a + b*sqrt(d)``; normalized so that ``d`` is squarefree."""

    a: Fraction
    b: Fraction
    d: int

    def __post_init__(self) -> None:
        a, b = Fraction(self.a), Fraction(self.b)
        s, d = _squarefree_part(self.d)
        b *= s
        if d == 1:
            a, b = a + b, Fraction(0)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)


@dataclass(frozen=True)
class NamedReal:
    """An opaque constant given by name and a high-precision decimal."""

    name: str
    decimal: str


@dataclass(frozen=True)
class BasisRef:
    name: str


ExternalReal = Union[int, Fraction, Surd, NamedReal, BasisRef]


def context_express(ctx: BasisContext, value: ExternalReal) -> Scalar:
    """Coordinates of ``value`` in ``ctx``; raises :class:`NotInSpan` if it has none."""
    if isinstance(value, (int, Fraction)):
        return ctx.scalar(Fraction(value))
    if isinstance(value, Surd):
        if value.b == 0:
            return ctx.scalar(value.a)
        for i, e in enumerate(ctx.entries):
            if e.radicand == value.d:
                coords = [Fraction(0)] * ctx.size
                coords[0] = value.a
                coords[i] = value.b
                return Scalar(ctx, tuple(coords))
        raise NotInSpan(f"sqrt({value.d}) is not in the span of {ctx}")
    if isinstance(value, (NamedReal, BasisRef)):
        i = ctx.index_of(value.name)
        if i is None:
            raise NotInSpan(f"{value.name} is not a basis entry of {ctx}")
        return ctx.unit(i)
    raise TypeError(f"cannot express {value!r}")


def context_adjoin(
    ctx: BasisContext, value: ExternalReal
) -> tuple[BasisContext, Callable[[Scalar], Scalar]]:
    """Extend ``ctx`` by a new independent basis entry so that ``value`` is expressible.

    For a surd ``a + b*sqrt(d)`` the adjoined entry is ``sqrt(d)`` itself.
    Returns the new symbolic context and the embedding of old scalars.
    """
    try:
        context_express(ctx, value)
    except NotInSpan:
        pass
    else:
        raise AlreadyInSpan(f"{value!r} is already expressible in {ctx}")
    if isinstance(value, Surd):
        entry = BasisEntry.radical(value.d)
    elif isinstance(value, NamedReal):
        entry = BasisEntry.declared(value.name, value.decimal)
    else:
        raise NotInSpan(f"cannot adjoin {value!r}: no value known")
    new = BasisContext("symbolic", ctx.entries + (entry,))
    return new, lambda s: s.embed(new)


_TERM = re.compile(
    r"""
    (?P<sign>[+-])?\s*
    (?:
        (?:(?P<coef>\d+(?:/\d+)?)\s*\*\s*)?sqrt\(\s*(?P<rad>\d+)\s*\)(?:\s*/\s*(?P<den>\d+))?
      | (?P<rat>\d+(?:/\d+)?)
    )\s*
    """,
    re.VERBOSE,
)


def parse_real(text: str) -> Fraction | Surd:
    """Parse ``"3/4"``, ``"sqrt(2)-1"``, ``"1/2 + 3*sqrt(5)/4"`` and similar."""
    s = text.strip()
    if not s:
        raise ValueError("empty real")
    pos, a, b, d = 0, Fraction(0), Fraction(0), None
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None or m.end() == pos or (pos > 0 and m.group("sign") is None):
            raise ValueError(f"cannot parse real {text!r} at offset {pos}")
        sign = -1 if m.group("sign") == "-" else 1
        if m.group("rat") is not None:
            a += sign * Fraction(m.group("rat"))
        else:
            rad = int(m.group("rad"))
            coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
            if m.group("den"):
                coef /= int(m.group("den"))
            if d is not None and d != rad:
                raise ValueError(f"only one radical allowed in {text!r}")
            d = rad
            b += sign * coef
        pos = m.end()
    if d is None:
        return a
    return Surd(a, b, d)
