"""Brute-force cell permutations for IETs with rational data.

A rational IET permutes the ``q`` equal cells of its domain when every length
is a multiple of ``|X|/q``.  These routines work on such permutations directly
and serve as ground truth for composition, order and induction.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import NotCellAligned
from .iet import IET, apply

__all__ = ["CellPermutation", "to_cells", "brute_compose", "brute_order", "brute_induce"]


@dataclass(frozen=True)
class CellPermutation:
    q: int
    map: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.q < 1 or len(self.map) != self.q or sorted(self.map) != list(range(self.q)):
            raise ValueError("not a permutation of the cells")

    @classmethod
    def identity(cls, q: int) -> CellPermutation:
        return cls(q, tuple(range(q)))


def to_cells(f: IET, q: int) -> CellPermutation:
    """Cell permutation of ``f`` on ``q`` equal cells of its domain."""
    if not (f.left.is_rational() and f.length.is_rational()):
        raise NotCellAligned("domain is not rational")
    width = f.length.rational_value() / q
    for lam in f.lengths:
        if not lam.is_rational() or (lam.rational_value() / width).denominator != 1:
            raise NotCellAligned(f"length {lam} is not a multiple of the cell width {width}")
    left = f.left.rational_value()
    out = []
    for i in range(q):
        y = apply(f, f.context.scalar(left + i * width)).rational_value()
        j = (y - left) / width
        if j.denominator != 1:
            raise NotCellAligned("image of a cell is not a cell")
        out.append(int(j))
    return CellPermutation(q, tuple(out))


def brute_compose(a: CellPermutation, b: CellPermutation) -> CellPermutation:
    """``a o b`` (``b`` first)."""
    if a.q != b.q:
        raise NotCellAligned("cell counts differ")
    return CellPermutation(a.q, tuple(a.map[i] for i in b.map))


def brute_order(a: CellPermutation) -> int:
    """Smallest power of ``a`` that is the identity, by repeated application."""
    ident = tuple(range(a.q))
    power, n = a.map, 1
    while power != ident:
        power = tuple(a.map[i] for i in power)
        n += 1
    return n


def brute_induce(a: CellPermutation, lo: int, hi: int) -> tuple[CellPermutation, list[int]]:
    """First-return permutation on cells ``lo..hi-1`` (relabelled from 0) and return times."""
    if not 0 <= lo < hi <= a.q:
        raise NotCellAligned("cell range out of bounds")
    out, times = [], []
    for c in range(lo, hi):
        x, t = a.map[c], 1
        while not lo <= x < hi:
            x, t = a.map[x], t + 1
        out.append(x - lo)
        times.append(t)
    return CellPermutation(hi - lo, tuple(out)), times
