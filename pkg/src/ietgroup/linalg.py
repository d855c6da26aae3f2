"""Exact linear algebra over Q on small dense matrices."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import NotAntisymmetric, ZeroVector
from .scalar import BasisContext, Scalar

__all__ = [
    "QMatrix",
    "qmat_rank",
    "rref",
    "determinant",
    "inverse",
    "complete_basis_with_first",
    "antisym_decompose",
    "congruence",
    "wedge_matrix",
]


@dataclass(frozen=True)
class QMatrix:
    rows: int
    cols: int
    data: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0 or len(self.data) != self.rows * self.cols:
            raise ValueError("matrix dimensions do not match data length")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence]) -> QMatrix:
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), ncols, tuple(Fraction(x) for r in rows for x in r))

    @classmethod
    def from_columns(cls, cols: Iterable[Sequence]) -> QMatrix:
        return cls.from_rows(zip(*cols))

    @classmethod
    def identity(cls, n: int) -> QMatrix:
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> QMatrix:
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.data[i * self.cols + j]

    def to_rows(self) -> list[list[Fraction]]:
        c = self.cols
        return [list(self.data[i * c:(i + 1) * c]) for i in range(self.rows)]

    def row(self, i: int) -> list[Fraction]:
        return list(self.data[i * self.cols:(i + 1) * self.cols])

    def column(self, j: int) -> list[Fraction]:
        return [self.data[i * self.cols + j] for i in range(self.rows)]

    def transpose(self) -> QMatrix:
        return QMatrix.from_rows(zip(*self.to_rows())) if self.rows else QMatrix(self.cols, 0, ())

    def __matmul__(self, other: QMatrix) -> QMatrix:
        if self.cols != other.rows:
            raise ValueError("incompatible shapes for matrix product")
        a, bt = self.to_rows(), other.transpose().to_rows()
        return QMatrix.from_rows([[sum(x * y for x, y in zip(r, c)) for c in bt] for r in a])

    def __neg__(self) -> QMatrix:
        return QMatrix(self.rows, self.cols, tuple(-x for x in self.data))

    def __add__(self, other: QMatrix) -> QMatrix:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return QMatrix(self.rows, self.cols, tuple(x + y for x, y in zip(self.data, other.data)))

    def is_zero(self) -> bool:
        return not any(self.data)

    def is_antisymmetric(self) -> bool:
        if self.rows != self.cols:
            return False
        n = self.rows
        return all(self[i, j] == -self[j, i] for i in range(n) for j in range(i, n))


def _integer_rows(m: QMatrix) -> list[list[int]]:
    out = []
    for r in m.to_rows():
        den = math.lcm(*(x.denominator for x in r)) if r else 1
        out.append([int(x * den) for x in r])
    return out


def qmat_rank(m: QMatrix) -> int:
    """Rank over Q by fraction-free (Bareiss) elimination."""
    a = _integer_rows(m)
    nrows, ncols = m.rows, m.cols
    rank, prev = 0, 1
    for col in range(ncols):
        pivot = next((i for i in range(rank, nrows) if a[i][col]), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        p = a[rank][col]
        for i in range(rank + 1, nrows):
            f = a[i][col]
            a[i] = [(p * a[i][j] - f * a[rank][j]) // prev for j in range(ncols)]
        prev = p
        rank += 1
        if rank == nrows:
            break
    return rank


def rref(m: QMatrix) -> tuple[QMatrix, list[int]]:
    """Reduced row echelon form and pivot columns (Gauss-Jordan over Fractions)."""
    a = m.to_rows()
    pivots: list[int] = []
    r = 0
    for col in range(m.cols):
        pivot = next((i for i in range(r, m.rows) if a[i][col]), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        inv = 1 / a[r][col]
        a[r] = [x * inv for x in a[r]]
        for i in range(m.rows):
            if i != r and a[i][col]:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
        if r == m.rows:
            break
    return QMatrix.from_rows(a) if a else m, pivots


def determinant(m: QMatrix) -> Fraction:
    if m.rows != m.cols:
        raise ValueError("determinant of a non-square matrix")
    a = m.to_rows()
    n, det = m.rows, Fraction(1)
    for col in range(n):
        pivot = next((i for i in range(col, n) if a[i][col]), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det *= a[col][col]
        for i in range(col + 1, n):
            f = a[i][col] / a[col][col]
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return det


def inverse(m: QMatrix) -> QMatrix:
    n = m.rows
    if n != m.cols:
        raise ValueError("inverse of a non-square matrix")
    aug = QMatrix.from_rows(r + [int(i == j) for j in range(n)] for i, r in enumerate(m.to_rows()))
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return QMatrix.from_rows(r[n:] for r in red.to_rows())


def complete_basis_with_first(v: Sequence, n: int | None = None) -> QMatrix:
    """Invertible ``T`` whose first column is ``v``; the other columns are the
    standard unit vectors except the one at the first nonzero entry of ``v``."""
    v = [Fraction(x) for x in v]
    if n is None:
        n = len(v)
    if len(v) != n:
        raise ValueError(f"vector of length {len(v)} for dimension {n}")
    pivot = next((i for i, x in enumerate(v) if x), None)
    if pivot is None:
        raise ZeroVector("cannot complete a basis from the zero vector")
    cols = [v] + [[int(i == k) for i in range(n)] for k in range(n) if k != pivot]
    return QMatrix.from_columns(cols)


def congruence(p: QMatrix, s: QMatrix) -> QMatrix:
    """``s p s^T``: coordinates of the bivector ``p`` after the basis change whose
    old-to-new coordinate map is ``s``."""
    return s @ p @ s.transpose()


def wedge_matrix(u: Sequence, v: Sequence) -> QMatrix:
    """Antisymmetric matrix with entries ``u_i v_j - u_j v_i``."""
    n = len(u)
    return QMatrix.from_rows([[u[i] * v[j] - u[j] * v[i] for j in range(n)] for i in range(n)])


def antisym_decompose(p: QMatrix, context: BasisContext) -> tuple[Scalar, Scalar] | None:
    """Write the bivector ``p`` as a single wedge ``u ^ v``.

    Returns ``(u, v)`` as scalars of ``context``, or ``None`` when the
    antisymmetric rank exceeds 2.
    """
    if not p.is_antisymmetric():
        raise NotAntisymmetric("matrix is not antisymmetric")
    if p.rows != context.size:
        raise ValueError(f"{p.rows}x{p.cols} matrix for a context of size {context.size}")
    rank = qmat_rank(p)
    if rank == 0:
        return context.zero(), context.zero()
    if rank > 2:
        return None
    n = p.rows
    i, j = next((i, j) for i in range(n) for j in range(i + 1, n) if p[i, j])
    # for p = u^v, (row_i ^ row_j) = p_ij * p
    u = [-x for x in p.row(j)]
    v = [x / p[i, j] for x in p.row(i)]
    if wedge_matrix(u, v) != p:
        raise AssertionError("rank-2 decomposition failed to reproduce the bivector")
    return Scalar(context, tuple(u)), Scalar(context, tuple(v))
