"""Dense exact linear algebra over ``fractions.Fraction``.

Matrices are lists of rows.  Everything here is small (desk-scale algebras),
so clarity wins over speed.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]


class SingularMatrixError(ArithmeticError):
    pass


def zeros(rows: int, cols: int) -> Matrix:
    return [[Fraction(0)] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = Fraction(1)
    return m


def transpose(a: Sequence[Sequence[Fraction]], rows: int | None = None) -> Matrix:
    if not a:
        return [[] for _ in range(rows or 0)]
    return [list(col) for col in zip(*a)]


def matmul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]], inner: int | None = None) -> Matrix:
    """Product of an (r x n) and an (n x c) matrix; ``inner`` only matters when r or c is 0."""
    rows = len(a)
    cols = len(b[0]) if b else 0
    out = zeros(rows, cols)
    for i, row in enumerate(a):
        out_row = out[i]
        for k, aik in enumerate(row):
            if aik:
                for j, bkj in enumerate(b[k]):
                    if bkj:
                        out_row[j] += aik * bkj
    return out


def rref(a: Sequence[Sequence[Fraction]], ncols: int | None = None) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns, scanning columns left to right."""
    m = [list(map(Fraction, row)) for row in a]
    ncols = ncols if ncols is not None else (len(m[0]) if m else 0)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(a: Sequence[Sequence[Fraction]], ncols: int | None = None) -> int:
    return len(rref(a, ncols)[1])


def inverse(a: Sequence[Sequence[Fraction]]) -> Matrix:
    n = len(a)
    aug = [list(row) + e for row, e in zip(a, identity(n))]
    red, pivots = rref(aug, ncols=n)
    if pivots != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return [row[n:] for row in red]


def determinant(a: Sequence[Sequence[Fraction]]) -> Fraction:
    m = [list(map(Fraction, row)) for row in a]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            det = -det
        det *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] / m[c][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return det


def solve(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> Matrix:
    """Solve ``a @ x = b`` for square invertible ``a`` (``b`` may have several columns)."""
    return matmul(inverse(a), b)


def particular_solution(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction], ncols: int) -> list[Fraction] | None:
    """One solution of ``a @ x = b`` with free variables set to zero, or None if inconsistent.

    The choice is deterministic: pivots are taken in column order.
    """
    aug = [list(row) + [Fraction(rhs)] for row, rhs in zip(a, b)]
    red, pivots = rref(aug, ncols=ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(red, pivots):
        x[p] = row[ncols]
    return x
