"""Small exact linear algebra over Q on nested lists of Fractions."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = list[list[Fraction]]


class SingularMatrixError(ArithmeticError):
    pass


def as_fraction_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(a: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*a)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), 0) for col in bt] for row in a]


def matvec(a: Sequence[Sequence], v: Sequence) -> list:
    return [sum((x * y for x, y in zip(row, v)), 0) for row in a]


def _eliminate(a: Matrix, rhs: Matrix | None):
    """Gauss-Jordan in place; returns the determinant."""
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            if rhs is not None:
                rhs[col], rhs[piv] = rhs[piv], rhs[col]
            det = -det
        p = a[col][col]
        det *= p
        inv = 1 / p
        a[col] = [x * inv for x in a[col]]
        if rhs is not None:
            rhs[col] = [x * inv for x in rhs[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                if rhs is not None:
                    rhs[r] = [x - f * y for x, y in zip(rhs[r], rhs[col])]
    return det


def det(a: Sequence[Sequence]) -> Fraction:
    return _eliminate(as_fraction_matrix(a), None)


def solve(a: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Solve ``a x = b`` exactly; raises SingularMatrixError."""
    m = as_fraction_matrix(a)
    rhs = [[Fraction(x)] for x in b]
    if _eliminate(m, rhs) == 0:
        raise SingularMatrixError("singular matrix")
    return [row[0] for row in rhs]


def inverse(a: Sequence[Sequence]) -> Matrix:
    m = as_fraction_matrix(a)
    rhs = identity(len(m))
    if _eliminate(m, rhs) == 0:
        raise SingularMatrixError("singular matrix")
    return rhs
