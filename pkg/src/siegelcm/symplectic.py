"""Integer symplectic linear algebra and the Siegel upper half-space.

Integer matrices are plain nested lists/tuples of ints.  Siegel points keep
their entries as mpmath complex numbers together with a precision.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

import mpmath
from mpmath import mp

from . import exact
from .bigcomplex import BigComplex

IntMatrix = Sequence[Sequence[int]]


def J_matrix(g: int) -> list[list[int]]:
    n = 2 * g
    J = [[0] * n for _ in range(n)]
    for i in range(g):
        J[i][g + i] = -1
        J[g + i][i] = 1
    return J


def blocks(M: IntMatrix) -> tuple[list[list], list[list], list[list], list[list]]:
    g = len(M) // 2
    A = [list(row[:g]) for row in M[:g]]
    B = [list(row[g:]) for row in M[:g]]
    C = [list(row[:g]) for row in M[g:]]
    D = [list(row[g:]) for row in M[g:]]
    return A, B, C, D


def from_blocks(A, B, C, D) -> list[list[int]]:
    return [list(a) + list(b) for a, b in zip(A, B)] + [list(c) + list(d) for c, d in zip(C, D)]


def is_symplectic(M: IntMatrix) -> bool:
    n = len(M)
    if n == 0 or n % 2 or any(len(row) != n for row in M):
        raise ValueError("expected a square matrix of even size")
    J = J_matrix(n // 2)
    return exact.matmul(exact.matmul(exact.transpose(M), J), M) == J


def is_gsp(M: IntMatrix) -> Fraction | None:
    """Multiplier nu if M^T J M = nu J, else None."""
    n = len(M)
    J = J_matrix(n // 2)
    P = exact.matmul(exact.matmul(exact.transpose(M), J), M)
    nu = Fraction(P[n // 2][0])
    if nu != 0 and all(P[i][j] == nu * J[i][j] for i in range(n) for j in range(n)):
        return nu
    return None


class NotInSiegelSpace(ValueError):
    pass


@dataclass(frozen=True)
class SiegelPoint:
    """Symmetric g x g complex matrix with positive definite imaginary part."""

    entries: tuple[tuple[mpmath.mpc, ...], ...]
    prec: int

    def __post_init__(self):
        self.validate()

    @classmethod
    def from_matrix(cls, Z, prec: int) -> "SiegelPoint":
        """Build from an mpmath matrix or nested sequence of numbers."""
        if isinstance(Z, mpmath.matrix):
            rows = [[Z[i, j] for j in range(Z.cols)] for i in range(Z.rows)]
        else:
            rows = Z
        with mpmath.workprec(prec):
            ent = tuple(tuple(mp.mpc(x.value if isinstance(x, BigComplex) else x)
                              for x in row) for row in rows)
        return cls(ent, prec)

    @property
    def g(self) -> int:
        return len(self.entries)

    def matrix(self) -> mpmath.matrix:
        return mpmath.matrix([list(row) for row in self.entries])

    def entry(self, i: int, j: int) -> BigComplex:
        return BigComplex(self.entries[i][j], self.prec)

    def imag_part(self) -> list[list[mpmath.mpf]]:
        return [[x.imag for x in row] for row in self.entries]

    def validate(self) -> None:
        g = len(self.entries)
        if g == 0 or any(len(row) != g for row in self.entries):
            raise NotInSiegelSpace("Siegel point must be a square matrix")
        with mpmath.workprec(self.prec):
            scale = max(1, max(abs(x) for row in self.entries for x in row))
            sym_tol = mp.mpf(2) ** (-self.prec + 16) * scale
            for i in range(g):
                for j in range(i):
                    if abs(self.entries[i][j] - self.entries[j][i]) >= sym_tol:
                        raise NotInSiegelSpace("matrix is not symmetric")
            Y = mpmath.matrix(self.imag_part())
            thr = mp.mpf(2) ** (-self.prec // 2)
            for k in range(1, g + 1):
                if mp.det(Y[:k, :k]) <= thr:
                    raise NotInSiegelSpace("imaginary part is not positive definite")

    def with_prec(self, prec: int) -> "SiegelPoint":
        return SiegelPoint.from_matrix(self.matrix(), prec)


class UnstableAction(ArithmeticError):
    pass


def act_on_H(M: IntMatrix, Z: SiegelPoint) -> SiegelPoint:
    """(A Z + B)(C Z + D)^-1."""
    if len(M) != 2 * Z.g:
        raise ValueError("matrix size does not match the genus")
    if not is_symplectic(M):
        raise ValueError("matrix is not symplectic")
    A, B, C, D = (mpmath.matrix(b) for b in blocks(M))
    with mpmath.workprec(Z.prec + 32):
        Zm = Z.matrix()
        den = C * Zm + D
        try:
            inv = den**-1
        except ZeroDivisionError as exc:
            raise UnstableAction("unstable action") from exc
        cond = mpmath.mnorm(den, 1) * mpmath.mnorm(inv, 1)
        if cond > mp.mpf(2) ** (Z.prec // 2):
            raise UnstableAction("unstable action")
        W = (A * Zm + B) * inv
    return SiegelPoint.from_matrix(W, Z.prec)


# -- alternating forms --------------------------------------------------------

class DegenerateForm(ValueError):
    pass


def symplectic_reduce(G: Sequence[Sequence], reverse_ties: bool = False
                      ) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Bring a nondegenerate alternating matrix to ``[[O, -E], [E, O]]``.

    Returns ``(T, E)`` with ``T G T^T`` equal to the normal form and
    ``E = (e_1, ..., e_g)`` positive with e_1 | e_2 | ... | e_g.  For an
    integral ``G`` the transform ``T`` is integral with determinant +-1.
    Pivots are the entries of least absolute value; ties go to the lowest
    row index, or the highest with ``reverse_ties``.
    """
    n = len(G)
    if n % 2 or any(len(row) != n for row in G):
        raise ValueError("alternating matrix must be square of even size")
    Gq = exact.as_fraction_matrix(G)
    for i in range(n):
        for j in range(n):
            if Gq[i][j] != -Gq[j][i]:
                raise ValueError("matrix is not alternating")
    if exact.det(Gq) == 0:
        raise DegenerateForm("degenerate alternating form")
    den = lcm(*(x.denominator for row in Gq for x in row))
    W = [[int(x * den) for x in row] for row in Gq]  # working Gram matrix
    T = [[int(i == j) for j in range(n)] for i in range(n)]

    def add_multiple(dst: int, src: int, q: int) -> None:
        # basis vector dst += q * src, updating the Gram matrix congruently
        if q == 0:
            return
        T[dst] = [a + q * b for a, b in zip(T[dst], T[src])]
        W[dst] = [a + q * b for a, b in zip(W[dst], W[src])]
        for row in W:
            row[dst] += q * row[src]

    remaining = list(range(n))
    pairs: list[tuple[int, int, int]] = []
    while remaining:
        cands = [(abs(W[i][j]), i, j) for i in remaining for j in remaining
                 if i != j and W[i][j] != 0]
        key = (lambda t: (t[0], -t[1], -t[2])) if reverse_ties else (lambda t: t)
        _, e, f = min(cands, key=key)
        p = W[e][f]
        restart = False
        for k in remaining:
            if k in (e, f):
                continue
            a, b = W[e][k], W[f][k]
            # v_k + (b/p) e - (a/p) f is orthogonal to e and f
            add_multiple(k, e, b // p)
            add_multiple(k, f, -(a // p))
            if W[e][k] or W[f][k]:
                restart = True  # remainder smaller than |p| exists
        if restart:
            continue
        bad = next(((k, m) for k in remaining for m in remaining
                    if k not in (e, f) and m not in (e, f) and W[k][m] % p), None)
        if bad is not None:
            add_multiple(e, bad[0], 1)
            continue
        pairs.append((e, f, p))
        remaining = [k for k in remaining if k not in (e, f)]

    pairs.sort(key=lambda t: abs(t[2]))
    g = n // 2
    rows_first, rows_second, E = [], [], []
    for e, f, p in pairs:
        # want omega(first, second) = -|p|
        first, second = (f, e) if p > 0 else (e, f)
        rows_first.append(T[first])
        rows_second.append(T[second])
        E.append(Fraction(abs(p), den))
    Tout = [[Fraction(x) for x in row] for row in rows_first + rows_second]
    for i in range(g - 1):
        assert (E[i + 1] / E[i]).denominator == 1, "divisibility chain violated"
    return Tout, E


def normal_form(E: Sequence) -> list[list[Fraction]]:
    g = len(E)
    out = [[Fraction(0)] * (2 * g) for _ in range(2 * g)]
    for i, e in enumerate(E):
        out[i][g + i] = -Fraction(e)
        out[g + i][i] = Fraction(e)
    return out


# -- theta characteristics ----------------------------------------------------

def char_permute(M: IntMatrix, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """gamma^T v + 1/2 [diag(A^T C); diag(B^T D)]  reduced into [0, 1)."""
    if not is_symplectic(M):
        raise ValueError("matrix is not symplectic")
    A, B, C, D = blocks(M)
    g = len(A)
    AtC = exact.matmul(exact.transpose(A), C)
    BtD = exact.matmul(exact.transpose(B), D)
    shift = [Fraction(AtC[i][i], 2) for i in range(g)] + [Fraction(BtD[i][i], 2) for i in range(g)]
    w = exact.matvec(exact.transpose(M), [Fraction(x) for x in v])
    return tuple((a + b) % 1 for a, b in zip(w, shift))


def transform_char(M: IntMatrix, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """gamma^T v, exactly and unreduced."""
    return tuple(exact.matvec(exact.transpose(M), [Fraction(x) for x in v]))


# -- random symplectic matrices -----------------------------------------------

def _translation(S) -> list[list[int]]:
    g = len(S)
    I = [[int(i == j) for j in range(g)] for i in range(g)]
    O = [[0] * g for _ in range(g)]
    return from_blocks(I, S, O, I)


def _unimodular_block(U) -> list[list[int]]:
    g = len(U)
    Uinv_t = exact.transpose(exact.inverse(U))
    O = [[0] * g for _ in range(g)]
    return from_blocks(U, O, O, [[int(x) for x in row] for row in Uinv_t])


def symplectic_generators(g: int) -> list[list[list[int]]]:
    """J, elementary translations and elementary unimodular blocks."""
    gens = [J_matrix(g)]
    for i in range(g):
        for j in range(i, g):
            S = [[0] * g for _ in range(g)]
            S[i][j] = S[j][i] = 1
            gens.append(_translation(S))
    for i in range(g):
        for j in range(g):
            if i != j:
                U = [[int(a == b) for b in range(g)] for a in range(g)]
                U[i][j] = 1
                gens.append(_unimodular_block(U))
    return gens


def inverse_symplectic(M: IntMatrix) -> list[list[int]]:
    """M^-1 = -J M^T J."""
    J = J_matrix(len(M) // 2)
    P = exact.matmul(exact.matmul(J, exact.transpose(M)), J)
    return [[-x for x in row] for row in P]


def random_symplectic(g: int, length: int, rng: random.Random) -> list[list[int]]:
    """Product of ``length`` random generators or their inverses."""
    gens = symplectic_generators(g)
    M = [[int(i == j) for j in range(2 * g)] for i in range(2 * g)]
    for _ in range(length):
        h = rng.choice(gens)
        if rng.random() < 0.5:
            h = inverse_symplectic(h)
        M = exact.matmul(M, h)
    return [[int(x) for x in row] for row in M]
