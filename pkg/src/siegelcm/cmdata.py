"""CM data of Q(zeta_l): CM type, type norm, the embedding Psi into C^g,
Riemann forms given by traces, and the polarization scalar m_c.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from .bigcomplex import BigComplex
from .cyclofield import (
    CycloElem,
    CycloIdeal,
    check_prime,
    conjugate,
    embed,
    galois_apply,
    norm_to_Q,
    trace_to_Q,
)


@dataclass(frozen=True)
class CmContext:
    ell: int
    g: int
    xi: CycloElem
    type_exponents: tuple[int, ...]
    reflex_exponents: tuple[int, ...]

    @classmethod
    def for_prime(cls, ell: int) -> "CmContext":
        check_prime(ell)
        g = (ell - 1) // 2
        xi = (CycloElem.zeta(ell, 1) - CycloElem.zeta(ell, -1)) / ell
        types = tuple(range(1, g + 1))
        reflex = tuple(pow(i, -1, ell) for i in types)
        ctx = cls(ell, g, xi, types, reflex)
        if conjugate(xi) != -xi:
            raise AssertionError("xi is not purely imaginary")
        return ctx

    def x_basis(self) -> list[CycloElem]:
        """Symplectic Z-basis of O_K for E_xi:
        x_j = zeta^(2j) for j <= g and zeta + zeta^3 + ... + zeta^(2(j-g)-1) after."""
        ell, g = self.ell, self.g
        xs = [CycloElem.zeta(ell, 2 * j) for j in range(1, g + 1)]
        for j in range(g + 1, 2 * g + 1):
            xs.append(CycloElem.from_powers(
                ell, _indicator(ell, [2 * k - 1 for k in range(1, j - g + 1)])))
        return xs

    def xi_positive(self, prec: int = 256) -> bool:
        """xi^(psi_i) on the positive imaginary axis for every type exponent."""
        tol = mpmath.mpf(2) ** (-prec + 16)
        for i in self.type_exponents:
            v = embed(self.xi, i, prec).value
            if not (abs(v.real) < tol and v.imag > 0):
                return False
        return True


def _indicator(ell: int, exps: Sequence[int]) -> list[int]:
    c = [0] * ell
    for k in exps:
        c[k % ell] += 1
    return c


@dataclass(frozen=True)
class RiemannFormSpec:
    """E_(c * scale) on Psi(K); ``c`` must be purely imaginary."""

    c: CycloElem
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        if conjugate(self.c) != -self.c:
            raise ValueError("Riemann form element must be purely imaginary")


def type_norm(ctx: CmContext, a: CycloElem) -> CycloElem:
    out = CycloElem.one(ctx.ell)
    for i in ctx.reflex_exponents:
        out = out * galois_apply(a, i)
    return out


def psi_embed(ctx: CmContext, a: CycloElem, prec: int) -> list[BigComplex]:
    return [embed(a, i, prec) for i in ctx.type_exponents]


def riemann_pairing(spec: RiemannFormSpec, a: CycloElem, b: CycloElem) -> Fraction:
    return trace_to_Q(spec.c * spec.scale * a * conjugate(b))


def compute_mc(ctx: CmContext, N: int, c_ideal: CycloIdeal) -> Fraction:
    """m_c = N_K(c) / N^2 for f = N O_K.

    For g >= 2 the field K_0 is Q, f_0 = NZ and the exponent d_0 is 2.  For
    g = 1, K_0 = K, d_0 = 1 and N_K(N O_K) = N^2, which gives the same value.
    """
    if N < 1:
        raise ValueError("N must be positive")
    return abs(norm_to_Q(c_ideal.generator)) / (N * N)


def standard_J(g: int) -> list[list[int]]:
    """[[O, -I], [I, O]]."""
    n = 2 * g
    J = [[0] * n for _ in range(n)]
    for i in range(g):
        J[i][g + i] = -1
        J[g + i][i] = 1
    return J


def gram_matrix(spec: RiemannFormSpec, basis: Sequence[CycloElem]
                ) -> tuple[list[list[Fraction]], bool]:
    """Matrix of E(basis_i, basis_j) and whether it equals the standard J."""
    G = [[riemann_pairing(spec, a, b) for b in basis] for a in basis]
    is_J = len(basis) % 2 == 0 and G == standard_J(len(basis) // 2)
    return G, is_J


def scaled_basis(ctx: CmContext, N: int, lam: CycloElem) -> list[CycloElem]:
    """The basis N * phi(lam)^-1 * x_j of the lattice f * phi(c)^-1."""
    inv = type_norm(ctx, lam).inverse()
    return [x * inv * N for x in ctx.x_basis()]


def polarization_spec(ctx: CmContext, N: int, lam: CycloElem) -> RiemannFormSpec:
    return RiemannFormSpec(ctx.xi, compute_mc(ctx, N, CycloIdeal(lam)))
