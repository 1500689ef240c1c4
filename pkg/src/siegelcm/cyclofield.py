"""Exact arithmetic in the cyclotomic field K = Q(zeta_l), l an odd prime.

Elements are stored in the basis zeta, zeta^2, ..., zeta^(l-1).  That basis
is also a Z-basis of the ring of integers, it is permuted by the Galois
group, and the constant 1 is ``-(zeta + ... + zeta^(l-1))``, so every
element has exactly one coordinate vector.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import NamedTuple, Sequence

import mpmath
from mpmath import mp

from . import exact
from .bigcomplex import BigComplex

SUPPORTED_PRIMES = (3, 5, 7, 11, 13, 17, 19)


def _is_odd_prime(n: int) -> bool:
    return n > 2 and n % 2 == 1 and all(n % p for p in range(3, int(n**0.5) + 1, 2))


@dataclass(frozen=True)
class CycloElem:
    ell: int
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coords) != self.ell - 1:
            raise ValueError(f"need {self.ell - 1} coordinates, got {len(self.coords)}")

    # -- constructors -------------------------------------------------------
    @classmethod
    def from_coords(cls, ell: int, coords: Sequence) -> "CycloElem":
        return cls(ell, tuple(Fraction(c) for c in coords))

    @classmethod
    def from_powers(cls, ell: int, coeffs: Sequence) -> "CycloElem":
        """Element sum_k coeffs[k] * zeta^k for any k (reduced mod l)."""
        c = [Fraction(0)] * ell
        for k, a in enumerate(coeffs):
            c[k % ell] += Fraction(a)
        return cls._canon(ell, c)

    @classmethod
    def rational(cls, ell: int, q) -> "CycloElem":
        q = Fraction(q)
        return cls(ell, (-q,) * (ell - 1))

    @classmethod
    def zero(cls, ell: int) -> "CycloElem":
        return cls(ell, (Fraction(0),) * (ell - 1))

    @classmethod
    def one(cls, ell: int) -> "CycloElem":
        return cls.rational(ell, 1)

    @classmethod
    def zeta(cls, ell: int, k: int = 1) -> "CycloElem":
        c = [0] * ell
        c[k % ell] = 1
        return cls._canon(ell, c)

    @staticmethod
    def _canon(ell: int, c: Sequence[Fraction]) -> "CycloElem":
        """Power-basis vector of length l -> canonical coordinates."""
        c0 = Fraction(c[0])
        return CycloElem(ell, tuple(Fraction(x) - c0 for x in c[1:]))

    def power_coeffs(self) -> list[Fraction]:
        return [Fraction(0), *self.coords]

    # -- ring operations ----------------------------------------------------
    def _lift(self, other) -> "CycloElem":
        if isinstance(other, CycloElem):
            if other.ell != self.ell:
                raise ValueError("elements of different cyclotomic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return CycloElem.rational(self.ell, other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return CycloElem(self.ell, tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return CycloElem(self.ell, tuple(-a for a in self.coords))

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return CycloElem(self.ell, tuple(a * q for a in self.coords))
        other = self._lift(other)
        if other is NotImplemented:
            return other
        ell = self.ell
        out = [Fraction(0)] * ell
        for i, a in enumerate(self.coords, start=1):
            if a:
                for j, b in enumerate(other.coords, start=1):
                    if b:
                        out[(i + j) % ell] += a * b
        return CycloElem._canon(ell, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "CycloElem":
        if n < 0:
            return self.inverse() ** (-n)
        result, base = CycloElem.one(self.ell), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __bool__(self):
        return any(self.coords)

    def multiplication_matrix(self) -> list[list[Fraction]]:
        """Column k holds the coordinates of self * zeta^(k+1)."""
        cols = [(self * CycloElem.zeta(self.ell, k)).coords for k in range(1, self.ell)]
        return exact.transpose(cols)

    def inverse(self) -> "CycloElem":
        if not self:
            raise ZeroDivisionError("inverse of zero in Q(zeta)")
        m = self.multiplication_matrix()
        return CycloElem(self.ell, tuple(exact.solve(m, CycloElem.one(self.ell).coords)))

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def height(self) -> Fraction:
        return max(abs(c) for c in self.coords)

    def as_rational(self) -> Fraction | None:
        """The rational value if the element lies in Q, else None."""
        first = self.coords[0]
        if all(c == first for c in self.coords):
            return -first
        return None

    def __str__(self):
        return format_elem(self)


@dataclass(frozen=True)
class CycloIdeal:
    """Principal ideal generator*O_K (class number one is assumed)."""

    generator: CycloElem

    def __post_init__(self):
        if not self.generator:
            raise ValueError("ideal generator must be nonzero")

    def norm(self) -> Fraction:
        return abs(norm_to_Q(self.generator))


def galois_apply(a: CycloElem, i: int) -> CycloElem:
    """a^(phi_i), where phi_i sends zeta to zeta^i."""
    ell = a.ell
    if i % ell == 0:
        raise ValueError("Galois exponent must be prime to l")
    out = [Fraction(0)] * ell
    for k, c in enumerate(a.coords, start=1):
        out[(i * k) % ell] = c
    return CycloElem(ell, tuple(out[1:]))


def conjugate(a: CycloElem) -> CycloElem:
    return galois_apply(a, a.ell - 1)


def trace_to_Q(a: CycloElem) -> Fraction:
    # Tr(zeta^k) = -1 for every k prime to l
    return -sum(a.coords, Fraction(0))


def norm_to_Q(a: CycloElem) -> Fraction:
    prod = a
    for i in range(2, a.ell):
        prod = prod * galois_apply(a, i)
    q = prod.as_rational()
    assert q is not None, "norm did not land in Q"
    return q


def embed(a: CycloElem, i: int, prec: int) -> BigComplex:
    """Numerical value of a^(phi_i) with zeta = exp(2 pi i / l)."""
    ell = a.ell
    if i % ell == 0:
        raise ValueError("embedding index must be prime to l")
    q = a.as_rational()
    if q is not None:
        return BigComplex.of(q, prec)
    with mpmath.workprec(prec + 16):
        acc = mp.mpc(0)
        for k, c in enumerate(a.coords, start=1):
            if c:
                t = Fraction(2 * ((i * k) % ell), ell)
                acc += (mp.mpf(c.numerator) / c.denominator) * mp.expjpi(
                    mp.mpf(t.numerator) / t.denominator)
    return BigComplex.of(acc, prec)


class BasisSolution(NamedTuple):
    coeffs: tuple[Fraction, ...]
    integral: bool


def solve_in_basis(target: CycloElem, basis: Sequence[CycloElem]) -> BasisSolution:
    """Coefficients c with target = sum c_j basis_j, exactly."""
    if len(basis) != target.ell - 1:
        raise ValueError(f"basis must have {target.ell - 1} elements")
    m = exact.transpose([b.coords for b in basis])
    if exact.det(m) == 0:
        raise ValueError("basis not independent")
    sol = tuple(exact.solve(m, target.coords))
    return BasisSolution(sol, all(x.denominator == 1 for x in sol))


# -- text I/O ---------------------------------------------------------------

_TERM = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
        (?:(?P<coef>\d+(?:/\d+)?)\s*\*?\s*)?
        (?P<z>z(?:\^(?P<exp>-?\d+))?)?\s*""",
    re.VERBOSE,
)


def parse_elem(text: str, ell: int) -> CycloElem:
    """Parse strings like ``"2 + z^1 - 3/2*z^4"`` (z stands for zeta_l)."""
    coeffs = [Fraction(0)] * ell
    pos, first = 0, True
    text = text.strip()
    if not text:
        raise ValueError("empty element")
    while pos < len(text):
        m = _TERM.match(text, pos)
        if m is None or m.end() == pos or (m["coef"] is None and m["z"] is None):
            raise ValueError(f"cannot parse element at {text[pos:]!r}")
        if m["sign"] is None and not first:
            raise ValueError(f"missing operator before {text[pos:]!r}")
        c = Fraction(m["coef"]) if m["coef"] else Fraction(1)
        if m["sign"] == "-":
            c = -c
        k = 0
        if m["z"]:
            k = int(m["exp"]) if m["exp"] is not None else 1
        coeffs[k % ell] += c
        pos, first = m.end(), False
    return CycloElem.from_powers(ell, coeffs)


def format_elem(a: CycloElem) -> str:
    """Inverse of parse_elem, pulling the most common coordinate into a
    constant so that e.g. 2 + zeta prints as ``2 + z^1``."""
    shift = Counter(a.coords).most_common(1)[0][0]
    terms: list[tuple[Fraction, int]] = []
    if shift:
        terms.append((-shift, 0))
    terms += [(c - shift, k) for k, c in enumerate(a.coords, start=1) if c != shift]
    if not terms:
        return "0"
    out = []
    for idx, (c, k) in enumerate(terms):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if k == 0:
            body = str(mag)
        elif mag == 1:
            body = f"z^{k}"
        else:
            body = f"{mag}*z^{k}"
        if idx == 0:
            out.append(body if sign == "+" else f"-{body}")
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


def check_prime(ell: int) -> None:
    if not _is_odd_prime(ell):
        raise ValueError(f"l = {ell} is not an odd prime")


def coprime_to(a: CycloElem, n: int) -> bool:
    return gcd(int(abs(norm_to_Q(a))), n) == 1
