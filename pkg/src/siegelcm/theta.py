"""Theta constants with rational characteristics, the level-N function Theta
built from them, and the genus-one Siegel function used to cross-check it.

theta([r; s], Z) = sum_{n in Z^g} e(1/2 (n+r)^T Z (n+r) + (n+r)^T s),
e(x) = exp(2 pi i x).  The lattice sum is cut to a box whose tail is bounded
with a Gaussian envelope in the smallest eigenvalue of Im Z.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Iterable, Sequence

import mpmath
import numpy as np
from mpmath import mp

from .bigcomplex import BigComplex, BigReal
from .symplectic import NotInSiegelSpace, SiegelPoint

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class ThetaChar:
    """Characteristic [r; s] with exact rational entries."""

    r: tuple[Fraction, ...]
    s: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.r) != len(self.s):
            raise ValueError("r and s must have the same length")

    @classmethod
    def from_vector(cls, v: Sequence) -> "ThetaChar":
        v = [Fraction(x) for x in v]
        if len(v) % 2:
            raise ValueError("characteristic vector must have even length")
        g = len(v) // 2
        return cls(tuple(v[:g]), tuple(v[g:]))

    @classmethod
    def from_integers(cls, numerators: Sequence[int], N: int) -> "ThetaChar":
        return cls.from_vector([Fraction(k, N) for k in numerators])

    @property
    def g(self) -> int:
        return len(self.r)

    @property
    def vector(self) -> tuple[Fraction, ...]:
        return self.r + self.s

    @property
    def denominator(self) -> int:
        return lcm(*(x.denominator for x in self.vector))

    def reduced(self) -> "ThetaChar":
        return ThetaChar.from_vector([x % 1 for x in self.vector])

    def is_half_integral(self) -> bool:
        return all((2 * x).denominator == 1 for x in self.vector)

    def __neg__(self) -> "ThetaChar":
        return ThetaChar.from_vector([-x for x in self.vector])

    def __add__(self, other: "ThetaChar") -> "ThetaChar":
        return ThetaChar.from_vector([a + b for a, b in zip(self.vector, other.vector)])

    def __sub__(self, other: "ThetaChar") -> "ThetaChar":
        return self + (-other)

    def rs(self) -> Fraction:
        return sum((a * b for a, b in zip(self.r, self.s)), Fraction(0))

    def __str__(self):
        return "[" + ", ".join(str(x) for x in self.vector) + "]"


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"


def classify_char(v: ThetaChar) -> Parity:
    """A half-integral characteristic is odd iff 4 r^T s is an odd integer."""
    if not v.is_half_integral():
        raise ValueError(f"{v} is not a half-integral characteristic")
    q = 4 * v.rs()
    return Parity.ODD if q.numerator % 2 else Parity.EVEN


@dataclass(frozen=True)
class CharSets:
    g: int
    S_minus: tuple[ThetaChar, ...]
    S_plus: tuple[ThetaChar, ...]


@lru_cache(maxsize=None)
def build_char_sets(g: int) -> CharSets:
    if g < 1:
        raise ValueError("genus must be positive")
    odd, even = [], []
    for vec in itertools.product((Fraction(0), HALF), repeat=2 * g):
        c = ThetaChar.from_vector(vec)
        (odd if classify_char(c) is Parity.ODD else even).append(c)
    sets = CharSets(g, tuple(odd), tuple(even))
    assert len(odd) == 2 ** (g - 1) * (2**g - 1)
    assert len(even) == 2 ** (g - 1) * (2**g + 1)
    return sets


# -- truncation -----------------------------------------------------------------

@dataclass(frozen=True)
class TruncationPlan:
    radius: int
    tail_bound: BigReal
    lambda_min: float
    target_prec: int

    @property
    def log2_tail(self) -> float:
        return float(mpmath.log(self.tail_bound.value, 2)) if self.tail_bound.value else -math.inf


def lambda_min_bound(Z: SiegelPoint) -> float:
    """Lower bound for the smallest eigenvalue of Im Z."""
    g = Z.g
    with mpmath.workprec(64):
        Y = [[mp.mpf(x) for x in row] for row in Z.imag_part()]
        if g == 1:
            lam = Y[0][0]
        elif g == 2:
            a, b, c = Y[0][0], Y[0][1], Y[1][1]
            lam = (a + c) / 2 - mp.sqrt(((a - c) / 2) ** 2 + b * b)
        else:
            lam = min(Y[i][i] - sum(abs(Y[i][j]) for j in range(g) if j != i)
                      for i in range(g))
            if lam <= 0:
                lam = mp.mpf(np.linalg.eigvalsh(np.array(Y, dtype=float)).min())
    lam = float(lam) * (1 - 2.0**-20)
    if not lam > 0:
        raise NotInSiegelSpace("not in H_g")
    return lam


def _shell(k: int, g: int) -> int:
    return (2 * k + 1) ** g - (2 * k - 1) ** g


def _log_tail(B: int, g: int, lam: float, rho: float) -> float:
    """log of sum_{k > B} shell(k) exp(-pi lam (k - rho)^2)."""
    logs = []
    k = B + 1
    while True:
        t = math.log(_shell(k, g)) - math.pi * lam * (k - rho) ** 2
        logs.append(t)
        if t < max(logs) - 60:
            break
        k += 1
    m = max(logs)
    return m + math.log(sum(math.exp(x - m) for x in logs))


def _centered(r: Iterable[Fraction]) -> list[Fraction]:
    return [x - round(x) for x in r]


def plan_truncation(Z: SiegelPoint, v: ThetaChar, target_prec: int) -> TruncationPlan:
    g = Z.g
    lam = lambda_min_bound(Z)
    rho = float(max(abs(x) for x in _centered(v.r)))
    goal = -target_prec * math.log(2)
    B = 0
    while _log_tail(B, g, lam, rho) >= goal:
        B += 1
    with mpmath.workprec(53):
        tail = BigReal(mp.exp(_log_tail(B, g, lam, rho)), 53)
    return TruncationPlan(B, tail, lam, target_prec)


# -- theta constants ------------------------------------------------------------

def _q(x: Fraction) -> mpmath.mpf:
    return mp.mpf(x.numerator) / x.denominator


def theta_eval(v: ThetaChar, Z: SiegelPoint, prec: int,
               plan: TruncationPlan | None = None) -> BigComplex:
    """theta([r; s], Z) to about ``prec`` bits (absolute).

    Shifting r by an integer only re-indexes the sum, so r is centred into
    [-1/2, 1/2] first.  The innermost coordinate is summed with a
    two-term multiplicative recurrence; the box is walked lexicographically.
    """
    g = Z.g
    if v.g != g:
        raise ValueError("characteristic and Siegel point have different genus")
    r = _centered(v.r)
    s = list(v.s)
    if plan is None:
        plan = plan_truncation(Z, v, prec + 20)
    B = plan.radius
    wp = prec + 32 + 2 * (2 * B + 1).bit_length()
    with mpmath.workprec(wp):
        Zm = [[+x for x in row] for row in Z.entries]
        rr = [_q(x) for x in r]
        ss = [_q(x) for x in s]
        a = Zm[g - 1][g - 1] / 2
        w = mp.expjpi(2 * Zm[g - 1][g - 1])
        acc = mp.mpc(0)
        for outer in itertools.product(range(-B, B + 1), repeat=g - 1):
            vo = [m + x for m, x in zip(outer, rr)]
            c0 = mp.mpc(0)
            for i in range(g - 1):
                c0 += vo[i] * ss[i]
                for j in range(g - 1):
                    c0 += vo[i] * Zm[i][j] * vo[j] / 2
            b = ss[g - 1]
            for j in range(g - 1):
                b += Zm[g - 1][j] * vo[j]
            t0 = -B + rr[g - 1]
            term = mp.expjpi(2 * (c0 + b * t0 + a * t0 * t0))
            ratio = mp.expjpi(2 * (b + a * (2 * t0 + 1)))
            for _ in range(2 * B + 1):
                acc += term
                term *= ratio
                ratio *= w
    return BigComplex.of(acc, prec)


# -- the level-N function Theta ---------------------------------------------------

class PoleError(ArithmeticError):
    pass


def zero_threshold(prec: int) -> mpmath.mpf:
    with mpmath.workprec(64):
        return mp.mpf(2) ** (-(prec // 2))


def big_theta_exponents(g: int, N: int) -> tuple[int, int]:
    return 4 * N * (2**g + 1), 4 * N * (2**g - 1)


def big_theta_working_prec(g: int, N: int, prec: int) -> int:
    """Target precision plus guard bits for the long power products."""
    sets = build_char_sets(g)
    e_minus, e_plus = big_theta_exponents(g, N)
    total = len(sets.S_minus) * e_minus + len(sets.S_plus) * e_plus
    return prec + 64 + math.ceil(math.log2(total)) * 4


def level_of(v: ThetaChar) -> int:
    return v.denominator


def big_theta(v: ThetaChar, Z: SiegelPoint, prec: int, N: int | None = None) -> BigComplex:
    """Theta([r; s], Z) at level N (default: the common denominator of v).

    2^(4N) e(-2^g N (2^g-1)(2^g+1) r^T s)
      * prod_{S-} theta(a - v, Z)^(4N(2^g+1)) / prod_{S+} theta(c, Z)^(4N(2^g-1))

    The accuracy is bounded by that of ``Z``; pass a point computed at
    ``big_theta_working_prec`` bits for full accuracy.
    """
    g = Z.g
    if v.g != g:
        raise ValueError("characteristic and Siegel point have different genus")
    N = N or level_of(v)
    if N < 2:
        raise ValueError("level N must be at least 2")
    if any((N * x).denominator != 1 for x in v.vector):
        raise ValueError(f"characteristic {v} is not in (1/{N})Z^{2 * g}")
    sets = build_char_sets(g)
    e_minus, e_plus = big_theta_exponents(g, N)
    wp = big_theta_working_prec(g, N, prec)
    thr = zero_threshold(prec)

    shifted = [a - v for a in sets.S_minus]
    # an exactly odd shifted characteristic makes theta vanish identically
    for w in shifted:
        if w.is_half_integral() and classify_char(w) is Parity.ODD:
            return BigComplex.of(0, prec)

    with mpmath.workprec(wp):
        den = mp.mpc(1)
        for c in sets.S_plus:
            t = theta_eval(c, Z, wp).value
            if abs(t) < thr:
                raise PoleError(f"pole of Theta: theta{c} vanishes numerically")
            den *= t**e_plus
        num = mp.mpc(1)
        for w in shifted:
            num *= theta_eval(w, Z, wp).value ** e_minus
        phase = (-(2**g) * N * (2**g - 1) * (2**g + 1) * v.rs()) % 1
        pref = mp.mpf(2) ** (4 * N) * mp.expjpi(2 * _q(phase))
        val = pref * num / den
    return BigComplex.of(val, prec)


# -- genus one ------------------------------------------------------------------

def bernoulli2(x: Fraction) -> Fraction:
    x = Fraction(x)
    return x * x - x + Fraction(1, 6)


def siegel_function(r, s, tau: BigComplex, prec: int) -> BigComplex:
    """Klein-Siegel function g_[r;s](tau) as the usual q-product."""
    r, s = Fraction(r), Fraction(s)
    if r.denominator == 1 and s.denominator == 1:
        raise ValueError("[r; s] must not be integral")
    if not tau.value.imag > 0:
        raise ValueError("tau must lie in the upper half-plane")
    wp = prec + 32
    with mpmath.workprec(wp):
        t = +tau.value

        def qpow(x):  # q^x = e(tau x) for real x
            return mp.expjpi(2 * t * x)

        es = mp.expjpi(2 * _q(s % 1))
        val = -qpow(_q(bernoulli2(r) / 2)) * mp.expjpi(_q(s * (r - 1) % 2))
        val *= 1 - qpow(_q(r)) * es
        q = qpow(1)
        absq = abs(q)
        cut = mp.mpf(2) ** (-prec - 16)
        up = qpow(_q(1 + r)) * es        # q^(n+r) e(s)
        down = qpow(_q(1 - r)) / es      # q^(n-r) e(-s)
        n = 1
        while True:
            val *= (1 - up) * (1 - down)
            if absq ** (n - abs(r)) < cut:
                break
            up *= q
            down *= q
            n += 1
    return BigComplex.of(val, prec)
