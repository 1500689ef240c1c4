"""Arbitrary-precision real and complex numbers with the precision carried by
the value.

Both types wrap :mod:`mpmath` numbers.  Every operation runs under
``mpmath.workprec`` at the larger of the operand precisions, so the global
mpmath context never leaks into results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import mpmath
from mpmath import mp

DEFAULT_PREC = 256

Rational = Union[int, Fraction]


def to_mpf(x, prec: int):
    """Convert an int, Fraction, str, float or BigReal to an mpf at ``prec`` bits."""
    with mpmath.workprec(prec):
        if isinstance(x, BigReal):
            return +x.value
        if isinstance(x, Fraction):
            return mp.mpf(x.numerator) / x.denominator
        return mp.mpf(x)


def format_decimal(x, digits: int) -> str:
    """Decimal string of an mpf with ``digits`` significant digits and an
    explicit exponent (``"-2.13359e-69"``, ``"0.0e+0"``)."""
    s = mpmath.nstr(x, digits, min_fixed=1, max_fixed=0, strip_zeros=False)
    if "e" not in s:
        s += "e+0"
    return s


def digits_for_prec(prec: int) -> int:
    """Decimal digits that survive a decimal -> binary -> decimal round trip."""
    return max(1, int((prec - 1) * math.log10(2)) - 1)


@dataclass(frozen=True)
class BigReal:
    value: mpmath.mpf
    prec: int

    @classmethod
    def of(cls, x, prec: int = DEFAULT_PREC) -> "BigReal":
        return cls(to_mpf(x, prec), prec)

    def _coerce(self, other) -> "BigReal":
        if isinstance(other, BigReal):
            return other
        if isinstance(other, (int, Fraction, float, str)):
            return BigReal.of(other, self.prec)
        return NotImplemented

    def _binop(self, other, op):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        p = max(self.prec, other.prec)
        with mpmath.workprec(p):
            return BigReal(op(self.value, other.value), p)

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binop(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binop(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binop(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._binop(other, lambda a, b: b / a)

    def __neg__(self):
        with mpmath.workprec(self.prec):
            return BigReal(-self.value, self.prec)

    def __abs__(self):
        with mpmath.workprec(self.prec):
            return BigReal(abs(self.value), self.prec)

    def __lt__(self, other):
        return self.value < self._coerce(other).value

    def __le__(self, other):
        return self.value <= self._coerce(other).value

    def __gt__(self, other):
        return self.value > self._coerce(other).value

    def __ge__(self, other):
        return self.value >= self._coerce(other).value

    def __float__(self):
        return float(self.value)

    def sqrt(self) -> "BigReal":
        with mpmath.workprec(self.prec):
            return BigReal(mp.sqrt(self.value), self.prec)

    def exp(self) -> "BigReal":
        with mpmath.workprec(self.prec):
            return BigReal(mp.exp(self.value), self.prec)

    def ln(self) -> "BigReal":
        with mpmath.workprec(self.prec):
            return BigReal(mp.ln(self.value), self.prec)

    def with_prec(self, prec: int) -> "BigReal":
        with mpmath.workprec(prec):
            return BigReal(+self.value, prec)

    def to_decimal(self, digits: int | None = None) -> str:
        return format_decimal(self.value, digits or digits_for_prec(self.prec))

    def __str__(self):
        return self.to_decimal(15)


@dataclass(frozen=True)
class BigComplex:
    """Complex number stored as one mpc; ``re`` and ``im`` share ``prec``."""

    value: mpmath.mpc
    prec: int

    @classmethod
    def of(cls, x, prec: int = DEFAULT_PREC) -> "BigComplex":
        with mpmath.workprec(prec):
            if isinstance(x, BigComplex):
                return cls(+x.value, prec)
            if isinstance(x, BigReal):
                return cls(mp.mpc(x.value), prec)
            if isinstance(x, Fraction):
                return cls(mp.mpc(mp.mpf(x.numerator) / x.denominator), prec)
            if isinstance(x, tuple):
                re, im = (to_mpf(t, prec) for t in x)
                return cls(mp.mpc(re, im), prec)
            return cls(mp.mpc(x), prec)

    @classmethod
    def from_parts(cls, re: BigReal, im: BigReal) -> "BigComplex":
        p = max(re.prec, im.prec)
        with mpmath.workprec(p):
            return cls(mp.mpc(re.value, im.value), p)

    @property
    def re(self) -> BigReal:
        return BigReal(self.value.real, self.prec)

    @property
    def im(self) -> BigReal:
        return BigReal(self.value.imag, self.prec)

    def _coerce(self, other) -> "BigComplex":
        if isinstance(other, BigComplex):
            return other
        if isinstance(other, BigReal):
            return BigComplex(mpmath.mpc(other.value), other.prec)
        if isinstance(other, (int, Fraction, float, complex)):
            return BigComplex.of(other, self.prec)
        return NotImplemented

    def _binop(self, other, op):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        p = max(self.prec, other.prec)
        with mpmath.workprec(p):
            return BigComplex(op(self.value, other.value), p)

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binop(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binop(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binop(other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self._binop(other, lambda a, b: b / a)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        with mpmath.workprec(self.prec):
            return BigComplex(self.value**n, self.prec)

    # mpc negation and conjugation round to the ambient context precision
    def __neg__(self):
        with mpmath.workprec(self.prec):
            return BigComplex(-self.value, self.prec)

    def __abs__(self) -> BigReal:
        with mpmath.workprec(self.prec):
            return BigReal(abs(self.value), self.prec)

    def conjugate(self) -> "BigComplex":
        with mpmath.workprec(self.prec):
            return BigComplex(self.value.conjugate(), self.prec)

    def arg(self) -> BigReal:
        with mpmath.workprec(self.prec):
            return BigReal(mp.arg(self.value), self.prec)

    def ln(self) -> "BigComplex":
        with mpmath.workprec(self.prec):
            return BigComplex(mp.ln(self.value), self.prec)

    def with_prec(self, prec: int) -> "BigComplex":
        with mpmath.workprec(prec):
            return BigComplex(+self.value, prec)

    def __complex__(self):
        return complex(self.value)

    def to_json(self, digits: int | None = None) -> dict[str, str]:
        d = digits or digits_for_prec(self.prec)
        return {"im": format_decimal(self.value.imag, d),
                "re": format_decimal(self.value.real, d)}

    @classmethod
    def from_json(cls, obj: dict[str, str], prec: int) -> "BigComplex":
        return cls.of((obj["re"], obj["im"]), prec)

    def short(self, digits: int = 6) -> str:
        """``-2.13359e-69 + 4.17297e-70 i`` style display."""
        re = format_decimal(self.value.real, digits)
        im = self.value.imag
        sign = "-" if im < 0 else "+"
        with mpmath.workprec(self.prec):
            im = abs(im)
        return f"{re} {sign} {format_decimal(im, digits)} i"

    def __str__(self):
        return self.short(15)


def e_of(x, prec: int | None = None) -> BigComplex:
    """exp(2*pi*i*x).  Exact rationals are reduced mod 1 before rounding."""
    if isinstance(x, BigReal):
        prec = prec or x.prec
        with mpmath.workprec(prec + 10):
            t = x.value - mp.floor(x.value)
            v = mp.expjpi(2 * t)
        return BigComplex.of(v, prec)
    prec = prec or DEFAULT_PREC
    if isinstance(x, (int, Fraction)):
        t = Fraction(x) % 1
        with mpmath.workprec(prec + 10):
            v = mp.expjpi(2 * (mp.mpf(t.numerator) / t.denominator))
        return BigComplex.of(v, prec)
    raise TypeError(f"e_of expects BigReal or exact rational, got {type(x)}")


def cplx_exp(z: BigComplex) -> BigComplex:
    with mpmath.workprec(z.prec):
        return BigComplex(mp.exp(z.value), z.prec)


def agree_to_digits(a: BigComplex, b: BigComplex, d: int, *,
                    zero_clause: bool = True) -> bool:
    """True iff ``|a - b| <= 10**(1-d) * max(|a|, |b|)``.

    With ``zero_clause`` two values that are both below ``10**(-0.3*prec)``
    also count as agreeing.  Turn it off when tiny values are genuine
    (Siegel invariants routinely sit far below that floor).
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    p = max(a.prec, b.prec)
    with mpmath.workprec(p):
        x, y = a.value, b.value
        scale = max(abs(x), abs(y))
        if abs(x - y) <= mp.mpf(10) ** (1 - d) * scale:
            return True
        if zero_clause:
            floor = mp.mpf(10) ** (-0.3 * p)
            return abs(x) < floor and abs(y) < floor
        return False
