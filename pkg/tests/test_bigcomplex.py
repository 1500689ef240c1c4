from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp

from siegelcm.bigcomplex import (
    BigComplex,
    BigReal,
    agree_to_digits,
    cplx_exp,
    digits_for_prec,
    e_of,
    format_decimal,
)


def close(a, b, bits):
    with mpmath.workprec(4 * bits):
        return abs(mp.mpc(a) - mp.mpc(b)) <= mp.mpf(2) ** (-bits) * max(1, abs(mp.mpc(b)))


def test_e_of_special_values():
    assert e_of(0, 256).value == 1
    assert close(e_of(Fraction(1, 2), 256).value, -1, 250)
    assert close(e_of(Fraction(1, 4), 256).value, 1j, 250)


def test_e_of_eighth_against_doubled_precision():
    v = e_of(Fraction(1, 8), 256)
    with mpmath.workprec(512):
        ref = mp.sqrt(2) / 2 * mp.mpc(1, 1)
    assert close(v.value, ref, 250)


def test_e_of_bigreal_uses_its_precision():
    with mpmath.workprec(300):
        x = BigReal(mp.mpf(1) / 3, 300)
    v = e_of(x)
    assert v.prec == 300
    with mpmath.workprec(600):
        ref = mp.expjpi(mp.mpf(2) / 3)
    assert close(v.value, ref, 290)


@settings(max_examples=50, deadline=None)
@given(st.fractions(min_value=-50, max_value=50, max_denominator=1000))
def test_e_of_modulus_and_period(x):
    a, b = e_of(x, 200), e_of(x + 1, 200)
    with mpmath.workprec(400):
        assert abs(abs(a.value) - 1) < mp.mpf(2) ** -195
    assert a.value == b.value  # exact reduction mod 1


def test_cplx_exp():
    with mpmath.workprec(256):
        ipi = BigComplex(mp.mpc(0, mp.pi), 256)
    assert cplx_exp(BigComplex.of(0, 256)).value == 1
    assert close(cplx_exp(ipi).value, -1, 250)
    z = BigComplex.of((1, 1), 256)
    with mpmath.workprec(512):
        ref = mp.exp(mp.mpc(1, 1))
    assert close(cplx_exp(z).value, ref, 252)


def test_agree_to_digits_examples():
    assert agree_to_digits(BigComplex.of(Fraction(100000, 100000)), BigComplex.of(Fraction(100001, 100000)), 5)
    assert not agree_to_digits(BigComplex.of(1), BigComplex.of(2), 2)
    assert agree_to_digits(BigComplex.of(0), BigComplex.of(0), 10)
    with pytest.raises(ValueError):
        agree_to_digits(BigComplex.of(1), BigComplex.of(1), 0)


def test_zero_clause_can_be_disabled():
    tiny1 = BigComplex.of("1e-300", 256)
    tiny2 = BigComplex.of("2e-300", 256)
    assert agree_to_digits(tiny1, tiny2, 5)
    assert not agree_to_digits(tiny1, tiny2, 5, zero_clause=False)


def test_mixed_precision_promotes_to_max():
    a = BigComplex.of(1, 100)
    b = BigComplex.of(3, 300)
    assert (a / b).prec == 300
    assert (BigReal.of(1, 80) + BigReal.of(2, 90)).prec == 90


def test_unary_ops_keep_precision():
    # negation and conjugation must not round to the ambient 53-bit context
    with mpmath.workprec(512):
        x = mp.mpc(1, 1) / 3
        neg, re = -x, x.real
        neg_im, neg_re = -x.imag, -x.real
    z = BigComplex(x, 512)
    assert (-z).value == neg
    assert z.conjugate().value.imag == neg_im
    assert abs(z.re).value == re
    assert (-BigReal(re, 512)).value == neg_re


def test_format_decimal_always_has_exponent():
    assert format_decimal(mp.mpf(1), 5) == "1.0000e+0"
    assert format_decimal(mp.mpf("-2.133593649e-69"), 6) == "-2.13359e-69"
    assert "e" in format_decimal(mp.mpf(0), 3)


def test_short_rendering():
    z = BigComplex.of(("-2.133593649e-69", "4.1729651e-70"), 256)
    assert z.short() == "-2.13359e-69 + 4.17297e-70 i"
    assert z.conjugate().short() == "-2.13359e-69 - 4.17297e-70 i"


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=-1e200, max_value=1e200, allow_nan=False),
       st.floats(min_value=-1e200, max_value=1e200, allow_nan=False),
       st.sampled_from([64, 128, 512]))
def test_json_round_trip(re, im, prec):
    z = BigComplex.of((re, im), prec)
    back = BigComplex.from_json(z.to_json(), prec)
    assert back.to_json() == z.to_json()
    assert agree_to_digits(z, back, digits_for_prec(prec) - 1)
