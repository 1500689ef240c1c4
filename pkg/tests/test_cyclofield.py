from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp

from siegelcm.cyclofield import (
    CycloElem,
    CycloIdeal,
    check_prime,
    conjugate,
    embed,
    format_elem,
    galois_apply,
    norm_to_Q,
    parse_elem,
    solve_in_basis,
    trace_to_Q,
)
from siegelcm.cmdata import CmContext, type_norm

Z = CycloElem.zeta


def elems(ell, bound=6):
    return st.lists(st.integers(-bound, bound), min_size=ell - 1, max_size=ell - 1).map(
        lambda c: CycloElem.from_coords(ell, c))


ells = st.sampled_from([3, 5, 7, 11])


@st.composite
def pair(draw, n=2):
    ell = draw(ells)
    return (ell, *(draw(elems(ell)) for _ in range(n)))


def test_canonical_form_uses_sum_of_roots():
    one = CycloElem.one(5)
    assert one.coords == (-1, -1, -1, -1)
    assert CycloElem.from_powers(5, [1, 1, 1, 1, 1]) == CycloElem.zero(5)
    # Phi_5(zeta) = 0
    z = Z(5)
    assert one + z + z**2 + z**3 + z**4 == CycloElem.zero(5)


def test_galois_examples():
    assert galois_apply(Z(5), 2) == Z(5, 2)
    two_z = parse_elem("2 + z", 5)
    assert galois_apply(two_z, 3) == parse_elem("2 + z^3", 5)
    with pytest.raises(ValueError):
        galois_apply(Z(5), 5)


def test_trace_examples():
    assert trace_to_Q(CycloElem.one(5)) == 4
    assert trace_to_Q(Z(5)) == -1
    assert trace_to_Q(Z(5) + Z(5, 4)) == -2


def test_norm_examples():
    assert norm_to_Q(parse_elem("2 + z", 5)) == 11
    assert norm_to_Q(CycloElem.one(5)) == 1
    assert norm_to_Q(CycloElem.one(5) + Z(5)) == 1


def test_norm_of_two_plus_zeta_is_phi5_at_minus_two():
    # brute force: product of the four conjugates equals Phi_5(-2) = 11
    prod = CycloElem.one(5)
    for i in range(1, 5):
        prod = prod * (CycloElem.rational(5, 2) + Z(5, i))
    assert prod.as_rational() == 16 - 8 + 4 - 2 + 1


def test_conjugate_examples():
    assert conjugate(Z(5)) == Z(5, 4)
    xi = (Z(5) - Z(5, -1)) / 5
    assert conjugate(xi) == -xi
    assert trace_to_Q(xi) == 0


def test_embed_examples():
    for p in (64, 256):
        assert embed(CycloElem.one(5), 2, p).value == 1
    v = embed(Z(5), 1, 256).value
    with mpmath.workprec(256):
        assert abs(v - mp.expjpi(mp.mpf(2) / 5)) < mp.mpf(2) ** -250


@settings(max_examples=60, deadline=None)
@given(pair(3))
def test_ring_laws(data):
    ell, a, b, c = data
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c


@settings(max_examples=60, deadline=None)
@given(pair(2), st.integers(1, 100), st.integers(1, 100))
def test_galois_action_law(data, i, j):
    ell, a, b = data
    i, j = i % ell or 1, j % ell or 1
    assert galois_apply(galois_apply(a, i), j) == galois_apply(a, (i * j) % ell)
    assert galois_apply(a * b, i) == galois_apply(a, i) * galois_apply(b, i)


@settings(max_examples=40, deadline=None)
@given(pair(1))
def test_conjugate_involution_and_inverse(data):
    ell, a = data
    assert conjugate(conjugate(a)) == a
    if a:
        assert a * a.inverse() == CycloElem.one(ell)
        assert a / a == CycloElem.one(ell)


@settings(max_examples=25, deadline=None)
@given(pair(1))
def test_trace_and_norm_match_embeddings(data):
    ell, a = data
    with mpmath.workprec(256):
        vals = [embed(a, i, 256).value for i in range(1, ell)]
        tr = sum(vals)
        nm = mp.fprod(vals)
        assert abs(tr - trace_to_Q(a)) < mp.mpf(2) ** -200 * max(1, abs(tr))
        assert abs(nm - norm_to_Q(a)) < mp.mpf(2) ** -200 * max(1, abs(nm))


@settings(max_examples=25, deadline=None)
@given(pair(1))
def test_embed_of_conjugate(data):
    ell, a = data
    with mpmath.workprec(256):
        x = embed(a, 1, 256).value
        y = embed(conjugate(a), 1, 256).value
        assert abs(abs(x * y) - abs(x) ** 2) < mp.mpf(2) ** -200 * max(1, abs(x) ** 2)


@settings(max_examples=40, deadline=None)
@given(pair(1))
def test_imaginary_elements_have_zero_trace(data):
    ell, a = data
    c = a - conjugate(a)
    assert conjugate(c) == -c
    assert trace_to_Q(c) == 0


def test_solve_in_basis_examples():
    ctx = CmContext.for_prime(5)
    xs = ctx.x_basis()
    assert solve_in_basis(xs[1], xs).coeffs == (0, 1, 0, 0)
    sol = solve_in_basis(type_norm(ctx, parse_elem("2 + z", 5)), xs)
    assert sol.integral
    assert tuple(int(c) % 5 for c in sol.coeffs) == (1, 2, 0, 3)
    with pytest.raises(ValueError, match="basis not independent"):
        solve_in_basis(xs[0], [xs[0], xs[0], xs[1], xs[2]])


@settings(max_examples=40, deadline=None)
@given(pair(1), st.lists(st.integers(-4, 4), min_size=4, max_size=4))
def test_solve_round_trip(data, seed):
    ell, a = data
    basis = [Z(ell, k) + Z(ell, k + 1) * Fraction(seed[k % 4], 3) for k in range(1, ell)]
    try:
        sol = solve_in_basis(a, basis)
    except ValueError:
        return  # dependent basis drawn
    back = CycloElem.zero(ell)
    for c, b in zip(sol.coeffs, basis):
        back = back + b * c
    assert back == a


@settings(max_examples=60, deadline=None)
@given(pair(1))
def test_parse_format_round_trip(data):
    ell, a = data
    assert parse_elem(format_elem(a), ell) == a


def test_parse_examples():
    assert format_elem(parse_elem("2 + z^1", 5)) == "2 + z^1"
    a = parse_elem("2 + z^1 - 3/2*z^4", 5)
    assert a == CycloElem.rational(5, 2) + Z(5) - Z(5, 4) * Fraction(3, 2)
    for bad in ("", "2 +", "z^", "x^2"):
        with pytest.raises(ValueError):
            parse_elem(bad, 5)


def test_validation():
    for bad in (1, 2, 4, 9, 15):
        with pytest.raises(ValueError):
            check_prime(bad)
    with pytest.raises(ValueError):
        CycloIdeal(CycloElem.zero(5))
    assert CycloIdeal(parse_elem("2 + z", 5)).norm() == 11
