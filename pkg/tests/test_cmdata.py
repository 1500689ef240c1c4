import random
from fractions import Fraction

import mpmath
import pytest
from mpmath import mp

from siegelcm import exact
from siegelcm.cmdata import (
    CmContext,
    RiemannFormSpec,
    compute_mc,
    gram_matrix,
    polarization_spec,
    psi_embed,
    riemann_pairing,
    scaled_basis,
    standard_J,
    type_norm,
)
from siegelcm.cyclofield import SUPPORTED_PRIMES, CycloElem, CycloIdeal, parse_elem


def rand_elem(ell, rng, bound=4):
    while True:
        a = CycloElem.from_coords(ell, [rng.randint(-bound, bound) for _ in range(ell - 1)])
        if a:
            return a


def test_context_for_five(ctx5):
    assert ctx5.g == 2
    assert ctx5.type_exponents == (1, 2)
    assert ctx5.reflex_exponents == (1, 3)
    assert ctx5.xi == (CycloElem.zeta(5) - CycloElem.zeta(5, 4)) / 5


@pytest.mark.parametrize("ell", SUPPORTED_PRIMES)
def test_xi_positive_and_x_basis_symplectic(ell):
    ctx = CmContext.for_prime(ell)
    assert ctx.xi_positive(256)
    G, is_J = gram_matrix(RiemannFormSpec(ctx.xi), ctx.x_basis())
    assert is_J
    assert abs(exact.det(G)) == 1


def test_type_norm_examples(ctx5):
    assert type_norm(ctx5, CycloElem.one(5)) == CycloElem.one(5)
    expected = CycloElem.from_coords(5, [-2, -4, -2, -3])
    assert type_norm(ctx5, parse_elem("2 + z", 5)) == expected


def test_type_norm_multiplicative():
    rng = random.Random(11)
    for _ in range(100):
        ell = rng.choice([5, 7, 11])
        ctx = CmContext.for_prime(ell)
        a, b = rand_elem(ell, rng), rand_elem(ell, rng)
        assert type_norm(ctx, a * b) == type_norm(ctx, a) * type_norm(ctx, b)


def test_psi_embed_examples(ctx5):
    assert all(v.value == 0 for v in psi_embed(ctx5, CycloElem.zero(5), 128))
    z = psi_embed(ctx5, CycloElem.zeta(5), 256)
    with mpmath.workprec(256):
        assert abs(z[0].value - mp.expjpi(mp.mpf(2) / 5)) < mp.mpf(2) ** -250
        assert abs(z[1].value - mp.expjpi(mp.mpf(4) / 5)) < mp.mpf(2) ** -250
    a, b = parse_elem("1 + 2*z^3", 5), parse_elem("z^2 - z^4", 5)
    s = psi_embed(ctx5, a + b, 256)
    pa, pb = psi_embed(ctx5, a, 256), psi_embed(ctx5, b, 256)
    with mpmath.workprec(256):
        for x, y, w in zip(s, pa, pb):
            assert abs(x.value - y.value - w.value) < mp.mpf(2) ** -240


def test_riemann_pairing_alternating(ctx5):
    rng = random.Random(3)
    spec = RiemannFormSpec(ctx5.xi, Fraction(11, 25))
    for _ in range(30):
        a, b = rand_elem(5, rng), rand_elem(5, rng)
        assert riemann_pairing(spec, a, a) == 0
        assert riemann_pairing(spec, a, b) == -riemann_pairing(spec, b, a)


def test_riemann_form_requires_imaginary_element(ctx5):
    with pytest.raises(ValueError):
        RiemannFormSpec(CycloElem.one(5))


def test_compute_mc_examples(ctx5):
    lam = parse_elem("2 + z", 5)
    assert compute_mc(ctx5, 5, CycloIdeal(lam)) == Fraction(11, 25)
    assert compute_mc(ctx5, 7, CycloIdeal(CycloElem.one(5))) == Fraction(1, 49)
    mu = parse_elem("3 - z^2", 5)
    lhs = compute_mc(ctx5, 5, CycloIdeal(lam * mu))
    assert lhs == compute_mc(ctx5, 5, CycloIdeal(lam)) * abs(CycloIdeal(mu).norm())


def test_example_gram_is_J(ctx5):
    lam = parse_elem("2 + z", 5)
    spec = polarization_spec(ctx5, 5, lam)
    G, is_J = gram_matrix(spec, scaled_basis(ctx5, 5, lam))
    assert is_J and G == standard_J(2)


def test_gram_permuted_basis(ctx5):
    lam = parse_elem("2 + z", 5)
    spec = polarization_spec(ctx5, 5, lam)
    basis = scaled_basis(ctx5, 5, lam)
    perm = [2, 0, 3, 1]
    G, _ = gram_matrix(spec, basis)
    Gp, is_J = gram_matrix(spec, [basis[i] for i in perm])
    assert not is_J
    assert Gp == [[G[i][j] for j in perm] for i in perm]


def test_gram_integral_on_lattice_for_many_ideals(ctx5):
    # the Riemann form is integral on f phi(c)^-1 for every c prime to f
    rng = random.Random(5)
    for N in (2, 3, 5, 6):
        for _ in range(10):
            lam = rand_elem(5, rng, 3)
            from siegelcm.cyclofield import coprime_to
            if not coprime_to(lam, N):
                continue
            G, _ = gram_matrix(polarization_spec(ctx5, N, lam), scaled_basis(ctx5, N, lam))
            assert all(x.denominator == 1 for row in G for x in row)
            assert all(G[i][j] == -G[j][i] for i in range(4) for j in range(4))
