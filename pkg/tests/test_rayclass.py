import itertools
import math
from dataclasses import replace
from math import gcd

import mpmath
import pytest
from mpmath import mp

from siegelcm.bigcomplex import BigComplex, agree_to_digits
from siegelcm.cmdata import CmContext, type_norm
from siegelcm.cyclofield import CycloElem, norm_to_Q, parse_elem, solve_in_basis
from siegelcm.rayclass import (
    InvariantError,
    InsufficientPrecision,
    UnsupportedField,
    characters,
    check_magnitudes,
    cm_point,
    cm_point_from_basis,
    compute_invariants,
    enumerate_ray_classes,
    independence_check,
    r_vector,
    r_vector_of,
    same_class,
    stickelberger_sum,
    unit_count_formula,
    unit_generators,
)
from siegelcm.reference import rows
from siegelcm.theta import PoleError
from siegelcm.verify import log2_rel_matrix

# C_10 for the conductor 6: the same value came out at 512, 768 and 1024 bits
# and through three unrelated representatives with freshly reduced bases
C10_CONDUCTOR_6 = "3.46284306590e-348"


def brute_unit_count(ell, N):
    # residues a in O_K / N whose lift has norm prime to N
    count = 0
    for coords in itertools.product(range(N), repeat=ell - 1):
        a = CycloElem.from_powers(ell, [0, *coords])
        if a and gcd(int(norm_to_Q(a)), N) == 1:
            count += 1
    return count


@pytest.mark.parametrize("ell,N", [(5, 2), (5, 3), (5, 5), (3, 4), (7, 2)])
def test_unit_count_two_ways(ell, N):
    table = enumerate_ray_classes(ell, N, align=False)
    assert table.residue_unit_count == brute_unit_count(ell, N)
    assert table.residue_unit_count == unit_count_formula(ell, N)
    assert table.order * table.unit_image_order == table.residue_unit_count


def test_conductor_two():
    table = enumerate_ray_classes(5, 2)
    assert table.residue_unit_count == 15
    assert table.order == 15 // table.unit_image_order


def test_unit_generators_are_units():
    for ell in (5, 7, 11, 13):
        for u in unit_generators(ell):
            assert abs(norm_to_Q(u)) == 1


def test_group_structure_examples():
    t5 = enumerate_ray_classes(5, 5)
    assert t5.order == 5 and t5.is_cyclic() and t5.group_structure == (5,)
    gen = t5.by_label(1)
    assert gen.representative == parse_elem("2 + z", 5)
    assert t5.class_of(parse_elem("2 + z", 5)) == gen
    t6 = enumerate_ray_classes(5, 6)
    assert t6.order == 10 and t6.is_cyclic() and t6.group_structure == (10,)
    assert not t5.notes and not t6.notes


def test_labels_follow_powers_of_generator():
    for N in (5, 6):
        t = enumerate_ray_classes(5, N)
        gen = t.by_label(1)
        acc = gen
        for k in range(2, t.order + 1):
            acc = t.multiply(acc, gen)
            assert acc.label == k
        assert acc.label == t.order  # identity carries the last label


def test_validation():
    with pytest.raises(ValueError, match="not an odd prime"):
        enumerate_ray_classes(4, 5)
    with pytest.raises(UnsupportedField, match="class number"):
        enumerate_ray_classes(23, 2)
    with pytest.raises(ValueError):
        enumerate_ray_classes(5, 1)


def test_r_vectors_against_published_rows(ctx5):
    for N in (5, 6):
        t = enumerate_ray_classes(5, N)
        for cls, (nums, _) in zip(t.classes, rows(5, N)):
            assert r_vector(ctx5, t, cls) == tuple(nums)
    assert r_vector_of(ctx5, parse_elem("2 + z", 5), 5) == (1, 2, 0, 3)


def test_r_vector_of_one(ctx5):
    # phi(1) = 1 = -(x-basis combination); the identity class is labelled C_5
    t = enumerate_ray_classes(5, 5)
    ident = t.by_label(5)
    assert same_class(t, ident.representative, CycloElem.one(5))
    assert r_vector(ctx5, t, ident) == (1, 1, 0, 1)


def test_type_norm_solution_is_multiplicative(ctx5):
    a, b = parse_elem("2 + z", 5), parse_elem("1 - z^2 + 3*z^3", 5)
    xs = ctx5.x_basis()
    lhs = solve_in_basis(type_norm(ctx5, a * b), xs).coeffs
    rhs = solve_in_basis(type_norm(ctx5, a) * type_norm(ctx5, b), xs).coeffs
    assert lhs == rhs


def test_cm_point_properties(ctx5):
    Z = cm_point(ctx5, 256)
    with mpmath.workprec(256):
        assert abs(Z.entries[0][1] - Z.entries[1][0]) < mp.mpf(2) ** -240
        Y = mpmath.matrix(Z.imag_part())
        assert Y[0, 0] > 0 and mp.det(Y) > 0
    Z2 = cm_point(ctx5, 512)
    assert log2_rel_matrix(Z.entries, Z2.entries) < -248


def test_cm_point_degenerate():
    ctx = CmContext.for_prime(5)
    xs = ctx.x_basis()
    with pytest.raises(ArithmeticError, match="degenerate CM data"):
        cm_point_from_basis(ctx, [xs[0], xs[1], xs[0], xs[0]], 128)


def test_published_values_c1_c5(table5):
    c1 = table5.invariants[1]
    assert c1.short() == "-2.13359e-69 + 4.17297e-70 i"
    c5 = table5.invariants[5]
    assert agree_to_digits(c5, BigComplex.of("4.85930e-254"), 5, zero_clause=False)


def test_conductor_six_last_class(table6):
    c10 = table6.invariants[10]
    assert agree_to_digits(c10, BigComplex.of(C10_CONDUCTOR_6, 768), 11, zero_clause=False)
    with mpmath.workprec(768):
        assert abs(c10.value.imag) < abs(c10.value) * mp.mpf(2) ** -600


def test_magnitude_guard():
    t = compute_invariants(enumerate_ray_classes(5, 5), 64)
    with pytest.raises(InsufficientPrecision, match="insufficient precision for target magnitudes"):
        check_magnitudes(t)


def test_invariant_error_names_class(monkeypatch):
    import siegelcm.rayclass as rc

    def boom(*a, **k):
        raise PoleError("pole of Theta: forced")

    monkeypatch.setattr(rc, "big_theta", boom)
    with pytest.raises(InvariantError, match=r"^C_1: pole of Theta"):
        compute_invariants(enumerate_ray_classes(5, 5), 128)


def test_parallel_matches_sequential():
    t = enumerate_ray_classes(5, 5)
    seq = compute_invariants(t, 256)
    par = compute_invariants(t, 256, jobs=2)
    assert {k: v.value for k, v in seq.invariants.items()} == {k: v.value for k, v in par.invariants.items()}


def test_independence_examples(ctx5, table5):
    cls = table5.by_label(1)
    lam = cls.representative
    u = CycloElem.one(5) + CycloElem.zeta(5)  # a unit
    alt = lam * u**5
    assert independence_check(ctx5, table5, cls, alt, 512)
    alt2 = lam * (CycloElem.one(5) + CycloElem.zeta(5, 2) * 5)  # = 1 mod f, norm > 1
    assert abs(norm_to_Q(alt2)) > abs(norm_to_Q(lam))
    assert independence_check(ctx5, table5, cls, alt2, 512, reverse_ties=True)
    with pytest.raises(ValueError, match="not same ray class"):
        independence_check(ctx5, table5, cls, table5.by_label(2).representative, 512)


def test_stickelberger(table5):
    chis = characters(table5)
    assert len(chis) == 5 and sum(c.is_trivial() for c in chis) == 1
    with mpmath.workprec(512):
        total = sum(mp.ln(abs(v.value)) for v in table5.invariants.values())
    triv = next(c for c in chis if c.is_trivial())
    s0 = stickelberger_sum(table5, triv)
    with mpmath.workprec(512):
        assert abs(s0.value - total) < mp.mpf(2) ** -480
    for chi in chis:
        if chi.is_trivial():
            continue
        s = stickelberger_sum(table5, chi)
        sc = stickelberger_sum(table5, chi.conjugate())
        with mpmath.workprec(512):
            assert abs(s.value) > 10
            assert abs(sc.value - mp.conj(s.value)) < mp.mpf(2) ** -480


def test_stickelberger_log_of_zero(table5):
    zeroed = dict(table5.invariants)
    zeroed[3] = BigComplex.of(0, 512)
    with pytest.raises(ValueError, match="log of zero"):
        stickelberger_sum(replace(table5, invariants=zeroed), characters(table5)[1])


def test_characters_multiplicative():
    t = enumerate_ray_classes(5, 6)
    for chi in characters(t):
        for a in t.classes:
            for b in t.classes:
                assert chi(t.multiply(a, b)) == (chi(a) + chi(b)) % 1


def test_class_of_rejects_non_units():
    t = enumerate_ray_classes(5, 5)
    with pytest.raises(ValueError):
        t.class_of(CycloElem.one(5) - CycloElem.zeta(5))  # divides 5


def test_other_fields_enumerate():
    t = enumerate_ray_classes(7, 2)
    assert t.order * t.unit_image_order == unit_count_formula(7, 2)
    assert math.prod(t.group_structure) == t.order
