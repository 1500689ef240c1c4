"""Ray classes of Q(zeta_l) modulo N O_K and their Siegel invariants.

With class number one, Cl(N O_K) is (O_K / N)^x modulo the image of the
global units, so classes are enumerated exhaustively on residue vectors.
Each class C with generator lam gets the CM point Z (independent of C) and
the characteristic r/N, where phi(lam) = sum r_j x_j in the symplectic basis
x_j; its invariant is Theta(r/N, Z).
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import gcd, log2
from typing import Sequence

import mpmath
from mpmath import mp

from . import reference
from .bigcomplex import BigComplex, agree_to_digits
from .cmdata import (
    CmContext,
    gram_matrix,
    polarization_spec,
    psi_embed,
    type_norm,
)
from .cyclofield import SUPPORTED_PRIMES, CycloElem, check_prime, parse_elem, solve_in_basis
from .symplectic import SiegelPoint, symplectic_reduce
from .theta import ThetaChar, big_theta, big_theta_working_prec

log = logging.getLogger(__name__)

Residue = tuple[int, ...]

MAX_RESIDUES = 300_000


class UnsupportedField(ValueError):
    pass


class InsufficientPrecision(ArithmeticError):
    pass


# -- residue arithmetic -----------------------------------------------------------

def _mul_res(a: Residue, b: Residue, ell: int, N: int) -> Residue:
    out = [0] * ell
    for i, x in enumerate(a, start=1):
        if x:
            for j, y in enumerate(b, start=1):
                if y:
                    out[(i + j) % ell] += x * y
    c0 = out[0]
    return tuple((x - c0) % N for x in out[1:])


def _galois_res(a: Residue, i: int, ell: int) -> Residue:
    out = [0] * ell
    for k, x in enumerate(a, start=1):
        out[(i * k) % ell] = x
    return tuple(out[1:])


def _norm_res(a: Residue, ell: int, N: int) -> int:
    prod = a
    for i in range(2, ell):
        prod = _mul_res(prod, _galois_res(a, i, ell), ell, N)
    # a rational q is stored as (-q, ..., -q)
    return (-prod[0]) % N


def residue_of(a: CycloElem, N: int) -> Residue:
    if not a.is_integral():
        raise ValueError("only integral elements have residues")
    return tuple(int(c) % N for c in a.coords)


def centered_lift(res: Residue, N: int) -> CycloElem:
    half = N // 2
    return CycloElem.from_coords(len(res) + 1, [x - N if x > half else x for x in res])


def _lift_key(res: Residue, N: int):
    e = centered_lift(res, N)
    return (e.height(), e.coords)


def unit_generators(ell: int) -> list[CycloElem]:
    """-zeta and the cyclotomic units (1 - zeta^a)/(1 - zeta), 2 <= a <= (l-1)/2."""
    gens = [-CycloElem.zeta(ell, 1)]
    for a in range(2, (ell - 1) // 2 + 1):
        gens.append(CycloElem.from_powers(ell, [1] * a))  # 1 + zeta + ... + zeta^(a-1)
    return gens


def unit_count_formula(ell: int, N: int) -> int:
    """|(O_K / N O_K)^x| from the splitting of primes in Q(zeta_l).

    p != l splits into (l-1)/f primes of norm p^f, f the order of p mod l;
    l is totally ramified with residue field F_l.
    """
    count = 1
    n, p = N, 2
    while n > 1:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            if p == ell:
                count *= ell ** ((ell - 1) * e - 1) * (ell - 1)
            else:
                f = 1
                while pow(p, f, ell) != 1:
                    f += 1
                q = p**f
                count *= (q ** (e - 1) * (q - 1)) ** ((ell - 1) // f)
        p += 1
    return count


# -- the class group ---------------------------------------------------------------

@dataclass(frozen=True)
class RayClass:
    label: int | tuple[int, ...]
    representative: CycloElem
    residue: Residue
    exponents: tuple[int, ...]
    coset: int = field(default=-1, compare=False, repr=False)

    @property
    def name(self) -> str:
        if isinstance(self.label, int):
            return f"C_{self.label}"
        return "C_(" + ",".join(map(str, self.label)) + ")"


@dataclass(frozen=True)
class RayClassTable:
    ell: int
    N: int
    classes: tuple[RayClass, ...]
    group_structure: tuple[int, ...]
    coset_of: dict[Residue, int] = field(repr=False)
    unit_image_order: int = 0
    residue_unit_count: int = 0
    invariants: dict = field(default_factory=dict, repr=False)
    r_vectors: dict = field(default_factory=dict)
    cm_point: SiegelPoint | None = field(default=None, repr=False)
    prec: int | None = None
    notes: tuple[str, ...] = ()

    @property
    def order(self) -> int:
        return len(self.classes)

    def is_cyclic(self) -> bool:
        return len(self.group_structure) <= 1

    def by_label(self, label) -> RayClass:
        for c in self.classes:
            if c.label == label:
                return c
        raise KeyError(label)

    def class_of(self, a: CycloElem) -> RayClass:
        res = residue_of(a, self.N)
        idx = self.coset_of.get(res)
        if idx is None:
            raise ValueError("element is not prime to the conductor")
        return next(c for c in self.classes if c.coset == idx)

    def multiply(self, a: RayClass, b: RayClass) -> RayClass:
        exps = tuple((x + y) % d for x, y, d in zip(a.exponents, b.exponents, self.group_structure))
        return next(c for c in self.classes if c.exponents == exps)


def _element_order(x: int, mul, identity: int) -> int:
    k, y = 1, x
    while y != identity:
        y = mul(y, x)
        k += 1
    return k


def _invariant_factors(orders: Sequence[int]) -> tuple[int, ...]:
    """Invariant factors d_1 | ... | d_t of a finite abelian group from the
    multiset of element orders."""
    n = len(orders)
    primes = _prime_divisors(n)
    factors: list[int] = []
    per_prime: dict[int, list[int]] = {}
    for p in primes:
        # number of elements with order dividing p^j
        counts = [sum(1 for o in orders if _p_part(o, p) <= p**j) for j in range(0, 64)]
        ranks = []  # ranks[j] = number of cyclic p-factors of order >= p^(j+1)
        for j in range(63):
            ratio = counts[j + 1] // counts[j]
            if ratio == 1:
                break
            ranks.append(round(log2(ratio) / log2(p)))
        exps = []
        for j, rk in enumerate(ranks):
            nxt = ranks[j + 1] if j + 1 < len(ranks) else 0
            exps += [j + 1] * (rk - nxt)
        per_prime[p] = sorted(exps, reverse=True)
    t = max((len(v) for v in per_prime.values()), default=0)
    for i in range(t):
        d = 1
        for p, exps in per_prime.items():
            if i < len(exps):
                d *= p ** exps[i]
        factors.append(d)
    return tuple(sorted(factors))


def _prime_divisors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _p_part(n: int, p: int) -> int:
    out = 1
    while n % p == 0:
        n //= p
        out *= p
    return out


def _find_basis(elements: list[int], orders: dict[int, int], factors: tuple[int, ...],
                mul, identity: int, preferred: list[int]) -> list[int]:
    """Generators g_1..g_t with ord(g_i) = factors[i] spanning the group
    (brute force with backtracking; the groups here are small)."""
    n = len(elements)

    def span(gens):
        seen = {identity}
        frontier = [identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return len(seen)

    want = list(reversed(factors))  # largest first
    ordered = preferred + [e for e in elements if e not in preferred]

    def rec(chosen):
        k = len(chosen)
        if k == len(want):
            return chosen if span(chosen) == n else None
        size_needed = 1
        for d in want[:k + 1]:
            size_needed *= d
        for e in ordered:
            if orders[e] == want[k] and e not in chosen and span(chosen + [e]) == size_needed:
                got = rec(chosen + [e])
                if got is not None:
                    return got
        return None

    basis = rec([])
    assert basis is not None
    return list(reversed(basis))  # smallest factor first, matching `factors`


def enumerate_ray_classes(ell: int, N: int, align: bool = True) -> RayClassTable:
    """Enumerate Cl(N O_K) for K = Q(zeta_l) by exhaustion over residues."""
    check_prime(ell)
    if ell not in SUPPORTED_PRIMES:
        raise UnsupportedField(f"class number ≠ 1 unsupported (l = {ell})")
    if N < 2:
        raise ValueError("conductor N must be at least 2")
    if N ** (ell - 1) > MAX_RESIDUES:
        raise ValueError(f"residue ring of size {N}^{ell - 1} is too large to enumerate")
    ctx = CmContext.for_prime(ell)

    units = [res for res in itertools.product(range(N), repeat=ell - 1)
             if gcd(_norm_res(res, ell, N), N) == 1]
    one = residue_of(CycloElem.one(ell), N)

    def mul(a, b):
        return _mul_res(a, b, ell, N)

    H = {one}
    frontier = [one]
    gens = [residue_of(u, N) for u in unit_generators(ell)]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mul(x, g)
                if y not in H:
                    H.add(y)
                    nxt.append(y)
        frontier = nxt

    coset_of: dict[Residue, int] = {}
    cosets: list[list[Residue]] = []
    for u in units:
        if u in coset_of:
            continue
        idx = len(cosets)
        members = [mul(u, h) for h in H]
        for m in members:
            coset_of[m] = idx
        cosets.append(members)
    n = len(cosets)
    assert n * len(H) == len(units)

    def cmul(i: int, j: int) -> int:
        return coset_of[mul(cosets[i][0], cosets[j][0])]

    ident = coset_of[one]
    orders = {i: _element_order(i, cmul, ident) for i in range(n)}
    factors = _invariant_factors(list(orders.values())) if n > 1 else ()

    ref = reference.rows(ell, N) if align else None
    notes: list[str] = []
    wanted: dict[int, tuple[int, ...]] = {}
    if ref is not None:
        rmap = _r_vectors_by_residue(ctx, N, units)
        if len(factors) != 1 or factors[0] != len(ref):
            notes.append(f"reference table has {len(ref)} rows but the group is {factors}")
            ref = None
        else:
            gen_idx = _class_matching(rmap, coset_of, ref[0][0], N)
            if gen_idx is None or orders[gen_idx] != n:
                notes.append("no generator matches the reference C_1 vector")
                ref = None
    if ref is not None:
        basis = [gen_idx]
        wanted = {k: tuple(row[0]) for k, row in enumerate(ref, start=1)}
    elif n == 1:
        basis = []
    else:
        by_height = sorted(range(n), key=lambda i: min(_lift_key(m, N) for m in cosets[i]))
        basis = _find_basis(list(range(n)), orders, factors, cmul, ident, by_height)

    # exponent vectors of every class w.r.t. the basis
    exps_of: dict[int, tuple[int, ...]] = {}
    for e in itertools.product(*(range(d) for d in factors)):
        x = ident
        for gi, k in zip(basis, e):
            for _ in range(k):
                x = cmul(x, gi)
        exps_of[x] = e
    assert len(exps_of) == n

    classes = []
    for idx in range(n):
        e = exps_of[idx]
        if len(factors) == 1:
            label: int | tuple[int, ...] = e[0] if e[0] else factors[0]
        elif not factors:
            label = 1
        else:
            label = e
        members = cosets[idx]
        rep_res = min(members, key=lambda m: _lift_key(m, N))
        if wanted and isinstance(label, int):
            target = wanted[label]
            match = _best_match(rmap, members, target, N)
            if match is None:
                notes.append(f"C_{label}: no representative reproduces the reference vector {target}")
            else:
                rep_res = match
        classes.append(RayClass(label, centered_lift(rep_res, N), rep_res, e, idx))
    classes.sort(key=lambda c: (c.label if isinstance(c.label, int) else 0, c.exponents))

    gen_text = reference.GENERATOR_TEXT.get((ell, N)) if align else None
    if gen_text is not None:
        gen = parse_elem(gen_text, ell)
        c1 = coset_of[residue_of(gen, N)]
        if exps_of[c1] != (1,):
            notes.append(f"class of {gen_text} is not C_1")
        elif not wanted or r_vector_of(ctx, gen, N) == wanted[1]:
            classes[0] = replace(classes[0], representative=gen, residue=residue_of(gen, N))

    return RayClassTable(
        ell=ell, N=N, classes=tuple(classes), group_structure=tuple(factors),
        coset_of=coset_of, unit_image_order=len(H), residue_unit_count=len(units),
        notes=tuple(notes),
    )


def _r_vectors_by_residue(ctx: CmContext, N: int, residues) -> dict[Residue, tuple[int, ...]]:
    return {res: r_vector_of(ctx, centered_lift(res, N), N) for res in residues}


def _class_matching(rmap, coset_of, target, N):
    neg = tuple((-x) % N for x in target)
    for want in (tuple(target), neg):
        for res, r in rmap.items():
            if r == want:
                return coset_of[res]
    return None


def _best_match(rmap, members, target, N):
    neg = tuple((-x) % N for x in target)
    for want in (tuple(target), neg):
        hits = [m for m in members if rmap[m] == want]
        if hits:
            return min(hits, key=lambda m: _lift_key(m, N))
    return None


# -- r-vectors, CM point, invariants ------------------------------------------------

def r_vector_of(ctx: CmContext, lam: CycloElem, N: int) -> tuple[int, ...]:
    """Coordinates of phi(lam) in the basis x_j, reduced into [0, N)."""
    sol = solve_in_basis(type_norm(ctx, lam), ctx.x_basis())
    if not sol.integral:
        raise ArithmeticError("x-basis not integral basis")
    return tuple(int(c) % N for c in sol.coeffs)


def r_vector(ctx: CmContext, table: RayClassTable, cls: RayClass) -> tuple[int, ...]:
    return r_vector_of(ctx, cls.representative, table.N)


def cm_point_from_basis(ctx: CmContext, basis: Sequence[CycloElem], prec: int) -> SiegelPoint:
    """[Psi(b_{g+1}) ... Psi(b_2g)]^-1 [Psi(b_1) ... Psi(b_g)]."""
    g = ctx.g
    wp = prec + 32
    cols = [[x.value for x in psi_embed(ctx, b, wp)] for b in basis]
    with mpmath.workprec(wp):
        left = mpmath.matrix([[cols[g + j][i] for j in range(g)] for i in range(g)])
        right = mpmath.matrix([[cols[j][i] for j in range(g)] for i in range(g)])
        if abs(mp.det(left)) < mp.mpf(2) ** (-prec // 2):
            raise ArithmeticError("degenerate CM data")
        Z = left**-1 * right
    return SiegelPoint.from_matrix(Z, prec)


def cm_point(ctx: CmContext, prec: int) -> SiegelPoint:
    return cm_point_from_basis(ctx, ctx.x_basis(), prec)


def siegel_invariant(ctx: CmContext, table: RayClassTable, cls: RayClass, prec: int,
                     Z: SiegelPoint | None = None) -> BigComplex:
    N = table.N
    wp = big_theta_working_prec(ctx.g, N, prec)
    if Z is None or Z.prec < wp:
        Z = cm_point(ctx, wp)
    v = ThetaChar.from_integers(r_vector(ctx, table, cls), N)
    return big_theta(v, Z, prec, N=N)


class InvariantError(ArithmeticError):
    """A per-class failure; the message starts with the class name."""


def _invariant_for(name: str, ell: int, N: int, numerators, prec: int, Z: SiegelPoint | None = None):
    try:
        if Z is None:
            ctx = CmContext.for_prime(ell)
            Z = cm_point(ctx, big_theta_working_prec(ctx.g, N, prec))
        return big_theta(ThetaChar.from_integers(numerators, N), Z, prec, N=N)
    except (ArithmeticError, ValueError) as exc:
        raise InvariantError(f"{name}: {exc}") from exc


def _invariant_job(args):
    return _invariant_for(*args)


def compute_invariants(table: RayClassTable, prec: int, jobs: int = 1) -> RayClassTable:
    """Return a copy of ``table`` with r-vectors, the CM point and all
    invariants.  With ``jobs > 1`` classes are evaluated in worker processes;
    the result does not depend on scheduling."""
    ctx = CmContext.for_prime(table.ell)
    wp = big_theta_working_prec(ctx.g, table.N, prec)
    Z = cm_point(ctx, wp)
    rvecs = {c.label: r_vector(ctx, table, c) for c in table.classes}
    if jobs > 1:
        work = [(c.name, table.ell, table.N, rvecs[c.label], prec) for c in table.classes]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            vals = list(pool.map(_invariant_job, work))
    else:
        vals = [_invariant_for(c.name, table.ell, table.N, rvecs[c.label], prec, Z)
                for c in table.classes]
    invs = {c.label: v for c, v in zip(table.classes, vals)}
    return replace(table, invariants=invs, r_vectors=rvecs, cm_point=Z.with_prec(prec), prec=prec)


def check_magnitudes(table: RayClassTable) -> None:
    """Reject tables whose invariants fall below 2^(-2 prec): the working
    precision then lacks the dynamic-range headroom the power products need."""
    prec = table.prec
    with mpmath.workprec(64):
        floor = mp.mpf(2) ** (-2 * prec)
        for c in table.classes:
            v = table.invariants[c.label]
            if v.value != 0 and abs(v.value) < floor:
                raise InsufficientPrecision(
                    f"insufficient precision for target magnitudes ({c.name}: "
                    f"|Theta| ~ 2^{float(mpmath.log(abs(v.value), 2)):.0f} at {prec} bits)")


# -- well-definedness ----------------------------------------------------------------

def lattice_invariant(ctx: CmContext, N: int, lam: CycloElem, prec: int,
                      reverse_ties: bool = False, basis_change=None) -> BigComplex:
    """Invariant of the class of ``lam`` recomputed from scratch.

    Takes the Z-basis N phi(lam)^-1 zeta^k of f phi(c)^-1, reduces its Gram
    matrix under E_(xi m_c) to a fresh symplectic basis, and evaluates Theta
    at the resulting CM point with the resulting characteristic.  An optional
    symplectic ``basis_change`` P replaces the reduced basis b by P b.
    """
    ell = ctx.ell
    inv = type_norm(ctx, lam).inverse()
    raw = [CycloElem.zeta(ell, k) * inv * N for k in range(1, ell)]
    spec = polarization_spec(ctx, N, lam)
    G, _ = gram_matrix(spec, raw)
    T, E = symplectic_reduce(G, reverse_ties=reverse_ties)
    if any(e != 1 for e in E):
        raise ArithmeticError(f"polarization is not principal: {E}")
    basis = [_combine(row, raw, ell) for row in T]
    if basis_change is not None:
        basis = [_combine(row, basis, ell) for row in basis_change]
    if not gram_matrix(spec, basis)[1]:
        raise AssertionError("reduced basis is not symplectic")
    sol = solve_in_basis(CycloElem.rational(ell, N), basis)
    if not sol.integral:
        raise AssertionError("N is not in the lattice")
    wp = big_theta_working_prec(ctx.g, N, prec)
    Z = cm_point_from_basis(ctx, basis, wp)
    v = ThetaChar.from_integers([int(c) for c in sol.coeffs], N)
    return big_theta(v, Z, prec, N=N)


def _combine(coeffs, elems, ell: int) -> CycloElem:
    acc = CycloElem.zero(ell)
    for c, y in zip(coeffs, elems):
        if c:
            acc = acc + y * c
    return acc


def same_class(table: RayClassTable, a: CycloElem, b: CycloElem) -> bool:
    ra, rb = residue_of(a, table.N), residue_of(b, table.N)
    return ra in table.coset_of and table.coset_of.get(ra) == table.coset_of.get(rb)


def independence_check(ctx: CmContext, table: RayClassTable, cls: RayClass,
                       alt_representative: CycloElem, prec: int,
                       reverse_ties: bool = False, digits: int | None = None) -> bool:
    if not same_class(table, cls.representative, alt_representative):
        raise ValueError("not same ray class")
    base = table.invariants.get(cls.label) if table.prec and table.prec >= prec else None
    if base is None:
        base = siegel_invariant(ctx, table, cls, prec)
    other = lattice_invariant(ctx, table.N, alt_representative, prec, reverse_ties)
    return agree_to_digits(base, other, digits or prec // 8, zero_clause=False)


# -- characters and Stickelberger sums -----------------------------------------------

@dataclass(frozen=True)
class CharacterValue:
    """chi(C) = e(sum_i k_i e_i / d_i) for C with exponent vector e."""

    exponents: tuple[Fraction, ...]

    def __call__(self, cls: RayClass) -> Fraction:
        return sum((k * e for k, e in zip(self.exponents, cls.exponents)), Fraction(0)) % 1

    def is_trivial(self) -> bool:
        return all(k % 1 == 0 for k in self.exponents)

    def conjugate(self) -> "CharacterValue":
        return CharacterValue(tuple((-k) % 1 for k in self.exponents))


def characters(table: RayClassTable) -> list[CharacterValue]:
    return [CharacterValue(tuple(Fraction(k, d) for k, d in zip(ks, table.group_structure)))
            for ks in itertools.product(*(range(d) for d in table.group_structure))]


def stickelberger_sum(table: RayClassTable, chi: CharacterValue) -> BigComplex:
    """sum_C chi(C) ln |Theta_f(C)|."""
    if not table.invariants:
        raise ValueError("table has no invariants")
    prec = table.prec
    with mpmath.workprec(prec):
        acc = mp.mpc(0)
        for c in table.classes:
            v = table.invariants[c.label].value
            if v == 0:
                raise ValueError("log of zero")
            t = chi(c)
            acc += mp.expjpi(2 * mp.mpf(t.numerator) / t.denominator) * mp.ln(abs(v))
    return BigComplex.of(acc, prec)
