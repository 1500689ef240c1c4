"""Property suites behind ``siegelcm verify``.

Each check collects one residual per case (as log2 of the error) and
compares the worst case with its threshold.  Suites are deterministic for a
given seed.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import mpmath
from mpmath import mp

from . import exact
from .bigcomplex import BigComplex, BigReal, agree_to_digits
from .cmdata import (
    CmContext,
    RiemannFormSpec,
    gram_matrix,
    polarization_spec,
    scaled_basis,
    type_norm,
)
from .cyclofield import (
    SUPPORTED_PRIMES,
    CycloElem,
    conjugate,
    embed,
    format_elem,
    galois_apply,
    norm_to_Q,
    parse_elem,
    trace_to_Q,
)
from .rayclass import (
    RayClassTable,
    compute_invariants,
    enumerate_ray_classes,
    lattice_invariant,
    centered_lift,
    same_class,
    unit_count_formula,
    unit_generators,
)
from .symplectic import (
    SiegelPoint,
    UnstableAction,
    act_on_H,
    char_permute,
    is_symplectic,
    normal_form,
    random_symplectic,
    symplectic_generators,
    symplectic_reduce,
    transform_char,
)
from .theta import (
    ThetaChar,
    big_theta,
    big_theta_working_prec,
    build_char_sets,
    lambda_min_bound,
    siegel_function,
    theta_eval,
)

SUITES = ("theta", "symplectic", "rayclass", "cyclofield", "cmdata")


@dataclass
class CheckResult:
    name: str
    threshold: float  # log2 of the allowed residual
    residuals: list[float] = field(default_factory=list)  # log2 residuals
    failures: list[str] = field(default_factory=list)

    def add(self, log2_residual: float, label: str = "") -> None:
        self.residuals.append(log2_residual)
        if not log2_residual < self.threshold:
            self.failures.append(f"{label}: residual 2^{log2_residual:.1f}")

    def flag(self, ok: bool, label: str = "") -> None:
        self.add(-math.inf if ok else math.inf, label)

    @property
    def passed(self) -> bool:
        return bool(self.residuals) and not self.failures

    @property
    def worst(self) -> float:
        return max(self.residuals) if self.residuals else math.nan


@dataclass
class SuiteReport:
    suite: str
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


# residual arithmetic runs well above any working precision used here, so
# that differences are never rounded away
RESIDUAL_PREC = 4096


def _raw(x):
    return x.value if isinstance(x, (BigComplex, BigReal)) else x


def log2_abs(x) -> float:
    with mpmath.workprec(RESIDUAL_PREC):
        x = abs(_raw(x))
        return float(mpmath.log(x, 2)) if x else -math.inf


def log2_rel(a, b) -> float:
    with mpmath.workprec(RESIDUAL_PREC):
        a, b = mp.mpc(_raw(a)), mp.mpc(_raw(b))
        scale = max(abs(a), abs(b))
        if scale == 0:
            return -math.inf
        return log2_abs(abs(a - b) / scale)


def log2_rel_matrix(A, B) -> float:
    with mpmath.workprec(RESIDUAL_PREC):
        diff = max(abs(mp.mpc(_raw(a)) - mp.mpc(_raw(b))) for ra, rb in zip(A, B) for a, b in zip(ra, rb))
        scale = max(abs(mp.mpc(_raw(b))) for rb in B for b in rb)
        return log2_abs(diff / scale)


def histogram(values: Iterable[float], width: int = 32) -> str:
    bins: Counter = Counter()
    for v in values:
        if v == -math.inf:
            bins["exact"] += 1
        elif v == math.inf:
            bins["fail"] += 1
        else:
            lo = math.floor(v / width) * width
            bins[f"[2^{lo},2^{lo + width})"] += 1

    def key(k):
        if k == "exact":
            return -math.inf
        if k == "fail":
            return math.inf
        return int(k[3:k.index(",")])

    return "  ".join(f"{k}:{bins[k]}" for k in sorted(bins, key=key))


def format_report(report: SuiteReport) -> str:
    lines = []
    for c in report.checks:
        mark = "PASS" if c.passed else "FAIL"
        worst = "exact" if c.worst == -math.inf else f"2^{c.worst:.1f}"
        lines.append(f"[{mark}] {report.suite}/{c.name}: n={len(c.residuals)} "
                     f"max residual {worst} (threshold 2^{c.threshold:g})")
        lines.append(f"       histogram {histogram(c.residuals)}")
        for f in c.failures[:5]:
            lines.append(f"       failed {f}")
    return "\n".join(lines)


# -- random inputs ---------------------------------------------------------------

def random_siegel_point(g: int, rng: random.Random, prec: int, min_eig: float = 0.5) -> SiegelPoint:
    """Re Z uniform in [-1/2, 1/2]; Im Z = min_eig I + A A^T with small random A."""
    X = [[0.0] * g for _ in range(g)]
    for i in range(g):
        for j in range(i, g):
            X[i][j] = X[j][i] = rng.uniform(-0.5, 0.5)
    A = [[rng.uniform(-0.6, 0.6) for _ in range(g)] for _ in range(g)]
    with mpmath.workprec(prec):
        Z = [[mp.mpc(X[i][j], sum(A[i][k] * A[j][k] for k in range(g)) + (min_eig if i == j else 0))
              for j in range(g)] for i in range(g)]
    return SiegelPoint.from_matrix(Z, prec)


def random_char(g: int, rng: random.Random, levels=(3, 4, 5, 6)) -> tuple[ThetaChar, int]:
    """Random characteristic of level N that is not half-integral."""
    while True:
        N = rng.choice(levels)
        v = ThetaChar.from_integers([rng.randrange(N) for _ in range(2 * g)], N)
        if not v.is_half_integral():
            return v, N


def random_sp_point(Z: SiegelPoint, rng: random.Random, max_len: int = 6,
                    min_eig: float = 0.2, tries: int = 200):
    """(gamma, gamma(Z)) for a random word of length <= max_len that moves Z
    and keeps Im Z away from degenerate; badly conditioned images are redrawn
    because the lattice sum cost grows like lambda_min^(-g/2)."""
    for _ in range(tries):
        gamma = random_symplectic(Z.g, rng.randint(1, max_len), rng)
        try:
            W = act_on_H(gamma, Z)
        except UnstableAction:
            continue
        # -I and other words fixing Z would make the comparison vacuous
        moved = log2_rel_matrix(W.entries, Z.entries) > -20
        if moved and lambda_min_bound(W) >= min_eig:
            return gamma, W
    raise RuntimeError("no well-conditioned symplectic image found")


def random_elem(ell: int, rng: random.Random, bound: int = 5) -> CycloElem:
    while True:
        a = CycloElem.from_coords(ell, [rng.randint(-bound, bound) for _ in range(ell - 1)])
        if a:
            return a


# -- theta ----------------------------------------------------------------------

def theta_identity_checks(seed: int, count: int = 100, prec: int = 256) -> list[CheckResult]:
    """Parity, odd vanishing (absolute, < 2^-100), level-N shift and Sp
    invariance of Theta (relative, < 2^-64) on ``count`` random (v, Z)."""
    rng = random.Random(seed)
    parity = CheckResult("parity", -100)
    vanish = CheckResult("odd-vanishing", -100)
    shift = CheckResult("level-shift", -64)
    modular = CheckResult("sp-invariance", -64)
    for k in range(count):
        g = 1 + k % 2
        v, N = random_char(g, rng)
        wp = big_theta_working_prec(g, N, prec)
        Z = random_siegel_point(g, rng, wp)
        label = f"case {k} g={g} v={v}"
        parity.add(log2_abs(theta_eval(-v, Z, prec).value - theta_eval(v, Z, prec).value), label)
        odd = rng.choice(build_char_sets(g).S_minus)
        vanish.add(log2_abs(theta_eval(odd, Z, prec).value), label)
        base = big_theta(v, Z, prec, N=N)
        n = [rng.randint(-3, 3) for _ in range(2 * g)]
        moved = ThetaChar.from_vector([x + y for x, y in zip(v.vector, n)])
        shift.add(log2_rel(big_theta(moved, Z, prec, N=N).value, base.value), label)
        gamma, W = random_sp_point(Z, rng)
        lhs = big_theta(v, W, prec, N=N)
        rhs = big_theta(ThetaChar.from_vector(transform_char(gamma, v.vector)), Z, prec, N=N)
        modular.add(log2_rel(lhs.value, rhs.value), label)
    return [parity, vanish, shift, modular]


def genus_one_checks(seed: int, count: int = 25, prec: int = 256) -> CheckResult:
    """Theta([r; s], tau) against g_[r;s](tau)^(12N)."""
    rng = random.Random(seed)
    check = CheckResult("genus-1 siegel", -64)
    for k in range(count):
        v, N = random_char(1, rng, levels=(2, 3, 4, 5, 6, 7, 8))
        wp = big_theta_working_prec(1, N, prec)
        with mpmath.workprec(wp):
            tau = mp.mpc(rng.uniform(-0.5, 0.5), rng.uniform(0.7, 1.6))
        Z = SiegelPoint.from_matrix([[tau]], wp)
        lhs = big_theta(v, Z, prec, N=N)
        g_v = siegel_function(v.r[0], v.s[0], BigComplex(tau, wp), wp)
        with mpmath.workprec(wp):
            rhs = g_v.value ** (12 * N)
        check.add(log2_rel(lhs.value, rhs), f"case {k} v={v} tau={mpmath.nstr(tau, 6)}")
    return check


def suite_theta(seed: int = 0) -> SuiteReport:
    checks = theta_identity_checks(seed)
    checks.append(genus_one_checks(seed))
    sizes = CheckResult("char-set sizes", 0)
    for g in (1, 2, 3):
        s = build_char_sets(g)
        sizes.flag(len(s.S_minus) == 2 ** (g - 1) * (2**g - 1)
                   and len(s.S_plus) == 2 ** (g - 1) * (2**g + 1), f"g={g}")
    checks.append(sizes)
    return SuiteReport("theta", checks)


# -- symplectic -----------------------------------------------------------------

def random_unimodular(n: int, rng: random.Random, steps: int = 12) -> list[list[int]]:
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        q = rng.choice([-2, -1, 1, 2])
        U[i] = [a + q * b for a, b in zip(U[i], U[j])]
        if rng.random() < 0.2:
            U[i], U[j] = U[j], U[i]
    return U


def suite_symplectic(seed: int = 0) -> SuiteReport:
    rng = random.Random(seed)
    reduce_check = CheckResult("reduce round-trip", 0)
    for k in range(40):
        g = rng.choice([1, 2, 3])
        E = [1]
        for _ in range(g - 1):
            E.append(E[-1] * rng.choice([1, 1, 2, 3]))
        U = random_unimodular(2 * g, rng)
        G = exact.matmul(exact.matmul(U, normal_form(E)), exact.transpose(U))
        T, E2 = symplectic_reduce(G, reverse_ties=bool(k % 2))
        ok = (exact.matmul(exact.matmul(T, G), exact.transpose(T)) == normal_form(E2)
              and E2 == [Fraction(e) for e in E] and abs(exact.det(T)) == 1)
        reduce_check.flag(ok, f"case {k} E={E}")

    action = CheckResult("action composition", -200)
    perm = CheckResult("char permutation", 0)
    sets = build_char_sets(2)
    odd, even = set(sets.S_minus), set(sets.S_plus)
    for k in range(25):
        Z = random_siegel_point(2, rng, 320, min_eig=0.8)
        M1 = random_symplectic(2, 3, rng)
        M2 = random_symplectic(2, 3, rng)
        try:
            lhs = act_on_H(exact.matmul(M1, M2), Z)
            rhs = act_on_H(M1, act_on_H(M2, Z))
        except UnstableAction:
            continue
        action.add(log2_rel_matrix(lhs.entries, rhs.entries), f"case {k}")
        img_odd = {ThetaChar.from_vector(char_permute(M1, a.vector)) for a in odd}
        img_even = {ThetaChar.from_vector(char_permute(M1, c.vector)) for c in even}
        perm.flag(img_odd == odd and img_even == even and is_symplectic(M1), f"case {k}")
    return SuiteReport("symplectic", [reduce_check, action, perm])


# -- cyclofield / cmdata ------------------------------------------------------------

def suite_cyclofield(seed: int = 0) -> SuiteReport:
    rng = random.Random(seed)
    alg = CheckResult("field identities", 0)
    emb = CheckResult("embedding homomorphism", -200)
    for k in range(60):
        ell = rng.choice([3, 5, 7, 11])
        a, b = random_elem(ell, rng), random_elem(ell, rng)
        i = rng.randrange(1, ell)
        ok = (norm_to_Q(a * b) == norm_to_Q(a) * norm_to_Q(b)
              and trace_to_Q(a + b) == trace_to_Q(a) + trace_to_Q(b)
              and galois_apply(a * b, i) == galois_apply(a, i) * galois_apply(b, i)
              and conjugate(conjugate(a)) == a
              and a * a.inverse() == CycloElem.one(ell)
              and parse_elem(format_elem(a), ell) == a)
        alg.flag(ok, f"case {k} l={ell}")
        with mpmath.workprec(256):
            lhs = embed(a * b, i, 256).value
            rhs = embed(a, i, 256).value * embed(b, i, 256).value
        emb.add(log2_rel(lhs, rhs), f"case {k}")
    return SuiteReport("cyclofield", [alg, emb])


def suite_cmdata(seed: int = 0) -> SuiteReport:
    rng = random.Random(seed)
    gram = CheckResult("x-basis Gram = J", 0)
    pos = CheckResult("xi positive", 0)
    for ell in SUPPORTED_PRIMES:
        ctx = CmContext.for_prime(ell)
        gram.flag(gram_matrix(RiemannFormSpec(ctx.xi), ctx.x_basis())[1], f"l={ell}")
        pos.flag(ctx.xi_positive(), f"l={ell}")
    mult = CheckResult("type norm multiplicative", 0)
    for k in range(30):
        ell = rng.choice([5, 7])
        ctx = CmContext.for_prime(ell)
        a, b = random_elem(ell, rng, 3), random_elem(ell, rng, 3)
        mult.flag(type_norm(ctx, a * b) == type_norm(ctx, a) * type_norm(ctx, b), f"case {k}")
    return SuiteReport("cmdata", [gram, pos, mult])


# -- ray classes ---------------------------------------------------------------

def default_prec(N: int) -> int:
    return 512 if N <= 5 else 768


def alternate_representatives(table: RayClassTable, cls, count: int, rng: random.Random):
    """Elements lam * u * (1 + N w) with u a unit and w random: same ray class,
    different ideal generator."""
    ell, N = table.ell, table.N
    units = unit_generators(ell)
    out = []
    while len(out) < count:
        u = CycloElem.one(ell)
        for _ in range(rng.randint(0, 4)):
            u = u * rng.choice(units)
        w = random_elem(ell, rng, 2)
        alt = cls.representative * u * (CycloElem.one(ell) + w * N)
        if alt != cls.representative and same_class(table, cls.representative, alt):
            out.append(alt)
    return out


def basis_changes(g: int) -> list[list[list[int]]]:
    """Two fixed symplectic changes of basis: an elementary translation and,
    for g >= 2, an elementary unimodular block (J for g = 1)."""
    gens = symplectic_generators(g)
    return [gens[1], gens[-1] if g >= 2 else gens[0]]


def digits_threshold(digits: int) -> float:
    """log2 of the relative error allowed by agreement to ``digits`` digits."""
    return (1 - digits) * math.log2(10)


def independence_cases(table: RayClassTable, prec: int, reps: int, seed: int,
                       bases: bool = True):
    """Yield (class, description, log2 relative residual) comparing each stored
    invariant with the full lattice recomputation for ``reps`` alternate
    representatives and, with ``bases``, for alternate symplectic bases
    (reversed pivot ties and two explicit Sp changes)."""
    ctx = CmContext.for_prime(table.ell)
    rng = random.Random(seed)
    for cls in table.classes:
        base = table.invariants[cls.label].value
        for j, alt in enumerate(alternate_representatives(table, cls, reps, rng)):
            val = lattice_invariant(ctx, table.N, alt, prec)
            yield cls, f"rep {j} {format_elem(alt)}", log2_rel(base, val.value)
        if not bases:
            continue
        val = lattice_invariant(ctx, table.N, cls.representative, prec, reverse_ties=True)
        yield cls, "reversed ties", log2_rel(base, val.value)
        for j, P in enumerate(basis_changes(ctx.g)):
            val = lattice_invariant(ctx, table.N, cls.representative, prec, basis_change=P)
            yield cls, f"basis change {j}", log2_rel(base, val.value)


def conjugate_pairs(table: RayClassTable) -> list[tuple[int, int, float]]:
    """(k, n-k, log2 |Theta(C_k) - conj Theta(C_(n-k))| / |Theta(C_k)|)."""
    n = table.order
    return [(k, n - k, log2_rel(table.invariants[k].value,
                                table.invariants[n - k].conjugate().value))
            for k in range(1, n)]


def self_conjugate_labels(table: RayClassTable) -> list[int]:
    n = table.order
    return [k for k in range(1, n + 1) if (n - k) % n == k % n]


def imaginary_residual(value: BigComplex) -> float:
    """log2 |Im v| / |v|."""
    with mpmath.workprec(RESIDUAL_PREC):
        return log2_abs(value.value.imag / abs(value.value))


def pairwise_distinct(table: RayClassTable, digits: int = 5) -> bool:
    vals = list(table.invariants.values())
    return all(not agree_to_digits(vals[i], vals[j], digits, zero_clause=False)
               for i in range(len(vals)) for j in range(i))


def group_law_cases(table: RayClassTable):
    """Yield (description, ok): class of a product against the product of
    classes, over all pairs of representatives and over every residue unit
    times the first basis class."""
    for a in table.classes:
        for b in table.classes:
            yield f"{a.name}*{b.name}", (table.class_of(a.representative * b.representative)
                                         == table.multiply(a, b))
    first = table.classes[0]
    for res in table.coset_of:
        u = centered_lift(res, table.N)
        yield f"{format_elem(u)}*{first.name}", (table.class_of(u * first.representative)
                                                  == table.multiply(table.class_of(u), first))


def suite_rayclass(ell: int = 5, N: int = 5, prec: int | None = None, seed: int = 0) -> SuiteReport:
    prec = prec or default_prec(N)
    ctx = CmContext.for_prime(ell)
    table = enumerate_ray_classes(ell, N)

    order = CheckResult("group order", 0)
    order.flag(table.order * table.unit_image_order == table.residue_unit_count, "exhaustion")
    order.flag(unit_count_formula(ell, N) == table.residue_unit_count, "order formula")

    gram = CheckResult("scaled-basis Gram = J", 0)
    for c in table.classes:
        spec = polarization_spec(ctx, N, c.representative)
        gram.flag(gram_matrix(spec, scaled_basis(ctx, N, c.representative))[1], c.name)

    law = CheckResult("group law", 0)
    for what, ok in group_law_cases(table):
        law.flag(ok, what)

    checks = [order, gram, law]
    if table.is_cyclic() and table.order > 1:
        table = compute_invariants(table, prec)
        tol = digits_threshold(prec // 8)
        conj = CheckResult("conjugate symmetry", tol)
        for k, m, res in conjugate_pairs(table):
            conj.add(res, f"C_{k} vs C_{m}")
        real = CheckResult("self-conjugate imaginary part", tol + 1)
        for k in self_conjugate_labels(table):
            real.add(imaginary_residual(table.invariants[k]), f"C_{k}")
        distinct = CheckResult("distinctness", 0)
        distinct.flag(pairwise_distinct(table), "all pairs at 5 digits")
        indep = CheckResult("independence", tol)
        for cls, what, res in independence_cases(table, prec, reps=1, seed=seed):
            indep.add(res, f"{cls.name} {what}")
        checks += [conj, real, distinct, indep]
    return SuiteReport("rayclass", checks)


def run_suite(name: str, seed: int = 0, ell: int = 5, N: int = 5, prec: int | None = None) -> SuiteReport:
    if name == "theta":
        return suite_theta(seed)
    if name == "symplectic":
        return suite_symplectic(seed)
    if name == "cyclofield":
        return suite_cyclofield(seed)
    if name == "cmdata":
        return suite_cmdata(seed)
    if name == "rayclass":
        return suite_rayclass(ell, N, prec, seed)
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
