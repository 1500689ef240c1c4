"""Reference data for K = Q(zeta_5): characteristic numerators of the classes
C_1, ..., C_n (C_k = C_1^k) and six-digit values of the invariants at the
CM point, for the conductors 5 O_K and 6 O_K.
"""

from __future__ import annotations

# (ell, N) -> rows indexed k = 1..n: (numerators r_1..r_4, (re, im))
TABLES: dict[tuple[int, int], list[tuple[tuple[int, ...], tuple[str, str]]]] = {
    (5, 5): [
        ((1, 2, 0, 3), ("-2.13359e-69", "4.17297e-70")),
        ((3, 1, 3, 2), ("4.16089e-50", "-1.58401e-50")),
        ((3, 0, 2, 2), ("4.16089e-50", "1.58401e-50")),
        ((2, 2, 4, 4), ("-2.13359e-69", "-4.17297e-70")),
        ((1, 1, 0, 1), ("4.85930e-254", "0")),
    ],
    (5, 6): [
        ((2, 3, 0, 4), ("-1.68219e-66", "-1.88870e-66")),
        ((2, 5, 0, 2), ("9.08964e-135", "7.01165e-135")),
        ((3, 4, 4, 4), ("-3.16257e-65", "1.88358e-65")),
        ((5, 3, 0, 3), ("2.29176e-93", "1.51419e-93")),
        ((5, 0, 0, 4), ("8.33316e-136", "0")),
        ((5, 2, 0, 2), ("2.29176e-93", "-1.51419e-93")),
        ((4, 2, 1, 3), ("-3.16257e-65", "-1.88358e-65")),
        ((3, 1, 0, 3), ("9.08964e-135", "-7.01165e-135")),
        ((5, 3, 0, 1), ("-1.68219e-66", "1.88870e-66")),
        ((5, 5, 0, 5), ("3.26284e-348", "0")),
    ],
}

# generator of the class C_1 for conductor 5 O_K: 2 + zeta_5
GENERATOR_TEXT = {(5, 5): "2 + z^1"}


def rows(ell: int, N: int):
    return TABLES.get((ell, N))
