"""Shared state for the test session: cached invariant tables and the
acceptance-criteria registry."""

from functools import lru_cache

from siegelcm.rayclass import compute_invariants, enumerate_ray_classes
from siegelcm.verify import default_prec

# criterion number -> (title, passed, detail)
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def record(number: int, title: str, passed: bool, detail: str) -> str:
    ACCEPTANCE[number] = (title, passed, detail)
    line = acceptance_line(number)
    print(line)
    return line


def acceptance_line(number: int) -> str:
    title, ok, detail = ACCEPTANCE[number]
    return f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}: {detail}"


@lru_cache(maxsize=None)
def invariant_table(ell: int, N: int, prec: int | None = None):
    return compute_invariants(enumerate_ray_classes(ell, N), prec or default_prec(N))
