"""Reference computations written independently of the package.

Nothing here imports packmat: the point is to disagree loudly if the
package is wrong.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache


@lru_cache(maxsize=None)
def exceptional_classes_bruteforce(k: int) -> tuple[tuple[int, tuple[int, ...]], ...]:
    """All (a, b) with a^2 - sum b^2 = -1 and 3a - sum b = 1.

    Search order differs from the package: degrees come from the real roots
    of (9 - k) a^2 - 6a + (1 - k) <= 0, multiplicity multisets are generated
    with combinations_with_replacement over |b_i| <= |a| + 1 (forced by
    sum b^2 = a^2 + 1), and then expanded by permutations.
    """
    if k == 0:
        return ()
    A, B, C = 9 - k, -6, 1 - k
    if A > 0:
        disc = B * B - 4 * A * C
        lo = math.floor((-B - math.sqrt(disc)) / (2 * A)) - 1
        hi = math.ceil((-B + math.sqrt(disc)) / (2 * A)) + 1
    else:
        raise ValueError("degree is unbounded for k >= 9")
    found = set()
    for a in range(lo, hi + 1):
        m = abs(a) + 1
        for combo in itertools.combinations_with_replacement(range(-m, m + 1), k):
            if sum(combo) != 3 * a - 1:
                continue
            if sum(x * x for x in combo) != a * a + 1:
                continue
            for perm in set(itertools.permutations(combo)):
                found.add((a, perm))
    return tuple(sorted(found))


def named_walls(k: int) -> list[tuple[int, tuple[int, ...]]]:
    """The six families written out by hand, truncated to k points."""
    table = [
        (2, 1, (1, 1)),
        (5, 2, (1,) * 5),
        (7, 3, (2,) + (1,) * 6),
        (8, 4, (2, 2, 2) + (1,) * 5),
        (8, 5, (2,) * 6 + (1, 1)),
        (8, 6, (3,) + (2,) * 7),
    ]
    return [(a, m + (0,) * (k - len(m))) for kmin, a, m in table if k >= kmin]


def cone_by_brute_force(u: tuple[Fraction, ...]) -> bool:
    """Positive square, positive on -K and positive on every exceptional class (all slot orders)."""
    k = len(u)
    if 1 - sum(x * x for x in u) <= 0:
        return False
    if 3 - sum(u) <= 0:
        return False
    for a, b in exceptional_classes_bruteforce(k):
        if a - sum(bi * ui for bi, ui in zip(b, u)) <= 0:
            return False
    return True


def equal_ball_nu(k: int) -> Fraction:
    """Packing number of k equal balls in CP^2 from the hand-written families."""
    best = Fraction(1)
    for a, m in named_walls(k):
        s = sum(m)
        best = min(best, Fraction(a * a * k, s * s))
    return best


def pfaffian_recursive(A) -> object:
    """Expansion along the first row."""
    n = len(A)
    if n == 0:
        return 1
    if n % 2:
        return 0
    total = 0
    for j in range(1, n):
        keep = [i for i in range(n) if i not in (0, j)]
        minor = [[A[r][c] for c in keep] for r in keep]
        sign = 1 if j % 2 == 1 else -1
        total = total + sign * A[0][j] * pfaffian_recursive(minor)
    return total


def wedge_power_coefficients(A, l: int) -> dict:
    """Coefficient of e_I in omega^l is l! Pf(A_I) for increasing I of size 2l."""
    n = len(A)
    out = {}
    for I in itertools.combinations(range(n), 2 * l):
        sub = [[A[r][c] for c in I] for r in I]
        val = math.factorial(l) * pfaffian_recursive(sub)
        if val != 0:
            out[I] = val
    return out
