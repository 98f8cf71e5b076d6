"""Pure-Python versions of the compiled kernels (same signatures, same results)."""
from __future__ import annotations


def degree_solutions(k: int, a: int) -> list[tuple[int, ...]]:
    if k <= 0 or k > 8 or a < -1:
        return []
    bound = a + 1
    target_sq = a * a + 1
    target_lin = 3 * a - 1
    out: list[tuple[int, ...]] = []
    b = [0] * k
    values = range(-bound, bound + 1)

    def rec(i: int, sq: int, lin: int) -> None:
        rem = k - i - 1
        for v in values:
            s = sq + v * v
            R = target_sq - s
            if R < 0:
                continue
            L = target_lin - lin - v
            if L * L > rem * R:
                continue
            b[i] = v
            if rem == 0:
                if R == 0 and L == 0:
                    out.append(tuple(b))
            else:
                rec(i + 1, s, lin + v)

    rec(0, 0, 0)
    return out


def first_violations(weights, den, classes, result) -> None:
    for r, row in enumerate(weights):
        q = int(den[r])
        row = [int(x) for x in row]
        if q * q - sum(x * x for x in row) <= 0:
            result[r] = -2
            continue
        if 3 * q - sum(row) <= 0:
            result[r] = -3
            continue
        result[r] = -1
        for c, cls in enumerate(classes):
            if int(cls[0]) * q - sum(int(m) * x for m, x in zip(cls[1:], row)) <= 0:
                result[r] = c
                break
