"""Exceptional classes and the Kähler cone of CP^2 blown up at 1 <= k <= 8 points.

The cone of a generic blow-up is cut out by positivity of the square and by
positive pairing with every exceptional (-1)-class and with -K.
:func:`kahler_cone_contains` tests that description directly against the
enumerated classes; :func:`mp_inequalities` evaluates the closed-form
families (v), (c1)-(c6).  The two must agree.
"""
from __future__ import annotations

import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Sequence

import numpy as np

from . import _backend
from .divisor import DivisorClass, canonical_class, intersect
from .exact import as_fraction, det, fraction_to_str

__all__ = [
    "MAX_POINTS",
    "UnsupportedError",
    "ExceptionalSet",
    "ConeVerdict",
    "degree_range",
    "enumerate_exceptional",
    "wall_patterns",
    "kahler_cone_contains",
    "kahler_cone_contains_many",
    "mp_inequalities",
    "MP_FAMILIES",
    "general_position",
    "general_position_failure",
]

MAX_POINTS = 8


class UnsupportedError(ValueError):
    """The request is outside the range where the cone description is known."""


def degree_range(k: int) -> range:
    """Degrees ``a`` allowed by Cauchy-Schwarz, ``(3a - 1)^2 <= k (a^2 + 1)``."""
    if k <= 0:
        return range(0)
    # the admissible set is an interval around a = 1/3; scan a safe window
    ok = [a for a in range(-10, 11) if (3 * a - 1) ** 2 <= k * (a * a + 1)]
    return range(ok[0], ok[-1] + 1)


@dataclass(frozen=True)
class ExceptionalSet:
    k: int
    classes: tuple[DivisorClass, ...]

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def __contains__(self, c) -> bool:
        return c in self.classes

    @property
    def max_degree(self) -> int:
        return max((c.a for c in self.classes), default=0)

    def to_json(self) -> list[dict]:
        return [c.to_json() for c in self.classes]

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


def _check_k(k: int) -> None:
    if not isinstance(k, int) or k < 0:
        raise ValueError(f"k must be a nonnegative integer, got {k!r}")
    if k > MAX_POINTS:
        raise UnsupportedError(f"cone description only known for k <= {MAX_POINTS}, got {k}")


@lru_cache(maxsize=None)
def enumerate_exceptional(k: int) -> ExceptionalSet:
    """All integer ``(a; b)`` with ``C.C = -1`` and ``C.K = -1`` on the k-point blow-up.

    Exhaustive over ``degree_range(k)`` and ``|b_i| <= a + 1``, in canonical
    lexicographic order.
    """
    _check_k(k)
    degrees = list(degree_range(k))
    search = _backend.kernels.degree_solutions
    workers = min(_backend.threads(), max(1, len(degrees)))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda a: search(k, a), degrees))
    else:
        chunks = [search(k, a) for a in degrees]
    classes = sorted(DivisorClass(a, b) for a, chunk in zip(degrees, chunks) for b in chunk)
    K = canonical_class(k)
    for c in classes:
        assert intersect(c, c) == -1 and intersect(c, K) == -1, c
    return ExceptionalSet(k, tuple(classes))


@lru_cache(maxsize=None)
def wall_patterns(k: int) -> tuple[DivisorClass, ...]:
    """Distinct exceptional classes up to slot permutation, multiplicities sorted non-increasing.

    Only patterns that can pair positively with a weight vector are kept
    (``E_i`` pairs to ``-u_i`` and never constrains anything).
    """
    seen = sorted(
        {DivisorClass(c.a, tuple(sorted(c.b, reverse=True))) for c in enumerate_exceptional(k)}
    )
    return tuple(c for c in seen if c.a > 0)


@dataclass(frozen=True)
class ConeVerdict:
    feasible: bool
    witness: object = None  # label string or DivisorClass
    margin: Fraction | None = None
    failures: tuple = ()
    margins: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        w = self.witness
        return {
            "feasible": self.feasible,
            "witness": w.to_json() if isinstance(w, DivisorClass) else w,
            "margin": None if self.margin is None else fraction_to_str(self.margin),
            "failures": [f.to_json() if isinstance(f, DivisorClass) else f for f in self.failures],
        }


def _weights(u: Sequence, *, require_sorted=True, kmin=0) -> tuple[Fraction, ...]:
    w = tuple(as_fraction(x) for x in u)
    if any(x <= 0 for x in w):
        raise ValueError("weights must be positive")
    if require_sorted and any(w[i] < w[i + 1] for i in range(len(w) - 1)):
        raise ValueError("weights must be sorted non-increasing")
    if not kmin <= len(w) <= MAX_POINTS:
        raise UnsupportedError(f"need {kmin} <= k <= {MAX_POINTS} weights, got {len(w)}")
    return w


def _common_denominator(w: Sequence[Fraction]) -> tuple[list[int], int]:
    q = lcm(*(x.denominator for x in w)) if w else 1
    return [x.numerator * (q // x.denominator) for x in w], q


def kahler_cone_contains(u: Sequence) -> ConeVerdict:
    """Membership of ``H - sum u_i E_i`` in the Kähler cone of the generic k-point blow-up.

    ``u`` must be sorted non-increasing.  Checks, in order: positive square,
    positive pairing with ``-K``, positive pairing with every exceptional class
    (sorted against ``u``, which is the worst slot permutation).
    """
    w = _weights(u)
    k = len(w)
    nums, q = _common_denominator(w)
    # everything below is scaled by q (linear) or q^2 (square)
    sq = q * q - sum(x * x for x in nums)
    if sq <= 0:
        return ConeVerdict(False, "volume", Fraction(sq, q * q), ("volume",))
    anti = 3 * q - sum(nums)
    if anti <= 0:
        return ConeVerdict(False, "anticanonical", Fraction(anti, q), ("anticanonical",))
    for c in wall_patterns(k):
        m = c.a * q - sum(b * x for b, x in zip(c.b, nums))
        if m <= 0:
            return ConeVerdict(False, c, Fraction(m, q), (c,))
    return ConeVerdict(True)


_I64_SAFE = 1 << 29


def kahler_cone_contains_many(vectors: Sequence[Sequence]) -> list[bool]:
    """Vectorised :func:`kahler_cone_contains` (verdicts only) for equal-length sorted vectors."""
    vecs = [_weights(v) for v in vectors]
    if not vecs:
        return []
    k = len(vecs[0])
    if any(len(v) != k for v in vecs):
        raise ValueError("all vectors must have the same length")
    scaled = [_common_denominator(v) for v in vecs]
    pats = wall_patterns(k)
    if all(q < _I64_SAFE for _, q in scaled):
        W = np.array([n for n, _ in scaled], dtype=np.int64).reshape(len(vecs), k)
        D = np.array([q for _, q in scaled], dtype=np.int64)
        C = np.array([(c.a, *c.b) for c in pats], dtype=np.int64).reshape(len(pats), k + 1)
        out = np.empty(len(vecs), dtype=np.int64)
        _backend.kernels.first_violations(W, D, C, out)
        return [bool(x == -1) for x in out]
    return [kahler_cone_contains(v).feasible for v in vecs]


# (label, applies when k >= kmin, coefficients on sorted weights, right-hand side)
MP_FAMILIES: tuple[tuple[str, int, tuple[int, ...], int], ...] = (
    ("(c1)", 2, (1, 1), 1),
    ("(c2)", 5, (1, 1, 1, 1, 1), 2),
    ("(c3)", 7, (2, 1, 1, 1, 1, 1, 1), 3),
    ("(c4)", 8, (2, 2, 2, 1, 1, 1, 1, 1), 4),
    ("(c5)", 8, (2, 2, 2, 2, 2, 2, 1, 1), 5),
    ("(c6)", 8, (3, 2, 2, 2, 2, 2, 2, 2), 6),
)


def mp_inequalities(u: Sequence) -> ConeVerdict:
    """Evaluate (v) and the applicable (c1)-(c6) on sorted squared radii ``u``.

    Every family is strict.  ``failures`` lists all violated labels; the
    witness is the most violated one (smallest margin, first on ties).
    """
    w = _weights(u, kmin=1)
    k = len(w)
    margins = {"(v)": 1 - sum(x * x for x in w)}
    for label, kmin, coef, rhs in MP_FAMILIES:
        if k >= kmin:
            margins[label] = rhs - sum(c * x for c, x in zip(coef, w))
    failures = tuple(label for label, m in margins.items() if m <= 0)
    if failures:
        worst = min(failures, key=lambda label: margins[label])
        return ConeVerdict(False, worst, margins[worst], failures, margins)
    return ConeVerdict(True, margins=margins)


# -- general position -------------------------------------------------------

def _normalize_points(points) -> list[tuple[Fraction, Fraction, Fraction]]:
    pts = []
    for p in points:
        if len(p) != 3:
            raise ValueError(f"points need three homogeneous coordinates, got {p!r}")
        t = tuple(as_fraction(x) for x in p)
        if all(x == 0 for x in t):
            raise ValueError("(0:0:0) is not a point of CP^2")
        pts.append(t)
    if not 1 <= len(pts) <= MAX_POINTS:
        raise UnsupportedError(f"general position is defined here for 1 <= k <= {MAX_POINTS}")
    for p, q in itertools.combinations(pts, 2):
        if all(p[i] * q[j] == p[j] * q[i] for i in range(3) for j in range(3)):
            raise ValueError(f"repeated point {p} ~ {q}")
    return pts


_CONIC = [(2, 0, 0), (0, 2, 0), (0, 0, 2), (1, 1, 0), (1, 0, 1), (0, 1, 1)]
_CUBIC = [e for e in itertools.product(range(4), repeat=3) if sum(e) == 3]


def _monomial(p, e) -> Fraction:
    return p[0] ** e[0] * p[1] ** e[1] * p[2] ** e[2]


def _partial(p, e, m) -> Fraction:
    if e[m] == 0:
        return Fraction(0)
    e2 = list(e)
    e2[m] -= 1
    return e[m] * _monomial(p, e2)


def general_position_failure(points) -> str | None:
    """Describe the first general-position violation, or None."""
    pts = _normalize_points(points)
    k = len(pts)
    for idx in itertools.combinations(range(k), 3):
        if det([pts[i] for i in idx]) == 0:
            return f"points {idx} are collinear"
    for idx in itertools.combinations(range(k), 6):
        if det([[_monomial(pts[i], e) for e in _CONIC] for i in idx]) == 0:
            return f"points {idx} lie on a conic"
    if k == 8:
        base = [[_monomial(p, e) for e in _CUBIC] for p in pts]
        for i, p in enumerate(pts):
            chart = next(j for j in range(3) if p[j] != 0)
            rows = base + [[_partial(p, e, m) for e in _CUBIC] for m in range(3) if m != chart]
            if det(rows) == 0:
                return f"a cubic through all points is singular at point {i}"
    return None


def general_position(points) -> bool:
    """No 3 collinear, no 6 on a conic, and (k = 8) no cubic through all 8 singular at one."""
    return general_position_failure(points) is None
