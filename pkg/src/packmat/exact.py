"""Exact scalars: rationals and elements of a real quadratic field Q(sqrt p).

Rationals are :class:`fractions.Fraction`.  :class:`QuadScalar` represents
``rat + surd * sqrt(p)`` for a squarefree ``p >= 2`` and has an exact sign.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import cmp_to_key, total_ordering
from math import isqrt
from numbers import Rational as _RationalABC
from typing import Iterable, Sequence

__all__ = [
    "Fraction",
    "QuadScalar",
    "RadicandMismatch",
    "as_fraction",
    "is_squarefree",
    "qsign",
    "sort_nonincreasing",
    "fraction_to_str",
    "parse_fraction",
    "parse_quad",
    "quad_to_json",
    "quad_from_json",
    "det",
    "rank",
]


class RadicandMismatch(ValueError):
    """Raised when two surds with different radicands meet in one operation."""


def is_squarefree(p: int) -> bool:
    if p < 1:
        return False
    d = 2
    while d * d <= p:
        if p % (d * d) == 0:
            return False
        d += 1
    return True


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and rational strings to Fraction; reject floats."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_fraction(x)
    if isinstance(x, _RationalABC):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, QuadScalar) and x.surd == 0:
        return x.rat
    raise TypeError(f"cannot use {x!r} as an exact rational")


_FRACTION_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_fraction(text: str) -> Fraction:
    """Parse ``"n"``, ``"n/d"`` or a finite decimal like ``"0.25"`` exactly."""
    m = _FRACTION_RE.match(text)
    if m:
        num, den = m.groups()
        if den is not None and int(den) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(int(num), int(den) if den else 1)
    if re.match(r"^\s*[+-]?(\d+\.\d*|\.\d+)\s*$", text):
        return Fraction(text.strip())
    raise ValueError(f"not a rational number: {text!r}")


def fraction_to_str(x: Fraction) -> str:
    x = as_fraction(x)
    return f"{x.numerator}/{x.denominator}"


@total_ordering
class QuadScalar:
    """The real number ``rat + surd * sqrt(p)``.

    Arithmetic with ints and Fractions is allowed; two QuadScalars must share
    ``p``.  Instances are immutable and hashable.
    """

    __slots__ = ("_rat", "_surd", "_p")

    def __init__(self, rat=0, surd=0, p: int = 2):
        if not isinstance(p, int) or p < 2 or not is_squarefree(p):
            raise ValueError(f"radicand must be a squarefree integer >= 2, got {p!r}")
        object.__setattr__(self, "_rat", as_fraction(rat))
        object.__setattr__(self, "_surd", as_fraction(surd))
        object.__setattr__(self, "_p", p)

    def __setattr__(self, name, value):
        raise AttributeError("QuadScalar is immutable")

    @property
    def rat(self) -> Fraction:
        return self._rat

    @property
    def surd(self) -> Fraction:
        return self._surd

    @property
    def p(self) -> int:
        return self._p

    @classmethod
    def sqrt(cls, p: int) -> "QuadScalar":
        return cls(0, 1, p)

    def is_rational(self) -> bool:
        return self._surd == 0

    def conjugate(self) -> "QuadScalar":
        return QuadScalar(self._rat, -self._surd, self._p)

    def norm(self) -> Fraction:
        return self._rat * self._rat - self._surd * self._surd * self._p

    def _coerce(self, other) -> "QuadScalar | None":
        if isinstance(other, QuadScalar):
            if other._p != self._p:
                raise RadicandMismatch(f"radicands {self._p} and {other._p} differ")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return QuadScalar(other, 0, self._p)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadScalar(self._rat + o._rat, self._surd + o._surd, self._p)

    __radd__ = __add__

    def __neg__(self):
        return QuadScalar(-self._rat, -self._surd, self._p)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadScalar(self._rat - o._rat, self._surd - o._surd, self._p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b, c, d = self._rat, self._surd, o._rat, o._surd
        return QuadScalar(a * c + b * d * self._p, a * d + b * c, self._p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt p)")
        q = self * o.conjugate()
        return QuadScalar(q._rat / n, q._surd / n, self._p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            return NotImplemented
        out = QuadScalar(1, 0, self._p)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def sign(self) -> int:
        return qsign(self)

    def __eq__(self, other):
        if isinstance(other, QuadScalar):
            if self._surd == 0 and other._surd == 0:
                return self._rat == other._rat
            return self._p == other._p and self._rat == other._rat and self._surd == other._surd
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._surd == 0 and self._rat == other
        return NotImplemented

    def __lt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return qsign(self - o) < 0

    def __hash__(self):
        if self._surd == 0:
            return hash(self._rat)
        return hash((self._rat, self._surd, self._p))

    def __bool__(self):
        return self._rat != 0 or self._surd != 0

    def __float__(self):
        return float(self._rat) + float(self._surd) * self._p ** 0.5

    def __repr__(self):
        return f"QuadScalar({self._rat!s}, {self._surd!s}, p={self._p})"

    def __str__(self):
        if self._surd == 0:
            return str(self._rat)
        surd = f"{self._surd}√{self._p}" if self._surd not in (1, -1) else f"√{self._p}"
        if self._surd == -1:
            surd = "-" + surd
        if self._rat == 0:
            return surd
        sep = "" if surd.startswith("-") else "+"
        return f"{self._rat}{sep}{surd}"


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def qsign(x) -> int:
    """Exact sign of ``a + b*sqrt(p)`` (also accepts plain rationals)."""
    if not isinstance(x, QuadScalar):
        return _sign(as_fraction(x))
    a, b, p = x.rat, x.surd, x.p
    sa, sb = _sign(a), _sign(b)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: compare a^2 with b^2 p
    return sa * _sign(a * a - b * b * p)


def _difference_sign(x, y) -> int:
    if isinstance(x, QuadScalar) or isinstance(y, QuadScalar):
        if not isinstance(x, QuadScalar):
            return -qsign(y - as_fraction(x))
        return qsign(x - y)
    return _sign(as_fraction(x) - as_fraction(y))


def sort_nonincreasing(values: Iterable) -> list:
    """Stable exact descending sort of rationals and/or QuadScalars."""
    values = list(values)
    return sorted(values, key=cmp_to_key(lambda x, y: _difference_sign(y, x)))


_QUAD_TERM = re.compile(
    r"([+-]?)\s*(\d+(?:/\d+)?)?\s*(\*?\s*(?:√|sqrt)\s*\(?\s*(\d+)?\s*\)?)?"
)


def parse_quad(text: str, p: int) -> QuadScalar:
    """Parse strings such as ``"3-2√2"``, ``"1/2+3/4√2"``, ``"-√2"``, ``"2sqrt2"``.

    A radicand written after the root sign must equal ``p``.
    """
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty quadratic-field literal")
    rat = Fraction(0)
    surd = Fraction(0)
    pos = 0
    while pos < len(s):
        m = _QUAD_TERM.match(s, pos)
        if not m or m.end() == pos or (m.group(2) is None and m.group(3) is None):
            raise ValueError(f"cannot parse {text!r} as an element of Q(√{p})")
        sign_txt, coeff_txt, root_txt, radicand_txt = m.groups()
        coeff = parse_fraction(coeff_txt) if coeff_txt else Fraction(1)
        if sign_txt == "-":
            coeff = -coeff
        if root_txt:
            if radicand_txt is not None and int(radicand_txt) != p:
                raise RadicandMismatch(f"literal {text!r} uses √{radicand_txt}, context radicand is {p}")
            surd += coeff
        else:
            rat += coeff
        pos = m.end()
    return QuadScalar(rat, surd, p)


def quad_to_json(x: QuadScalar) -> dict:
    return {"rat": fraction_to_str(x.rat), "surd": fraction_to_str(x.surd), "p": x.p}


def quad_from_json(obj: dict) -> QuadScalar:
    return QuadScalar(parse_fraction(str(obj["rat"])), parse_fraction(str(obj["surd"])), int(obj["p"]))


# -- small exact linear algebra over any field whose elements support + - * / and == 0 --

def _row_echelon(rows: Sequence[Sequence]) -> tuple[int, object]:
    """Return (rank, determinant-if-square) by fraction-exact Gaussian elimination."""
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    det = 1
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if pivot is None:
            det = 0
            continue
        if pivot != r:
            m[r], m[pivot] = m[pivot], m[r]
            det = -det
        pv = m[r][c]
        det = det * pv
        for i in range(r + 1, nrows):
            if m[i][c] != 0:
                f = m[i][c] / pv
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == nrows:
            break
    if nrows != ncols or r < nrows:
        det = 0
    return r, det


def rank(rows: Sequence[Sequence]) -> int:
    rows = [[as_fraction(x) if not isinstance(x, QuadScalar) else x for x in row] for row in rows]
    return _row_echelon(rows)[0]


def det(rows: Sequence[Sequence]):
    """Exact determinant of a square matrix of rationals (or QuadScalars)."""
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise ValueError("determinant needs a square matrix")
    if n == 0:
        return Fraction(1)
    rows = [[as_fraction(x) if not isinstance(x, QuadScalar) else x for x in row] for row in rows]
    return _row_echelon(rows)[1]


def isqrt_exact(n: int) -> int | None:
    """Integer square root if ``n`` is a perfect square, else None."""
    if n < 0:
        return None
    s = isqrt(n)
    return s if s * s == n else None
