"""Lattice and linear-algebra side of tori and K3 surfaces.

* irrationality of cohomology classes with entries in Q(sqrt p),
* exterior powers of linear 2-forms,
* the matrix set S of bases whose pulled-back standard form is irrational,
* integral Gram lattices: pairing, (-2)-classes, signature, chambers cut
  out by finitely many (-2)-walls, positive 2-planes.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from math import factorial
from typing import Iterable, Mapping, Sequence

from .exact import QuadScalar, as_fraction, fraction_to_str, qsign, quad_from_json, quad_to_json

__all__ = [
    "is_real_multiple_of_rational",
    "AlternatingForm",
    "wedge",
    "wedge_power",
    "pfaffian_bruteforce",
    "standard_symplectic_matrix",
    "in_S",
    "SSample",
    "sample_S",
    "GramLattice",
    "DegenerateFormError",
    "NotPositiveError",
    "OnWallError",
    "hyperbolic_plane",
    "e8_lattice",
    "k3_lattice",
    "direct_sum",
    "pair",
    "is_minus2",
    "signature",
    "chamber_signature",
    "positive_plane",
]


def _q(x, p: int | None = None):
    if isinstance(x, QuadScalar):
        return x
    return as_fraction(x)


# -- irrationality -----------------------------------------------------------

def is_real_multiple_of_rational(v: Sequence) -> bool:
    """True iff ``v = lambda * w`` with ``w`` rational and ``lambda`` real.

    Divides by the first nonzero entry and checks every ratio has no surd.
    """
    vals = [_q(x) for x in v]
    pivot = next((x for x in vals if x != 0), None)
    if pivot is None:
        raise ValueError("the zero vector is not a class")
    for x in vals:
        r = x / pivot
        if isinstance(r, QuadScalar) and not r.is_rational():
            return False
    return True


def _first_irrational_ratio(vals: Sequence) -> tuple[int, int] | None:
    piv = next((i for i, x in enumerate(vals) if x != 0), None)
    if piv is None:
        return None
    for j, x in enumerate(vals):
        r = x / vals[piv]
        if isinstance(r, QuadScalar) and not r.is_rational():
            return piv, j
    return None


# -- alternating forms -------------------------------------------------------

def _perm_sign(seq: Sequence[int]) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        while seq[i] != i:
            j = seq[i]
            seq[i], seq[j] = seq[j], seq[i]
            sign = -sign
    return sign


def _sort_sign(idx: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the permutation sorting ``idx`` (0 if an index repeats) and the sorted tuple."""
    if len(set(idx)) != len(idx):
        return 0, ()
    order = sorted(range(len(idx)), key=lambda i: idx[i])
    return _perm_sign(order), tuple(sorted(idx))


@dataclass(frozen=True)
class AlternatingForm:
    """A constant-coefficient ``degree``-form on R^dim, keyed by increasing index tuples (0-based)."""

    dim: int
    degree: int
    coeffs: Mapping[tuple[int, ...], object]

    def __post_init__(self):
        clean = {}
        for idx, c in dict(self.coeffs).items():
            idx = tuple(int(i) for i in idx)
            if len(idx) != self.degree or any(not 0 <= i < self.dim for i in idx):
                raise ValueError(f"bad index {idx} for a {self.degree}-form on R^{self.dim}")
            s, key = _sort_sign(idx)
            if s == 0:
                continue
            c = _q(c)
            clean[key] = clean.get(key, 0) + (c if s > 0 else -c)
        object.__setattr__(self, "coeffs", {k: v for k, v in sorted(clean.items()) if v != 0})

    @classmethod
    def from_matrix(cls, A: Sequence[Sequence]) -> "AlternatingForm":
        """2-form ``sum_{i<j} A[i][j] e_i ^ e_j`` of an antisymmetric matrix."""
        n = len(A)
        for i in range(n):
            for j in range(n):
                if A[i][j] != -A[j][i]:
                    raise ValueError("matrix is not antisymmetric")
        return cls(n, 2, {(i, j): A[i][j] for i in range(n) for j in range(i + 1, n) if A[i][j] != 0})

    def matrix(self) -> list[list]:
        if self.degree != 2:
            raise ValueError("only 2-forms have a matrix")
        A = [[Fraction(0)] * self.dim for _ in range(self.dim)]
        for (i, j), c in self.coeffs.items():
            A[i][j] = c
            A[j][i] = -c
        return A

    def coefficient(self, idx: Sequence[int]):
        s, key = _sort_sign(tuple(idx))
        if s == 0:
            return Fraction(0)
        c = self.coeffs.get(key, Fraction(0))
        return c if s > 0 else -c

    def vector(self) -> list:
        """Coefficients over all increasing multi-indices, in lexicographic order."""
        return [self.coefficient(idx) for idx in combinations(range(self.dim), self.degree)]

    def is_rational_multiple(self) -> bool:
        return is_real_multiple_of_rational(self.vector())

    def to_json(self) -> list[dict]:
        out = []
        for idx, c in self.coeffs.items():
            coeff = quad_to_json(c) if isinstance(c, QuadScalar) else fraction_to_str(c)
            out.append({"indices": list(idx), "coeff": coeff})
        return out

    @classmethod
    def from_json(cls, dim: int, degree: int, items: Iterable[dict]) -> "AlternatingForm":
        coeffs = {}
        for item in items:
            c = item["coeff"]
            coeffs[tuple(item["indices"])] = quad_from_json(c) if isinstance(c, dict) else as_fraction(str(c))
        return cls(dim, degree, coeffs)


def wedge(a: AlternatingForm, b: AlternatingForm) -> AlternatingForm:
    if a.dim != b.dim:
        raise ValueError("forms live on different spaces")
    if a.degree + b.degree > a.dim:
        return AlternatingForm(a.dim, a.degree + b.degree, {})
    out: dict[tuple[int, ...], object] = {}
    for I, x in a.coeffs.items():
        for J, y in b.coeffs.items():
            s, key = _sort_sign(I + J)
            if s == 0:
                continue
            term = x * y
            out[key] = out.get(key, 0) + (term if s > 0 else -term)
    return AlternatingForm(a.dim, a.degree + b.degree, out)


def wedge_power(omega: AlternatingForm, l: int) -> AlternatingForm:
    """``omega^l`` for a 2-form, 1 <= l <= dim/2."""
    if omega.degree != 2:
        raise ValueError("wedge_power expects a 2-form")
    if not 1 <= l <= omega.dim // 2:
        raise ValueError(f"power {l} overflows degree on R^{omega.dim}")
    out = omega
    for _ in range(l - 1):
        out = wedge(out, omega)
    return out


def pfaffian_bruteforce(A: Sequence[Sequence]):
    """Pfaffian by summing over all permutations (reference implementation, tiny sizes only)."""
    n = len(A)
    if n % 2:
        return Fraction(0)
    m = n // 2
    total = 0
    for perm in permutations(range(n)):
        term = _perm_sign(perm)
        for i in range(m):
            term = term * A[perm[2 * i]][perm[2 * i + 1]]
        total = total + term
    return total / (2**m * factorial(m))


# -- the set S ---------------------------------------------------------------

def standard_symplectic_matrix(n: int) -> list[list[Fraction]]:
    """``J0 = [[0, I], [-I, 0]]`` of size 2n."""
    J = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        J[i][n + i] = Fraction(1)
        J[n + i][i] = Fraction(-1)
    return J


def _matmul(A, B):
    return [[sum((A[i][t] * B[t][j] for t in range(len(B))), Fraction(0)) for j in range(len(B[0]))]
            for i in range(len(A))]


def _transpose(A):
    return [list(r) for r in zip(*A)]


def _pulled_back(Z) -> list[list]:
    size = len(Z)
    if size == 0 or size % 2 or any(len(r) != size for r in Z):
        raise ValueError("Z must be a square matrix of even size")
    Zq = [[_q(x) for x in row] for row in Z]
    return _matmul(_matmul(_transpose(Zq), standard_symplectic_matrix(size // 2)), Zq)


def in_S(Z: Sequence[Sequence]) -> bool:
    """True iff no positive real multiple of ``Z^t J0 Z`` is a rational matrix."""
    A = _pulled_back(Z)
    upper = [A[i][j] for i in range(len(A)) for j in range(i + 1, len(A))]
    if all(x == 0 for x in upper):
        return False
    return not is_real_multiple_of_rational(upper)


@dataclass(frozen=True)
class SSample:
    Z: tuple[tuple, ...]
    pivot: tuple[int, int]
    witness: tuple[int, int]


def sample_S(n: int, seed: int = 0, p: int = 2, max_tries: int = 1000) -> SSample:
    """Deterministic element of S: rational ``A, C`` blocks, ``B, D`` with entries in Q(sqrt p).

    ``pivot``/``witness`` are positions (row, col) of two entries of
    ``Z^t J0 Z`` whose ratio is irrational.
    """
    if n < 2:
        raise ValueError("S-samples need n >= 2; for n = 1 every Z^t J0 Z is det(Z) J0")
    rng = random.Random(seed)

    def rat():
        return Fraction(rng.randint(-5, 5), rng.randint(1, 4))

    def quad():
        return QuadScalar(rat(), rat(), p)

    for _ in range(max_tries):
        A = [[rat() for _ in range(n)] for _ in range(n)]
        C = [[rat() for _ in range(n)] for _ in range(n)]
        B = [[quad() for _ in range(n)] for _ in range(n)]
        D = [[quad() for _ in range(n)] for _ in range(n)]
        Z = [A[i] + B[i] for i in range(n)] + [C[i] + D[i] for i in range(n)]
        Z = [[x if isinstance(x, QuadScalar) else QuadScalar(x, 0, p) for x in row] for row in Z]
        if not in_S(Z):
            continue
        M = _pulled_back(Z)
        pos = [(i, j) for i in range(2 * n) for j in range(i + 1, 2 * n)]
        hit = _first_irrational_ratio([M[i][j] for i, j in pos])
        assert hit is not None
        return SSample(tuple(tuple(r) for r in Z), pos[hit[0]], pos[hit[1]])
    raise RuntimeError("no element of S found; increase max_tries")


# -- Gram lattices -----------------------------------------------------------

class DegenerateFormError(ValueError):
    def __init__(self, radical_dim: int, pos: int, neg: int):
        super().__init__(f"form is degenerate: radical has dimension {radical_dim} (signature part ({pos},{neg}))")
        self.radical_dim = radical_dim
        self.pos = pos
        self.neg = neg


class NotPositiveError(ValueError):
    """The class does not have positive square."""


class OnWallError(ValueError):
    def __init__(self, wall):
        super().__init__(f"class is orthogonal to the wall {list(wall)}")
        self.wall = tuple(wall)


@dataclass(frozen=True)
class GramLattice:
    gram: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        g = tuple(tuple(int(x) for x in row) for row in self.gram)
        n = len(g)
        if any(len(r) != n for r in g):
            raise ValueError("Gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
            raise ValueError("Gram matrix must be symmetric")
        object.__setattr__(self, "gram", g)

    @property
    def rank(self) -> int:
        return len(self.gram)

    def signature(self) -> tuple[int, int]:
        return signature(self)

    def to_json(self) -> list[list[int]]:
        return [list(r) for r in self.gram]


def hyperbolic_plane() -> GramLattice:
    return GramLattice(((0, 1), (1, 0)))


_E8_EDGES = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (2, 7)]


def e8_lattice(sign: int = 1) -> GramLattice:
    """E8 from its Cartan matrix (Bourbaki-like labelling), times ``sign``."""
    G = [[0] * 8 for _ in range(8)]
    for i in range(8):
        G[i][i] = 2
    for i, j in _E8_EDGES:
        G[i][j] = G[j][i] = -1
    return GramLattice(tuple(tuple(sign * x for x in row) for row in G))


def direct_sum(*lattices: GramLattice) -> GramLattice:
    n = sum(L.rank for L in lattices)
    G = [[0] * n for _ in range(n)]
    off = 0
    for L in lattices:
        for i in range(L.rank):
            for j in range(L.rank):
                G[off + i][off + j] = L.gram[i][j]
        off += L.rank
    return GramLattice(tuple(tuple(r) for r in G))


def k3_lattice() -> GramLattice:
    """``U + U + U + E8(-1) + E8(-1)``, rank 22."""
    U = hyperbolic_plane()
    return direct_sum(U, U, U, e8_lattice(-1), e8_lattice(-1))


def pair(L: GramLattice, a: Sequence, b: Sequence):
    if len(a) != L.rank or len(b) != L.rank:
        raise ValueError(f"vectors must have length {L.rank}")
    return sum(a[i] * L.gram[i][j] * b[j] for i in range(L.rank) for j in range(L.rank) if L.gram[i][j])


def is_minus2(L: GramLattice, b: Sequence[int]) -> bool:
    return pair(L, b, b) == -2


def signature(L: GramLattice | Sequence[Sequence]) -> tuple[int, int]:
    """(positive, negative) index by exact symmetric Gaussian elimination over Q."""
    G = L.gram if isinstance(L, GramLattice) else L
    M = [[as_fraction(x) for x in row] for row in G]
    n = len(M)
    pos = neg = 0
    active = list(range(n))
    while active:
        i = next((i for i in active if M[i][i] != 0), None)
        if i is None:
            # no nonzero diagonal: find an off-diagonal entry and add row/col j to i
            hit = next(((i, j) for i in active for j in active if i != j and M[i][j] != 0), None)
            if hit is None:
                break
            i, j = hit
            for t in range(n):
                M[i][t] += M[j][t]
            for t in range(n):
                M[t][i] += M[t][j]
            # now M[i][i] = 2 M[i][j] != 0
        d = M[i][i]
        if d > 0:
            pos += 1
        else:
            neg += 1
        active.remove(i)
        for r in active:
            if M[r][i] != 0:
                f = M[r][i] / d
                for t in range(n):
                    M[r][t] -= f * M[i][t]
        for r in active:
            M[i][r] = Fraction(0)
            M[r][i] = Fraction(0)
    zero = n - pos - neg
    if zero:
        raise DegenerateFormError(zero, pos, neg)
    return pos, neg


def chamber_signature(L: GramLattice, alpha: Sequence, walls: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Signs of ``q(alpha, b)`` over the walls; identifies the chamber of a positive class."""
    alpha = [_q(x) for x in alpha]
    if pair(L, alpha, alpha) <= 0:
        raise NotPositiveError("alpha must have positive square")
    out = []
    for b in walls:
        if pair(L, b, b) != -2:
            raise ValueError(f"wall {list(b)} is not a (-2)-class")
        s = qsign(pair(L, alpha, b))
        if s == 0:
            raise OnWallError(b)
        out.append(s)
    return tuple(out)


def positive_plane(L: GramLattice, a: Sequence, b: Sequence) -> bool:
    """Is span(a, b) a positive definite 2-plane?"""
    a = [as_fraction(x) for x in a]
    b = [as_fraction(x) for x in b]
    qaa, qab, qbb = pair(L, a, a), pair(L, a, b), pair(L, b, b)
    # independence is a lattice (Euclidean) statement, not a form statement
    if all(a[i] * b[j] == a[j] * b[i] for i in range(len(a)) for j in range(len(a))):
        raise ValueError("a and b are linearly dependent")
    return qaa > 0 and qaa * qbb - qab * qab > 0
