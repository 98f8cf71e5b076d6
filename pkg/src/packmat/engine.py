"""Packing problems, feasibility verdicts and packing numbers.

Weights are normalized squared radii ``u = r^2``: a ball ``B^{2n}(r)`` has
volume ``pi^n u^n`` and the line of CP^2 has area pi, so volumes below are
quoted in units of ``pi^n`` unless a target says otherwise.
"""
from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, gcd, lcm, prod
from typing import Sequence, Union

import mpmath

from . import _backend

from .delpezzo import (
    MAX_POINTS,
    MP_FAMILIES,
    UnsupportedError,
    enumerate_exceptional,
    mp_inequalities,
)
from .divisor import DivisorClass
from .exact import QuadScalar, as_fraction, fraction_to_str, parse_fraction, qsign, sort_nonincreasing

__all__ = [
    "CP2",
    "Ball4",
    "CPn",
    "ProductProj",
    "HirzebruchOdd",
    "HirzebruchEven",
    "TorusOrK3",
    "Target",
    "PackingProblem",
    "Status",
    "Verdict",
    "volume",
    "ball_volume",
    "reduce_hirzebruch_odd",
    "reduce_hirzebruch_even",
    "feasible",
    "packing_number",
    "packing_number_by_inequalities",
    "packing_number_by_enumeration",
    "unobstructed_count",
    "seshadri_t4_gap",
    "target_from_json",
    "target_to_json",
    "UnsupportedError",
]


# -- targets -----------------------------------------------------------------

@dataclass(frozen=True)
class CP2:
    """CP^2 with the Fubini-Study form (line area pi)."""

    @property
    def dim(self) -> int:
        return 4


@dataclass(frozen=True)
class Ball4:
    """The unit 4-ball; same answers as CP^2 minus a line."""

    @property
    def dim(self) -> int:
        return 4


@dataclass(frozen=True)
class CPn:
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"CPn needs n >= 1, got {self.n!r}")

    @property
    def dim(self) -> int:
        return 2 * self.n


@dataclass(frozen=True)
class ProductProj:
    """``CP^{n_1} x ... x CP^{n_m}`` with form ``c_1 w_FS + ... + c_m w_FS``."""

    dims: tuple[int, ...]
    sizes: tuple[Fraction, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        sizes = tuple(as_fraction(c) for c in self.sizes)
        if not dims or len(dims) != len(sizes):
            raise ValueError("ProductProj needs matching, nonempty dims and sizes")
        if any(d < 1 for d in dims) or any(c <= 0 for c in sizes):
            raise ValueError("ProductProj dims and sizes must be positive")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "sizes", sizes)

    @property
    def dim(self) -> int:
        return 2 * sum(self.dims)

    def primitive_multipliers(self) -> tuple[int, ...]:
        """Smallest positive integers proportional to the sizes."""
        q = lcm(*(c.denominator for c in self.sizes))
        ints = [c.numerator * (q // c.denominator) for c in self.sizes]
        g = 0
        for x in ints:
            g = gcd(g, x)
        return tuple(x // g for x in ints)


@dataclass(frozen=True)
class HirzebruchOdd:
    """CP^2 # -CP^2 with line area pi and exceptional area ``lam * pi``, 0 < lam < 1."""

    lam: Fraction

    def __post_init__(self):
        lam = as_fraction(self.lam)
        if not 0 < lam < 1:
            raise ValueError(f"HirzebruchOdd needs 0 < lambda/pi < 1, got {lam}")
        object.__setattr__(self, "lam", lam)

    @property
    def dim(self) -> int:
        return 4


@dataclass(frozen=True)
class HirzebruchEven:
    """CP^1 x CP^1 with areas ``mu * pi`` and ``pi``, mu >= 1."""

    mu: Fraction

    def __post_init__(self):
        mu = as_fraction(self.mu)
        if mu < 1:
            raise ValueError(f"HirzebruchEven needs mu >= 1, got {mu}")
        object.__setattr__(self, "mu", mu)

    @property
    def dim(self) -> int:
        return 4


@dataclass(frozen=True)
class TorusOrK3:
    """Torus T^{2n} or a K3 surface with a Kähler-type form.

    ``volume`` is ``int w^n``; with ``units="pi"`` it is given in multiples
    of ``pi^n`` (rational), with ``units="raw"`` it is the plain number
    (rational or QuadScalar).
    """

    dim: int
    irrational: bool
    volume: Union[Fraction, QuadScalar] = Fraction(1)
    units: str = "pi"
    kind: str = "torus"

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 2 or self.dim % 2:
            raise ValueError(f"dimension must be a positive even integer, got {self.dim!r}")
        if self.kind not in ("torus", "k3"):
            raise ValueError(f"kind must be 'torus' or 'k3', got {self.kind!r}")
        if self.kind == "k3" and self.dim != 4:
            raise ValueError("a K3 surface has real dimension 4")
        if self.units not in ("pi", "raw"):
            raise ValueError(f"units must be 'pi' or 'raw', got {self.units!r}")
        vol = self.volume if isinstance(self.volume, QuadScalar) else as_fraction(self.volume)
        if isinstance(vol, QuadScalar) and self.units != "raw":
            raise ValueError("an irrational volume must be given in raw units")
        if qsign(vol) <= 0:
            raise ValueError("volume must be positive")
        object.__setattr__(self, "volume", vol)


Target = Union[CP2, Ball4, CPn, ProductProj, HirzebruchOdd, HirzebruchEven, TorusOrK3]


class Status(str, enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    OUTSIDE = "outside-coverage"


@dataclass(frozen=True)
class Verdict:
    status: Status
    witness: object = None
    note: str = ""
    margin: Fraction | None = None
    reduced: tuple[Fraction, ...] | None = None

    @property
    def feasible(self) -> bool:
        return self.status is Status.FEASIBLE

    def to_json(self) -> dict:
        w = self.witness
        out = {
            "status": self.status.value,
            "witness": w.to_json() if isinstance(w, DivisorClass) else w,
            "note": self.note,
        }
        if self.margin is not None:
            out["margin"] = fraction_to_str(self.margin)
        if self.reduced is not None:
            out["reduced"] = [fraction_to_str(x) for x in self.reduced]
        return out


@dataclass(frozen=True)
class PackingProblem:
    target: Target
    weights: tuple[Fraction, ...] = field(default=())

    def __post_init__(self):
        w = tuple(as_fraction(x) for x in self.weights)
        if any(x <= 0 for x in w):
            raise ValueError("weights must be positive")
        object.__setattr__(self, "weights", tuple(sort_nonincreasing(w)))

    def to_json(self) -> dict:
        return {"target": target_to_json(self.target), "weights": [fraction_to_str(x) for x in self.weights]}

    @classmethod
    def from_json(cls, obj: dict) -> "PackingProblem":
        return cls(target_from_json(obj["target"]), tuple(parse_fraction(str(x)) for x in obj["weights"]))


# -- volumes -----------------------------------------------------------------

def multinomial(dims: Sequence[int]) -> int:
    return factorial(sum(dims)) // prod(factorial(d) for d in dims)


def volume(target: Target):
    """Volume ``int w^n`` divided by ``pi^n`` (torus/K3 in raw units: as declared)."""
    if isinstance(target, (CP2, Ball4, CPn)):
        return Fraction(1)
    if isinstance(target, ProductProj):
        return multinomial(target.dims) * prod(c**d for c, d in zip(target.sizes, target.dims))
    if isinstance(target, HirzebruchOdd):
        return 1 - target.lam**2
    if isinstance(target, HirzebruchEven):
        return 2 * target.mu
    if isinstance(target, TorusOrK3):
        return target.volume
    raise TypeError(f"unknown target {target!r}")


def ball_volume(weights: Sequence, n: int) -> Fraction:
    """``sum u_i^n``: volume of the balls in units of ``pi^n``."""
    return sum((as_fraction(u) ** n for u in weights), Fraction(0))


def _ball_volume_below(weights, n: int, target: TorusOrK3) -> bool:
    vb = ball_volume(weights, n)
    if target.units == "pi":
        return vb < target.volume
    # pi^n * vb against a (quadratic) algebraic number: never equal, so
    # raising precision always separates them
    vol = target.volume
    with mpmath.workdps(30):
        for _ in range(12):
            lhs = mpmath.pi**n * mpmath.mpf(vb.numerator) / vb.denominator
            if isinstance(vol, QuadScalar):
                rhs = mpmath.mpf(vol.rat.numerator) / vol.rat.denominator + (
                    mpmath.mpf(vol.surd.numerator) / vol.surd.denominator
                ) * mpmath.sqrt(vol.p)
            else:
                rhs = mpmath.mpf(vol.numerator) / vol.denominator
            gap = rhs - lhs
            if abs(gap) > mpmath.mpf(10) ** (-(mpmath.mp.dps - 5)) * (1 + abs(rhs)):
                return gap > 0
            mpmath.mp.dps *= 2
    raise ArithmeticError("could not separate ball volume from target volume")


# -- Hirzebruch reductions ---------------------------------------------------

def _check_reduction_k(k: int) -> None:
    if not 2 <= k <= MAX_POINTS:
        raise UnsupportedError(f"reduction needs 2 <= k <= {MAX_POINTS} (k - 1 balls), got k = {k}")


def reduce_hirzebruch_odd(lam, weights: Sequence) -> tuple[Fraction, ...]:
    """Insert ``lam = lambda/pi`` among the squared radii and sort."""
    lam = as_fraction(lam)
    if not 0 < lam < 1:
        raise ValueError("need 0 < lambda/pi < 1")
    u = [as_fraction(x) for x in weights]
    if any(x <= 0 for x in u):
        raise ValueError("weights must be positive")
    _check_reduction_k(len(u) + 1)
    return tuple(sort_nonincreasing(u + [lam]))


def reduce_hirzebruch_even(mu, weights: Sequence) -> tuple[Fraction, ...]:
    """CP^1 x CP^1 problem to a CP^2 problem; the last weight is the distinguished one.

    With ``D = mu + 1 - u_last`` the output is the sorted list of
    ``u_i / D`` (other balls), ``(mu - u_last) / D`` and ``(1 - u_last) / D``.
    """
    mu = as_fraction(mu)
    if mu < 1:
        raise ValueError("need mu >= 1")
    u = [as_fraction(x) for x in weights]
    if any(x <= 0 for x in u):
        raise ValueError("weights must be positive")
    _check_reduction_k(len(u) + 1)
    last = u[-1]
    if last >= 1:
        raise ValueError(f"distinguished weight must be < 1, got {last}")
    D = mu + 1 - last
    out = [x / D for x in u[:-1]] + [(mu - last) / D, (1 - last) / D]
    return tuple(sort_nonincreasing(out))


# -- feasibility -------------------------------------------------------------

def _all_equal(w: Sequence[Fraction]) -> bool:
    return len(set(w)) <= 1


def _integer_root(k: int, n: int) -> int | None:
    """``l`` with ``l**n == k`` or None."""
    lo, hi = 1, max(1, k)
    while lo <= hi:
        mid = (lo + hi) // 2
        v = mid**n
        if v == k:
            return mid
        if v < k:
            lo = mid + 1
        else:
            hi = mid - 1
    return None


def _cp2_verdict(w: tuple[Fraction, ...], name: str) -> Verdict:
    k = len(w)
    if k == 0:
        return Verdict(Status.FEASIBLE, note="no balls")
    if k <= MAX_POINTS:
        cv = mp_inequalities(w)
        if cv.feasible:
            return Verdict(Status.FEASIBLE, note=f"{name}: (v),(c1)-(c6) hold")
        return Verdict(Status.INFEASIBLE, cv.witness, f"{name}: failed {', '.join(cv.failures)}", cv.margin)
    if _all_equal(w) and _integer_root(k, 2) is not None:
        margin = 1 - k * w[0] ** 2
        if margin > 0:
            return Verdict(Status.FEASIBLE, note=f"{name}: {k} = l^2 equal balls, volume only")
        return Verdict(Status.INFEASIBLE, "(v)", f"{name}: volume {k * w[0] ** 2} >= 1", margin)
    return Verdict(
        Status.OUTSIDE,
        note=f"{name}: {k} > {MAX_POINTS} balls that are not l^2 equal balls; cone of the blow-up is unknown",
    )


def _equal_ball_volume_verdict(w, n: int, vol: Fraction, name: str, count_note: str) -> Verdict:
    vb = ball_volume(w, n)
    margin = vol - vb
    if margin > 0:
        return Verdict(Status.FEASIBLE, note=f"{name}: {count_note}, volume only")
    return Verdict(Status.INFEASIBLE, "(v)", f"{name}: ball volume {vb} >= {vol}", margin)


def _product_count_ok(target: ProductProj, k: int) -> bool:
    n = sum(target.dims)
    base = unobstructed_count(target.dims, target.primitive_multipliers())
    if k % base:
        return False
    return _integer_root(k // base, n) is not None


def feasible(problem: PackingProblem) -> Verdict:
    """Decide a packing problem wherever a stated criterion covers it."""
    t, w = problem.target, problem.weights
    k = len(w)
    if isinstance(t, (CP2, Ball4)):
        return _cp2_verdict(w, "CP2" if isinstance(t, CP2) else "B4(1)")
    if isinstance(t, CPn):
        if t.n == 2:
            return _cp2_verdict(w, "CP2")
        if k == 0:
            return Verdict(Status.FEASIBLE, note="no balls")
        if _all_equal(w) and _integer_root(k, t.n) is not None:
            return _equal_ball_volume_verdict(w, t.n, Fraction(1), f"CP{t.n}", f"{k} = l^{t.n} equal balls")
        return Verdict(Status.OUTSIDE, note=f"CP{t.n}: only l^n equal balls are covered")
    if isinstance(t, ProductProj):
        n = sum(t.dims)
        if len(t.dims) == 1 and n == 2 and t.sizes[0] == 1:
            return _cp2_verdict(w, "CP2")
        if k == 0:
            return Verdict(Status.FEASIBLE, note="no balls")
        if _all_equal(w) and _product_count_ok(t, k):
            return _equal_ball_volume_verdict(w, n, volume(t), "product", f"{k} equal balls (multinomial count)")
        return Verdict(Status.OUTSIDE, note="product: only the multinomial equal-ball counts are covered")
    if isinstance(t, HirzebruchOdd):
        if k == 0:
            return Verdict(Status.FEASIBLE, note="no balls")
        if k + 1 > MAX_POINTS:
            return Verdict(Status.OUTSIDE, note=f"odd Hirzebruch: at most {MAX_POINTS - 1} balls are covered")
        red = reduce_hirzebruch_odd(t.lam, w)
        return _reduced_verdict(red, "odd Hirzebruch")
    if isinstance(t, HirzebruchEven):
        if k == 0:
            return Verdict(Status.FEASIBLE, note="no balls")
        if k + 1 <= MAX_POINTS:
            if w[-1] >= 1:
                return Verdict(Status.OUTSIDE, note="even Hirzebruch: reduction needs a ball with u < 1")
            red = reduce_hirzebruch_even(t.mu, w)
            return _reduced_verdict(red, "even Hirzebruch")
        prod_target = ProductProj((1, 1), (t.mu, Fraction(1)))
        if _all_equal(w) and _product_count_ok(prod_target, k):
            return _equal_ball_volume_verdict(w, 2, volume(t), "even Hirzebruch", f"{k} equal balls")
        return Verdict(Status.OUTSIDE, note=f"even Hirzebruch: more than {MAX_POINTS - 1} balls, not an equal-ball count")
    if isinstance(t, TorusOrK3):
        name = "K3" if t.kind == "k3" else f"T^{t.dim}"
        if not t.irrational:
            return Verdict(
                Status.OUTSIDE,
                note=f"{name}: rational form; Kähler-type obstructions beyond volume can occur "
                "(on T^4 with the standard form, balls of volume in [16/9, 2) embed symplectically "
                "but not Kähler-type)",
            )
        n = t.dim // 2
        if _ball_volume_below(w, n, t):
            return Verdict(Status.FEASIBLE, note=f"{name}: irrational form, volume only")
        return Verdict(Status.INFEASIBLE, "(v)", f"{name}: ball volume is not below the target volume")
    raise TypeError(f"unknown target {t!r}")


def _reduced_verdict(red: tuple[Fraction, ...], name: str) -> Verdict:
    cv = mp_inequalities(red)
    if cv.feasible:
        return Verdict(Status.FEASIBLE, note=f"{name}: reduced CP2 problem passes", reduced=red)
    return Verdict(
        Status.INFEASIBLE, cv.witness, f"{name}: reduced CP2 problem fails {', '.join(cv.failures)}", cv.margin, red
    )


# -- packing numbers ---------------------------------------------------------

def _class_bound(c: DivisorClass, u: Sequence[Fraction], s2: Fraction) -> Fraction | None:
    pair = sum(b * x for b, x in zip(c.b, u))
    if c.a > 0 and pair > 0:
        return Fraction(c.a) ** 2 / pair**2 * s2
    return None


def packing_number_by_enumeration(weights: Sequence) -> Fraction:
    """``min(1, min_C (d / C.u)^2 sum u^2)`` over every enumerated exceptional class ``C = (d; m)``.

    Classes are paired with ``u`` slot by slot (no sorting of ``m``); with
    ``PACKMAT_THREADS > 1`` the class list is split across threads and the
    minimum reduced afterwards.
    """
    u = tuple(sort_nonincreasing(as_fraction(x) for x in weights))
    if not 1 <= len(u) <= MAX_POINTS:
        raise UnsupportedError("need 1 <= k <= 8 weights")
    s2 = sum(x * x for x in u)
    classes = enumerate_exceptional(len(u)).classes

    def chunk_min(chunk):
        vals = [b for b in (_class_bound(c, u, s2) for c in chunk) if b is not None]
        return min(vals, default=Fraction(1))

    workers = _backend.threads()
    if workers > 1 and len(classes) > 1:
        step = -(-len(classes) // workers)
        chunks = [classes[i : i + step] for i in range(0, len(classes), step)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partial = list(pool.map(chunk_min, chunks))
    else:
        partial = [chunk_min(classes)]
    return min([Fraction(1), *partial])


def packing_number_by_inequalities(weights: Sequence) -> Fraction:
    """Same quantity from the named families (c1)-(c6) and (v)."""
    u = tuple(sort_nonincreasing(as_fraction(x) for x in weights))
    k = len(u)
    if not 1 <= k <= MAX_POINTS:
        raise UnsupportedError("need 1 <= k <= 8 weights")
    s2 = sum(x * x for x in u)
    best = Fraction(1)
    for _label, kmin, coef, rhs in MP_FAMILIES:
        if k >= kmin:
            lhs = sum(c * x for c, x in zip(coef, u))
            best = min(best, Fraction(rhs) ** 2 / lhs**2 * s2)
    return best


def packing_number(target: Target, weights: Sequence, method: str = "enumeration") -> Fraction:
    """Supremal fraction of the target volume filled by ``lambda * W`` for embeddable ``lambda``."""
    w = tuple(sort_nonincreasing(as_fraction(x) for x in weights))
    if not w or any(x <= 0 for x in w):
        raise ValueError("need at least one positive weight")
    k = len(w)
    if isinstance(target, (CP2, Ball4)) or (isinstance(target, CPn) and target.n == 2):
        if k <= MAX_POINTS:
            if method == "enumeration":
                return packing_number_by_enumeration(w)
            if method == "inequalities":
                return packing_number_by_inequalities(w)
            raise ValueError(f"unknown method {method!r}")
        if _all_equal(w) and _integer_root(k, 2) is not None:
            return Fraction(1)
        raise UnsupportedError("CP2: packing number only for k <= 8 or l^2 equal balls")
    if isinstance(target, CPn):
        if _all_equal(w) and _integer_root(k, target.n) is not None:
            return Fraction(1)
        raise UnsupportedError(f"CP{target.n}: packing number only for l^n equal balls")
    if isinstance(target, ProductProj):
        if _all_equal(w) and _product_count_ok(target, k):
            return Fraction(1)
        raise UnsupportedError("product: packing number only for the multinomial equal-ball counts")
    if isinstance(target, TorusOrK3) and target.irrational:
        return Fraction(1)
    raise UnsupportedError(f"no packing-number criterion for {target!r}")


def unobstructed_count(dims: Sequence[int], multipliers: Sequence[int]) -> int:
    """``(n_1 + ... + n_m)! / (n_1! ... n_m!) * l_1^{n_1} ... l_m^{n_m}``."""
    dims = [int(d) for d in dims]
    mult = [int(x) for x in multipliers]
    if len(dims) != len(mult) or not dims or any(x < 1 for x in dims + mult):
        raise ValueError("need matching lists of positive integers")
    return multinomial(dims) * prod(l**d for l, d in zip(mult, dims))


def seshadri_t4_gap() -> tuple[Fraction, Fraction]:
    """Raw ball volumes ``[16/9, 2)``: symplectic but not Kähler-type in standard rational T^4."""
    return Fraction(4, 3) ** 2, Fraction(2)


# -- JSON --------------------------------------------------------------------

def target_to_json(t: Target) -> dict:
    if isinstance(t, CP2):
        return {"kind": "cp2"}
    if isinstance(t, Ball4):
        return {"kind": "ball4"}
    if isinstance(t, CPn):
        return {"kind": "cpn", "n": t.n}
    if isinstance(t, ProductProj):
        return {"kind": "product", "dims": list(t.dims), "sizes": [fraction_to_str(c) for c in t.sizes]}
    if isinstance(t, HirzebruchOdd):
        return {"kind": "hirzebruch-odd", "lambda": fraction_to_str(t.lam)}
    if isinstance(t, HirzebruchEven):
        return {"kind": "hirzebruch-even", "mu": fraction_to_str(t.mu)}
    if isinstance(t, TorusOrK3):
        from .exact import quad_to_json

        vol = quad_to_json(t.volume) if isinstance(t.volume, QuadScalar) else fraction_to_str(t.volume)
        return {"kind": t.kind, "dim": t.dim, "irrational": t.irrational, "volume": vol, "units": t.units}
    raise TypeError(f"unknown target {t!r}")


def target_from_json(obj: dict) -> Target:
    kind = obj.get("kind")
    if kind == "cp2":
        return CP2()
    if kind == "ball4":
        return Ball4()
    if kind == "cpn":
        return CPn(int(obj["n"]))
    if kind == "product":
        return ProductProj(tuple(int(d) for d in obj["dims"]), tuple(parse_fraction(str(c)) for c in obj["sizes"]))
    if kind == "hirzebruch-odd":
        return HirzebruchOdd(parse_fraction(str(obj["lambda"])))
    if kind == "hirzebruch-even":
        return HirzebruchEven(parse_fraction(str(obj["mu"])))
    if kind in ("torus", "k3"):
        from .exact import quad_from_json

        raw = obj.get("volume", "1")
        vol = quad_from_json(raw) if isinstance(raw, dict) else parse_fraction(str(raw))
        return TorusOrK3(
            dim=int(obj.get("dim", 4)),
            irrational=bool(obj["irrational"]),
            volume=vol,
            units=obj.get("units", "pi"),
            kind=kind,
        )
    raise ValueError(f"unknown target kind {kind!r}")
