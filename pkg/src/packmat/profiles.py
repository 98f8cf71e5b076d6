"""Radial Kähler potentials glued by a regularized maximum.

Potentials are functions of ``t = |z|^2``; the 2-form ``(i/2) dd^c f(|z|^2)``
is positive iff ``f'(t) > 0`` and ``f'(t) + t f''(t) > 0``.

Blow-up:   F(t) = t - r^2 - sigma,   G(t) = gamma t + r^2 log(t / r^2)
Blow-down: F(t) = t + d,             G(t) = c^2 t + r^2 log(t / r^2)

``gamma`` is the coefficient of ``t`` in G.  Passing ``gamma = c`` follows
the linear convention, ``gamma = c**2`` the squared one; both glue.
"""
from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "regmax",
    "find_crossings",
    "Crossing",
    "RadialPotential",
    "PositivityReport",
    "ProfileError",
    "blowup_functions",
    "blowdown_functions",
    "blowup_profile",
    "blowdown_profile",
    "blowup_gamma_threshold",
    "verify_positivity",
    "matching_errors",
]


class ProfileError(ValueError):
    """No admissible gluing data for the requested parameters."""


# -- regularized maximum ----------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(64)


def _step(v):
    """Smooth monotone step on [-1, 1]: 0 below, 1 above, S(-v) = 1 - S(v)."""
    v = np.asarray(v, dtype=float)
    x = np.clip((v + 1.0) / 2.0, 0.0, 1.0)
    out = np.where(x >= 1.0, 1.0, 0.0)
    inner = (x > 0.0) & (x < 1.0)
    xi = x[inner]
    z = 1.0 / (1.0 - xi) - 1.0 / xi
    out[inner] = 0.5 * (1.0 + np.tanh(np.clip(z, -700, 700) / 2.0))
    return out


def _psi(v):
    """Even convex C-infinity function with psi(v) = |v| for |v| >= 1 and |v| <= psi <= 1 inside.

    For 0 <= v < 1, psi(v) = v + int_v^1 2 (1 - S(w)) dw.
    """
    a = np.abs(np.asarray(v, dtype=float))
    out = a.copy()
    inner = a < 1.0
    if np.any(inner):
        lo = a[inner][:, None]
        half = (1.0 - lo) / 2.0
        nodes = lo + half * (_GL_X[None, :] + 1.0)
        vals = 2.0 * (1.0 - _step(nodes))
        out[inner] = a[inner] + (half[:, 0] * (vals @ _GL_W))
    return out


def regmax(x, y, delta: float):
    """Smooth symmetric convex maximum.

    ``max(x, y) <= regmax <= max(x, y) + delta`` and ``regmax == max(x, y)``
    whenever ``|x - y| >= 2 delta``.  Accepts scalars or arrays.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    xa, ya = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    shape = xa.shape
    xa, ya = xa.ravel(), ya.ravel()
    u = (xa - ya) / (2.0 * delta)
    out = np.maximum(xa, ya)
    near = np.abs(u) < 1.0
    if np.any(near):
        mid = (xa[near] + ya[near]) / 2.0
        out[near] = np.maximum(mid + delta * _psi(u[near]), out[near])
    if not shape:
        return float(out[0])
    return out.reshape(shape)


# -- crossings ---------------------------------------------------------------

@dataclass(frozen=True)
class Crossing:
    root: float
    bracket: tuple[float, float]


def find_crossings(F: Callable[[float], float], G: Callable[[float], float], interval, n_scan: int = 4000,
                   tol: float = 1e-13) -> list[Crossing]:
    """Strict sign changes of ``F - G`` on ``interval``, refined by bisection."""
    lo, hi = map(float, interval)
    if not lo < hi:
        raise ValueError("empty interval")

    def h(s):
        return F(s) - G(s)

    xs = np.linspace(lo, hi, n_scan + 1)
    vals = [h(float(s)) for s in xs]
    roots = []
    for i in range(n_scan):
        a, b = float(xs[i]), float(xs[i + 1])
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0 and i > 0 and vals[i - 1] * fb < 0:
            roots.append(Crossing(a, (a, a)))
            continue
        if fa * fb >= 0:
            continue
        for _ in range(200):
            m = 0.5 * (a + b)
            fm = h(m)
            if fm == 0.0:
                a = b = m
                break
            if (fm < 0) == (fa < 0):
                a, fa = m, fm
            else:
                b = m
            if b - a <= 4 * np.finfo(float).eps * max(1.0, abs(m)):
                break
        m = 0.5 * (a + b)
        if abs(h(m)) >= max(tol, 1e3 * np.finfo(float).eps * max(1.0, abs(F(m)))):
            raise ProfileError(f"bisection did not converge near {m}")
        roots.append(Crossing(m, (a, b)))
    if not roots:
        raise ProfileError("F - G has no strict sign change on the interval")
    return roots


# -- potentials --------------------------------------------------------------

def blowup_functions(r: float, gamma: float, sigma: float):
    """``(F, G)`` of the blow-up gluing, as functions of t."""
    r2 = r * r
    return (lambda t: np.asarray(t) - r2 - sigma, lambda t: gamma * np.asarray(t) + r2 * np.log(np.asarray(t) / r2))


def blowdown_functions(r: float, c: float, d: float):
    r2 = r * r
    g = c * c
    return (lambda t: np.asarray(t) + d, lambda t: g * np.asarray(t) + r2 * np.log(np.asarray(t) / r2))


@dataclass
class RadialPotential:
    kind: str
    t: np.ndarray
    f: np.ndarray
    r: float
    eps: float
    c: float
    delta: float
    s1: float
    s2: float
    sigma: float | None = None
    d: float | None = None
    gamma: float | None = None
    pieces: dict = field(default_factory=dict)

    def metadata(self) -> dict:
        return {k: v for k, v in asdict(self).items() if k not in ("t", "f", "pieces")}

    def derivatives(self):
        return _derivatives(self.t, self.f)

    def to_csv(self, path) -> None:
        tt, d1, d2 = self.derivatives()
        fi = self.f[1:-1]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "f", "fprime", "fprime_plus_t_fsecond"])
            for row in zip(tt, fi, d1, d1 + tt * d2):
                w.writerow([repr(float(x)) for x in row])

    def report(self, floor: float = 1e-9) -> dict:
        rep = verify_positivity(self, floor)
        return {
            "metadata": self.metadata(),
            "positivity": asdict(rep),
            "matching": matching_errors(self),
        }

    def to_svg(self, path) -> None:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        tt, d1, d2 = self.derivatives()
        fig, axes = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
        axes[0].plot(self.t, self.f, label="glued")
        for name, fn in self.pieces.items():
            axes[0].plot(self.t, fn(self.t), "--", lw=0.8, label=name)
        axes[0].set_ylabel("f(t)")
        axes[0].legend()
        axes[1].plot(tt, d1, label="f'")
        axes[1].plot(tt, d1 + tt * d2, label="f' + t f''")
        axes[1].set_xlabel("t = |z|^2")
        axes[1].legend()
        fig.suptitle(f"{self.kind} profile, r={self.r}, eps={self.eps}, c={self.c}")
        fig.savefig(path, format="svg")
        plt.close(fig)


def _grid(t_min: float, t_geo_end: float, t_max: float, n: int) -> np.ndarray:
    """Geometric on [t_min, t_geo_end], linear on [t_geo_end, t_max], steps matched at the seam."""
    if t_min >= t_geo_end:
        return np.linspace(t_min, t_max, n)
    L = math.log(t_geo_end / t_min)
    span = t_max - t_geo_end

    def excess(q):  # points used minus points available, for ratio q
        lq = math.log(q)
        return L / lq + span / (t_geo_end * (q - 1.0)) - (n - 1)

    lo, hi = 1.0 + 1e-12, 10.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
    q = hi
    n_geo = max(2, int(round(L / math.log(q))) + 1)
    n_lin = max(2, n - n_geo + 1)
    geo = np.geomspace(t_min, t_geo_end, n_geo)
    lin = np.linspace(t_geo_end, t_max, n_lin)
    return np.concatenate([geo, lin[1:]])


def blowup_gamma_threshold(r: float, eps: float) -> float:
    """Supremum of admissible ``gamma`` (bisection on the crossing condition at r + eps)."""
    T = (r + eps) ** 2
    r2 = r * r

    def sigma_max(g):
        return (1.0 - g) * T - r2 * (1.0 + math.log(T / r2))

    lo, hi = 0.0, 1.0
    if sigma_max(lo) <= 0:
        return 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if sigma_max(mid) > 0:
            lo = mid
        else:
            hi = mid
    return lo


def blowup_profile(r: float, eps: float, gamma: float, *, sigma: float | None = None,
                   delta: float | None = None, n: int = 4096) -> RadialPotential:
    """Potential equal to G on t <= r^2 and to regmax(F, G) beyond; equals F for t >= (r+eps)^2."""
    if not (r > 0 and eps > 0 and gamma > 0):
        raise ProfileError("need r, eps, gamma > 0")
    r2, T = r * r, (r + eps) ** 2
    threshold = blowup_gamma_threshold(r, eps)
    if gamma >= threshold:
        raise ProfileError(f"c too large: need gamma < {threshold:.12g} for r={r}, eps={eps}")
    sig_max = (1.0 - gamma) * T - r2 * (1.0 + math.log(T / r2))
    if sigma is None:
        sigma = 0.5 * sig_max
    elif not 0 < sigma < sig_max:
        raise ProfileError(f"sigma must lie in (0, {sig_max:.12g})")
    F, G = blowup_functions(r, gamma, sigma)
    roots = find_crossings(lambda s: float(F(s * s)), lambda s: float(G(s * s)), (1e-3 * r, r + eps))
    if len(roots) != 2:
        raise ProfileError(f"expected two crossings, found {len(roots)}")
    s1, s2 = roots[0].root, roots[1].root
    if not (0 < s1 < r < s2 < r + eps):
        raise ProfileError("crossings are not in the pattern s1 < r < s2 < r + eps")
    gap_in = float(G(r2) - F(r2))
    gap_out = float(F(T) - G(T))
    dmax = 0.5 * min(gap_in, gap_out)
    if delta is None:
        delta = 0.9 * dmax
    elif not 0 < delta < dmax:
        raise ProfileError(f"delta must lie in (0, {dmax:.12g})")
    margin = 0.5 * eps
    t = _grid(0.25 * s1 * s1, 0.5 * r2, (r + eps + margin) ** 2, n)
    f = np.where(t <= r2, G(t), regmax(F(t), G(t), delta))
    return RadialPotential("blowup", t, f, r, eps, gamma, delta, s1, s2, sigma=sigma, gamma=gamma,
                           pieces={"F": F, "G": G})


def blowdown_profile(r: float, eps: float, c: float, *, d: float | None = None,
                     delta: float | None = None, n: int = 4096) -> RadialPotential:
    """Potential equal to F near t <= r^2, regmax(F, G) up to s2^2, and G beyond."""
    if not (r > 0 and eps > 0 and c > 0):
        raise ProfileError("need r, eps, c > 0")
    r2 = r * r
    g = c * c
    t_end = r2 + 0.9 * ((r + eps) ** 2 - r2)
    t_star = min(r2 / (1.0 - g), t_end) if g < 1.0 else t_end
    # Delta(t) = (F - G)(t) - (F - G)(r^2) is negative just right of r^2, minimal at t_star
    drop = -((1.0 - g) * (t_star - r2) - r2 * math.log(t_star / r2))
    if not drop > 0:
        raise ProfileError("no admissible d: F - G does not decrease on (r^2, (r+eps)^2)")
    if d is None:
        d = 0.5 * drop - (1.0 - g) * r2
    F, G = blowdown_functions(r, c, d)
    a = float(F(r2) - G(r2))
    if not 0 < a < drop:
        raise ProfileError("d gives no strict crossing in (r, r + eps)")
    roots = find_crossings(lambda s: float(F(s * s)), lambda s: float(G(s * s)), (r, math.sqrt(t_star)))
    s1 = roots[0].root
    s2 = math.sqrt(t_star)
    gap_end = float(G(t_star) - F(t_star))
    if not (r < s1 < s2 < r + eps and gap_end > 0):
        raise ProfileError("crossing pattern r < s1 < s2 < r + eps not met")
    dmax = 0.5 * min(a, gap_end)
    if delta is None:
        delta = 0.9 * dmax
    elif not 0 < delta < dmax:
        raise ProfileError(f"delta must lie in (0, {dmax:.12g})")
    margin = 0.5 * eps
    t = np.linspace(0.0, (r + eps + margin) ** 2, n)
    with np.errstate(divide="ignore"):
        Gt = np.where(t > 0, G(np.where(t > 0, t, 1.0)), -np.inf)
    f = np.where(t <= r2, F(t), np.where(t < t_star, regmax(F(t), Gt, delta), Gt))
    return RadialPotential("blowdown", t, f, r, eps, c, delta, s1, s2, d=d, gamma=g,
                           pieces={"F": F, "G": lambda tt: G(np.maximum(tt, 1e-300))})


# -- checks ------------------------------------------------------------------

def _derivatives(t: np.ndarray, f: np.ndarray):
    """Three-point nonuniform central differences at interior samples."""
    h1 = t[1:-1] - t[:-2]
    h2 = t[2:] - t[1:-1]
    fm, f0, fp = f[:-2], f[1:-1], f[2:]
    denom = h1 * h2 * (h1 + h2)
    d1 = (h1 * h1 * fp - h2 * h2 * fm + (h2 * h2 - h1 * h1) * f0) / denom
    d2 = 2.0 * (h1 * fp - (h1 + h2) * f0 + h2 * fm) / denom
    return t[1:-1], d1, d2


@dataclass(frozen=True)
class PositivityReport:
    min_fprime: float
    min_psh: float
    argmin_fprime: float
    argmin_psh: float
    floor: float
    passed: bool


def verify_positivity(p, floor: float = 1e-9) -> PositivityReport:
    """Check ``f' > floor`` and ``f' + t f'' > floor`` at interior samples.

    ``p`` is a RadialPotential or a pair ``(t, f)`` of arrays.
    """
    if isinstance(p, RadialPotential):
        t, f = p.t, p.f
    else:
        t, f = (np.asarray(x, dtype=float) for x in p)
    if len(t) < 5:
        raise ValueError("need at least 5 samples")
    if np.any(np.diff(t) <= 0):
        raise ValueError("grid must be strictly increasing")
    tt, d1, d2 = _derivatives(t, f)
    psh = d1 + tt * d2
    i1, i2 = int(np.argmin(d1)), int(np.argmin(psh))
    ok = bool(d1[i1] > floor and psh[i2] > floor)
    return PositivityReport(float(d1[i1]), float(psh[i2]), float(tt[i1]), float(tt[i2]), floor, ok)


def _sup(x) -> float:
    return float(np.max(np.abs(x))) if np.size(x) else math.inf


def matching_errors(p: RadialPotential) -> dict:
    """Sup-distance between the glued potential and the model pieces where they must agree.

    Besides the outer pieces, this checks that at each switch point the
    regularized maximum already coincides with the piece it replaces: on
    samples where ``|F - G| >= 2 delta`` next to the switch.  An empty window
    counts as an infinite error.
    """
    F, G = p.pieces["F"], p.pieces["G"]
    t, f = p.t, p.f
    r2 = p.r * p.r
    out = {}
    pos = t > 0
    tp = t[pos]
    Ft, Gt = F(tp), G(tp)
    rm = regmax(Ft, Gt, p.delta)
    if p.kind == "blowup":
        outer = t >= (p.r + p.eps) ** 2
        inner = t <= r2
        win = (Gt - Ft >= 2 * p.delta) & (tp > p.s1 * p.s1) & (tp < p.s2 * p.s2)
        out["outer_vs_F"] = _sup(f[outer] - F(t[outer]))
        out["inner_vs_G"] = _sup(f[inner] - G(t[inner]))
        out["switch_regmax_vs_G"] = _sup((rm - Gt)[win])
        out["switch_window_both_sides"] = 0.0 if (np.any(win & (tp < r2)) and np.any(win & (tp > r2))) else math.inf
    else:
        t2 = p.s2 * p.s2
        inner = t <= r2
        outer = t >= t2
        win_in = (Ft - Gt >= 2 * p.delta) & (tp < p.s1 * p.s1)
        win_out = (Gt - Ft >= 2 * p.delta) & (tp > p.s1 * p.s1) & (tp <= t2)
        out["inner_vs_F"] = _sup(f[inner] - F(t[inner]))
        out["outer_vs_G"] = _sup(f[outer] - G(t[outer]))
        out["switch_regmax_vs_F"] = _sup((rm - Ft)[win_in & (tp <= r2)])
        out["switch_regmax_vs_G"] = _sup((rm - Gt)[win_out])
        out["switch_window_both_sides"] = 0.0 if (np.any(win_in & (tp > r2)) and np.any(win_out)) else math.inf
    return out
