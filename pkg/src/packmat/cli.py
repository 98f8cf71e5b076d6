"""Command-line front end.

Exit codes: 0 feasible/success, 1 infeasible or predicate false (witness
printed), 2 outside coverage, 64 usage error.  With ``--json`` every number
in the output is a string so values survive exactly.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import BACKEND
from .delpezzo import UnsupportedError, enumerate_exceptional, general_position_failure, wall_patterns
from .divisor import DivisorClass
from .engine import (
    CP2,
    Ball4,
    CPn,
    HirzebruchEven,
    HirzebruchOdd,
    PackingProblem,
    ProductProj,
    Status,
    TorusOrK3,
    feasible,
    mp_inequalities,
    packing_number,
    reduce_hirzebruch_even,
    reduce_hirzebruch_odd,
    seshadri_t4_gap,
)
from .exact import QuadScalar, fraction_to_str, parse_fraction, parse_quad
from .lattice import (
    AlternatingForm,
    GramLattice,
    chamber_signature,
    e8_lattice,
    hyperbolic_plane,
    in_S,
    is_real_multiple_of_rational,
    k3_lattice,
    sample_S,
    wedge_power,
)

EXIT_OK, EXIT_INFEASIBLE, EXIT_OUTSIDE, EXIT_USAGE = 0, 1, 2, 64
_STATUS_EXIT = {Status.FEASIBLE: EXIT_OK, Status.INFEASIBLE: EXIT_INFEASIBLE, Status.OUTSIDE: EXIT_OUTSIDE}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- parsing helpers ---------------------------------------------------------

def _number(text: str, radicand: int | None):
    text = text.strip()
    if radicand is not None and ("√" in text or "sqrt" in text):
        return parse_quad(text, radicand)
    return parse_fraction(text)


def _numbers(text: str, radicand: int | None = None) -> list:
    if text is None or not text.strip():
        return []
    return [_number(x, radicand) for x in text.split(",")]


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _stringify(obj):
    """Every number becomes a string; bools and None stay JSON literals."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return fraction_to_str(obj)
    if isinstance(obj, QuadScalar):
        return str(obj)
    if isinstance(obj, (int, float)):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _stringify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_stringify(v) for v in obj]
    return str(obj)


def _emit(args, payload: dict, out) -> None:
    if args.json:
        json.dump(_stringify(payload), out, indent=2, ensure_ascii=False)
        out.write("\n")
        return
    rows = [(k, v) for k, v in payload.items() if v is not None and v != ""]
    width = max((len(k) for k, _ in rows), default=0)
    for k, v in rows:
        if isinstance(v, (list, tuple)):
            v = " ".join(_fmt(x) for x in v)
        else:
            v = _fmt(v)
        out.write(f"{k.ljust(width)}  {v}\n")


def _fmt(v) -> str:
    if isinstance(v, Fraction):
        return fraction_to_str(v) if v.denominator != 1 else str(v.numerator)
    if isinstance(v, dict):
        return json.dumps(_stringify(v), ensure_ascii=False)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


def _witness_text(w):
    return str(w) if isinstance(w, DivisorClass) else w


# -- problem construction ----------------------------------------------------

def _add_target_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--target", choices=["cp2", "ball4", "cpn", "product", "hirzebruch-odd", "hirzebruch-even",
                                        "torus", "k3"], default="cp2")
    p.add_argument("--n", type=int, help="complex dimension for --target cpn")
    p.add_argument("--dims", help="factor dimensions for --target product, e.g. 1,1")
    p.add_argument("--sizes", help="factor sizes for --target product, e.g. 1,1")
    p.add_argument("--lambda", dest="lam", help="lambda/pi for --target hirzebruch-odd")
    p.add_argument("--mu", help="mu for --target hirzebruch-even")
    p.add_argument("--dim", type=int, default=4, help="real dimension of the torus (K3 is 4)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--irrational", dest="irrational", action="store_true", default=True)
    g.add_argument("--rational", dest="irrational", action="store_false")
    p.add_argument("--volume", default="1", help="target volume (a+b√p with --radicand)")
    p.add_argument("--units", choices=["pi", "raw"], default="pi")


def _add_weight_args(p: argparse.ArgumentParser, weight_default=None) -> None:
    p.add_argument("--weights", help="comma-separated squared radii u_i (or radii with --radii)")
    p.add_argument("--equal-balls", type=int, help="number of equal balls")
    p.add_argument("--weight", default=weight_default, help="common weight for --equal-balls")
    p.add_argument("--radii", action="store_true", help="interpret weights as radii and square them")
    p.add_argument("--radicand", type=int, help="radicand p for entries written a+b√p")
    p.add_argument("--input", help="JSON file with {'target': ..., 'weights': [...]}; '-' for stdin")


def _target(args):
    t = args.target
    if t == "cp2":
        return CP2()
    if t == "ball4":
        return Ball4()
    if t == "cpn":
        if args.n is None:
            raise UsageError("--target cpn needs --n")
        return CPn(args.n)
    if t == "product":
        if not args.dims:
            raise UsageError("--target product needs --dims")
        dims = _ints(args.dims)
        sizes = _numbers(args.sizes) if args.sizes else [Fraction(1)] * len(dims)
        return ProductProj(tuple(dims), tuple(sizes))
    if t == "hirzebruch-odd":
        if args.lam is None:
            raise UsageError("--target hirzebruch-odd needs --lambda")
        return HirzebruchOdd(parse_fraction(args.lam))
    if t == "hirzebruch-even":
        if args.mu is None:
            raise UsageError("--target hirzebruch-even needs --mu")
        return HirzebruchEven(parse_fraction(args.mu))
    dim = 4 if t == "k3" else args.dim
    vol = _number(args.volume, args.radicand)
    return TorusOrK3(dim, args.irrational, vol, args.units, "k3" if t == "k3" else "torus")


def _weights(args) -> list:
    if args.weights is not None and args.equal_balls is not None:
        raise UsageError("give either --weights or --equal-balls")
    if args.equal_balls is not None:
        if args.equal_balls < 1:
            raise UsageError("--equal-balls must be positive")
        if args.weight is None:
            raise UsageError("--equal-balls needs --weight")
        w = [_number(args.weight, args.radicand)] * args.equal_balls
    elif args.weights is not None:
        w = _numbers(args.weights, args.radicand)
    else:
        raise UsageError("no weights given (use --weights, --equal-balls or --input)")
    if args.radii:
        w = [x * x for x in w]
    return w


def _load_input(path: str) -> dict:
    fh = sys.stdin if path == "-" else open(path)
    try:
        obj = json.load(fh)
    finally:
        if fh is not sys.stdin:
            fh.close()
    if "problem" in obj:
        obj = obj["problem"]
    return obj


def _problem(args) -> PackingProblem:
    if args.input:
        return PackingProblem.from_json(_load_input(args.input))
    return PackingProblem(_target(args), tuple(_weights(args)))


# -- subcommands -------------------------------------------------------------

def cmd_pack(args, out) -> int:
    prob = _problem(args)
    v = feasible(prob)
    payload = {"problem": prob.to_json(), **v.to_json()}
    payload["witness"] = _witness_text(v.witness)
    if not args.json:
        payload = {"target": prob.to_json()["target"]["kind"], "weights": list(prob.weights), "status": v.status.value,
                   "witness": payload["witness"], "margin": v.margin, "reduced": v.reduced, "note": v.note}
    _emit(args, payload, out)
    return _STATUS_EXIT[v.status]


def cmd_nu(args, out) -> int:
    prob = _problem(args)
    try:
        nu = packing_number(prob.target, prob.weights, args.method)
    except UnsupportedError as e:
        _emit(args, {"problem": prob.to_json(), "status": Status.OUTSIDE.value, "note": str(e)}, out)
        return EXIT_OUTSIDE
    payload = {"problem": prob.to_json(), "status": "success", "nu": nu, "method": args.method}
    if args.json:
        _emit(args, payload, out)
    else:
        out.write(f"{fraction_to_str(nu) if nu.denominator != 1 else nu.numerator}\n")
    return EXIT_OK


def cmd_enumerate(args, out) -> int:
    classes = wall_patterns(args.k) if args.patterns else enumerate_exceptional(args.k).classes
    if args.count_only:
        if args.json:
            _emit(args, {"k": args.k, "count": len(classes)}, out)
        else:
            out.write(f"{len(classes)}\n")
        return EXIT_OK
    if args.json:
        _emit(args, {"k": args.k, "count": len(classes), "classes": [c.to_json() for c in classes]}, out)
    else:
        for c in classes:
            out.write(f"{c}\n")
    return EXIT_OK


def _reduction_exit(args, red, out, extra: dict) -> int:
    cv = mp_inequalities(red)
    status = Status.FEASIBLE if cv.feasible else Status.INFEASIBLE
    payload = {**extra, "reduced": list(red), "status": status.value, "witness": cv.witness,
               "margin": cv.margin, "failures": list(cv.failures) or None}
    _emit(args, payload, out)
    return _STATUS_EXIT[status]


def cmd_reduce_odd(args, out) -> int:
    lam = parse_fraction(args.lam)
    w = _numbers(args.weights)
    if args.radii:
        w = [x * x for x in w]
    return _reduction_exit(args, reduce_hirzebruch_odd(lam, w), out, {"lambda": lam, "weights": w})


def cmd_reduce_even(args, out) -> int:
    mu = parse_fraction(args.mu)
    w = _numbers(args.weights)
    if args.radii:
        w = [x * x for x in w]
    return _reduction_exit(args, reduce_hirzebruch_even(mu, w), out, {"mu": mu, "weights": w})


def _points(text: str) -> list:
    pts = []
    for chunk in text.split(";"):
        if chunk.strip():
            pts.append([parse_fraction(x) for x in chunk.split(":")])
    return pts


def cmd_general_position(args, out) -> int:
    pts = _points(args.points)
    why = general_position_failure(pts)
    _emit(args, {"points": [":".join(fraction_to_str(x) for x in p) for p in pts],
                 "general_position": why is None, "witness": why}, out)
    return EXIT_OK if why is None else EXIT_INFEASIBLE


def _gram(args) -> GramLattice:
    if args.gram:
        with open(args.gram) as fh:
            return GramLattice(json.load(fh))
    return {"k3": k3_lattice, "e8": e8_lattice, "e8-": lambda: e8_lattice(-1), "u": hyperbolic_plane}[args.which]()


def cmd_lattice(args, out) -> int:
    L = _gram(args)
    payload = {"rank": L.rank, "signature": list(L.signature())}
    if args.alpha:
        alpha = _numbers(args.alpha, args.radicand)
        walls = [_ints(w) for w in args.walls.split(";")] if args.walls else []
        payload["chamber"] = list(chamber_signature(L, alpha, walls))
    _emit(args, payload, out)
    return EXIT_OK


def _form(text: str, dim: int, radicand: int | None) -> AlternatingForm:
    coeffs = {}
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        idx, _, val = chunk.partition(":")
        coeffs[tuple(int(i) for i in idx.split(","))] = _number(val, radicand)
    return AlternatingForm(dim, 2, coeffs)


def cmd_irrational(args, out) -> int:
    if (args.vector is None) == (args.form is None):
        raise UsageError("give exactly one of --vector or --form")
    if args.vector is not None:
        v = _numbers(args.vector, args.radicand)
        rational = is_real_multiple_of_rational(v)
        _emit(args, {"vector": v, "rational_multiple": rational}, out)
        return EXIT_OK
    if args.dim is None:
        raise UsageError("--form needs --dim")
    omega = _form(args.form, args.dim, args.radicand)
    eta = wedge_power(omega, args.power)
    payload = {
        "power": args.power,
        "coefficients": [{"indices": list(i), "coeff": c} for i, c in sorted(eta.coeffs.items())],
        "rational_multiple": eta.is_rational_multiple(),
    }
    _emit(args, payload, out)
    return EXIT_OK


def _matrix(text: str, radicand: int | None) -> list[list]:
    return [_numbers(row, radicand) for row in text.split(";") if row.strip()]


def cmd_in_s(args, out) -> int:
    if (args.matrix is None) == (args.sample is None):
        raise UsageError("give exactly one of --matrix or --sample")
    if args.sample is not None:
        s = sample_S(args.sample, args.seed, args.radicand or 2)
        payload = {"Z": [list(r) for r in s.Z], "in_S": in_S(s.Z), "pivot": list(s.pivot), "witness": list(s.witness)}
        _emit(args, payload, out)
        return EXIT_OK if payload["in_S"] else EXIT_INFEASIBLE
    Z = _matrix(args.matrix, args.radicand)
    ok = in_S(Z)
    _emit(args, {"in_S": ok}, out)
    return EXIT_OK if ok else EXIT_INFEASIBLE


def cmd_profile(args, out) -> int:
    from .profiles import ProfileError, blowdown_profile, blowup_profile

    try:
        if args.kind == "blowup":
            p = blowup_profile(args.r, args.eps, args.c, sigma=args.sigma, delta=args.delta, n=args.samples)
        else:
            p = blowdown_profile(args.r, args.eps, args.c, d=args.d, delta=args.delta, n=args.samples)
    except ProfileError as e:
        raise UsageError(str(e)) from e
    rep = p.report(args.floor)
    if args.csv:
        p.to_csv(args.csv)
    if args.svg:
        p.to_svg(args.svg)
    if args.report:
        with open(args.report, "w") as fh:
            json.dump(_stringify(rep), fh, indent=2)
    passed = rep["positivity"]["passed"]
    if args.json:
        _emit(args, rep, out)
    else:
        pos = rep["positivity"]
        _emit(args, {"kind": p.kind, "r": p.r, "eps": p.eps, "c": p.c, "delta": p.delta, "s1": p.s1, "s2": p.s2,
                     "min_fprime": pos["min_fprime"], "min_psh": pos["min_psh"],
                     "max_matching_error": max(rep["matching"].values()), "passed": passed}, out)
    return EXIT_OK if passed else EXIT_INFEASIBLE


def cmd_seshadri(args, out) -> int:
    lo, hi = seshadri_t4_gap()
    if args.json:
        _emit(args, {"gap": [lo, hi]}, out)
    else:
        out.write(f"{fraction_to_str(lo)} {hi.numerator}\n")
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="packmat", description="Ball-packing feasibility for CP^2, its blow-ups and related targets.")
    ap.add_argument("--version", action="version", version=f"%(prog)s (backend: {BACKEND})")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, **kw):
        p = sub.add_parser(name, **kw)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(func=func)
        return p

    p = add("pack", cmd_pack, help="decide whether balls embed")
    _add_target_args(p)
    _add_weight_args(p)

    p = add("nu", cmd_nu, help="packing number")
    _add_target_args(p)
    _add_weight_args(p, weight_default="1")
    p.add_argument("--method", choices=["enumeration", "inequalities"], default="enumeration")

    p = add("enumerate", cmd_enumerate, help="exceptional classes of the k-point blow-up")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--count-only", action="store_true")
    p.add_argument("--patterns", action="store_true", help="distinct sorted patterns with a > 0 only")

    p = add("reduce-odd", cmd_reduce_odd, help="CP^2 # -CP^2 problem to a CP^2 problem")
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--radii", action="store_true")

    p = add("reduce-even", cmd_reduce_even, help="CP^1 x CP^1 problem to a CP^2 problem (last weight distinguished)")
    p.add_argument("--mu", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--radii", action="store_true")

    p = add("general-position", cmd_general_position, help="check points of CP^2, e.g. '1:0:0;0:1:0;0:0:1'")
    p.add_argument("--points", required=True)

    p = add("lattice", cmd_lattice, help="signature and chamber signs of a Gram lattice")
    p.add_argument("--which", choices=["k3", "e8", "e8-", "u"], default="k3")
    p.add_argument("--gram", help="JSON file with an integer Gram matrix")
    p.add_argument("--alpha", help="class with positive square, comma-separated")
    p.add_argument("--walls", help="(-2)-classes separated by ';'")
    p.add_argument("--radicand", type=int)

    p = add("irrational", cmd_irrational, help="is a vector or a wedge power a real multiple of a rational one")
    p.add_argument("--vector")
    p.add_argument("--form", help="2-form as 'i,j:coef;...' (0-based indices)")
    p.add_argument("--dim", type=int)
    p.add_argument("--power", type=int, default=1)
    p.add_argument("--radicand", type=int)

    p = add("in-s", cmd_in_s, help="membership in S or a deterministic sample of it")
    p.add_argument("--matrix", help="rows separated by ';', entries by ','")
    p.add_argument("--sample", type=int, metavar="N", help="sample a 2N x 2N element")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--radicand", type=int)

    p = add("profile", cmd_profile, help="glued radial potential and its positivity check")
    p.add_argument("--kind", choices=["blowup", "blowdown"], required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--c", type=float, required=True, help="gamma for blowup, c for blowdown")
    p.add_argument("--sigma", type=float)
    p.add_argument("--d", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--samples", type=int, default=4096)
    p.add_argument("--floor", type=float, default=1e-9)
    p.add_argument("--csv")
    p.add_argument("--svg", help="write a plot (needs matplotlib)")
    p.add_argument("--report", help="write the JSON report")

    add("seshadri", cmd_seshadri, help="Kähler-type gap of ball volumes on standard T^4")
    return ap


def run(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        sys.stderr.write(f"{e}\n")
        return EXIT_USAGE
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)
    try:
        return args.func(args, out)
    except UsageError as e:
        sys.stderr.write(f"{e}\n")
        return EXIT_USAGE
    except UnsupportedError as e:
        sys.stderr.write(f"outside coverage: {e}\n")
        return EXIT_OUTSIDE
    except (ValueError, ZeroDivisionError, KeyError, OSError) as e:
        sys.stderr.write(f"packmat: {e}\n")
        return EXIT_USAGE


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
