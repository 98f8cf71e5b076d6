import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import equal_ball_nu
from packmat.delpezzo import mp_inequalities
from packmat.engine import (
    CP2,
    Ball4,
    CPn,
    HirzebruchEven,
    HirzebruchOdd,
    PackingProblem,
    ProductProj,
    Status,
    TorusOrK3,
    UnsupportedError,
    ball_volume,
    feasible,
    packing_number,
    packing_number_by_enumeration,
    packing_number_by_inequalities,
    reduce_hirzebruch_even,
    reduce_hirzebruch_odd,
    seshadri_t4_gap,
    target_from_json,
    target_to_json,
    unobstructed_count,
    volume,
)
from packmat.exact import QuadScalar

NU = [Fraction(1), Fraction(1, 2), Fraction(3, 4), Fraction(1), Fraction(4, 5), Fraction(24, 25),
      Fraction(63, 64), Fraction(288, 289)]


def pack(target, w):
    return feasible(PackingProblem(target, tuple(Fraction(x) for x in w)))


@pytest.mark.parametrize("k", range(1, 9))
def test_nu_table(k):
    w = [1] * k
    assert packing_number(CP2(), w) == NU[k - 1]
    assert packing_number(CP2(), w, "inequalities") == NU[k - 1]
    assert equal_ball_nu(k) == NU[k - 1]


weight_lists = st.integers(1, 8).flatmap(
    lambda k: st.lists(st.fractions(Fraction(1, 20), Fraction(1), max_denominator=20), min_size=k, max_size=k)
)


@settings(max_examples=150)
@given(weight_lists)
def test_nu_two_paths_agree(u):
    assert packing_number_by_enumeration(u) == packing_number_by_inequalities(u)


@settings(max_examples=60, deadline=None)
@given(weight_lists, st.fractions(Fraction(1, 1000), Fraction(1, 10), max_denominator=1000))
def test_nu_is_the_scaling_threshold(u, eps):
    nu = packing_number(CP2(), u)
    s2 = sum(x * x for x in u)
    # sample t with t^2 s2 = nu * (1 -/+ eps), rounded to rationals on the correct side
    for factor, expect in ((1 - eps, True), (1 + eps, False)):
        target = nu * factor / s2
        t = Fraction(int(target**0.5 * 10**6), 10**6)
        if expect:
            while t * t * s2 >= nu:
                t -= Fraction(1, 10**6)
        else:
            while t * t * s2 <= nu:
                t += Fraction(1, 10**6)
        assert pack(CP2(), [t * x for x in u]).feasible is expect


@settings(max_examples=150)
@given(weight_lists)
def test_permutation_invariance_and_monotonicity(u):
    v = pack(CP2(), u)
    assert pack(CP2(), list(reversed(u))).status == v.status
    if v.feasible:
        assert pack(CP2(), [x * Fraction(4, 5) for x in u]).feasible


def test_spot_witnesses():
    v = pack(CP2(), ["3/4", "1/2"])
    assert v.status is Status.INFEASIBLE and v.witness == "(c1)" and v.margin == Fraction(-1, 4)
    assert pack(CP2(), ["1/2"] * 5).witness == "(c2)"
    v = pack(CP2(), ["1/2"] * 8)
    assert v.witness == "(c6)" and v.margin == Fraction(-5, 2)
    assert pack(Ball4(), ["1/2", "1/2"]).witness == "(c1)"


def test_volume_only_regimes():
    assert pack(CP2(), ["33/100"] * 9).status is Status.FEASIBLE
    assert pack(CP2(), ["1/3"] * 9).witness == "(v)"  # 9/9 = 1, strict
    assert pack(CP2(), ["1/3"] * 10).status is Status.OUTSIDE
    assert pack(CP2(), ["1/3"] * 8 + ["1/4"]).status is Status.OUTSIDE
    assert pack(CPn(3), ["1/2"] * 8).status is Status.INFEASIBLE
    assert pack(CPn(3), ["49/100"] * 8).status is Status.FEASIBLE
    assert pack(CPn(3), ["1/3"] * 7).status is Status.OUTSIDE
    assert pack(CPn(3), ["1/3"] * 27).feasible is False  # 27/27 = 1, strict


def test_product_counts():
    assert unobstructed_count((1, 1), (1, 1)) == 2
    assert unobstructed_count((1, 1), (2, 2)) == 8
    assert unobstructed_count((1, 2), (1, 1)) == 3
    P = ProductProj((1, 1), (2, 2))
    assert volume(P) == 8
    assert pack(P, ["999/1000"] * 8).feasible
    assert not pack(P, [1] * 8).feasible
    assert pack(P, ["1/2"] * 7).status is Status.OUTSIDE
    # sizes (2, 2) have primitive multipliers (1, 1): k = 2, 8, 18, ...
    assert pack(P, ["1/2"] * 2).feasible
    assert pack(P, ["1/2"] * 18).feasible


def test_hirzebruch_odd():
    v = pack(HirzebruchOdd(Fraction(1, 2)), ["1/3"])
    assert v.feasible and v.reduced == (Fraction(1, 2), Fraction(1, 3))
    v = pack(HirzebruchOdd(Fraction(1, 2)), ["1/2"])
    assert v.witness == "(c1)"
    assert volume(HirzebruchOdd(Fraction(1, 2))) == Fraction(3, 4)
    assert pack(HirzebruchOdd(Fraction(1, 2)), ["1/10"] * 8).status is Status.OUTSIDE


@pytest.mark.parametrize("n", range(1, 10))
def test_even_mu1_single_ball(n):
    u = Fraction(n, 10)
    assert pack(HirzebruchEven(Fraction(1)), [u]).feasible
    red = reduce_hirzebruch_even(1, [u])
    assert red == ((1 - u) / (2 - u),) * 2


def test_even_two_equal_balls_matches_volume():
    # 2 = 2 * 1^2 equal balls on CP^1 x CP^1: only the volume obstructs
    for n in range(1, 20):
        u = Fraction(n, 20)
        assert pack(HirzebruchEven(Fraction(1)), [u, u]).feasible
    assert pack(HirzebruchEven(Fraction(1)), ["49/100"] * 8).status is Status.FEASIBLE
    assert not pack(HirzebruchEven(Fraction(1)), ["1/2"] * 8).feasible


@settings(max_examples=150, deadline=None)
@given(
    st.fractions(Fraction(1), Fraction(3), max_denominator=4),
    st.lists(st.fractions(Fraction(1, 20), Fraction(19, 20), max_denominator=20), min_size=1, max_size=7),
)
def test_even_reduction_independent_of_distinguished_ball(mu, w):
    verdicts = set()
    for i in range(len(w)):
        order = w[:i] + w[i + 1:] + [w[i]]
        verdicts.add(mp_inequalities(reduce_hirzebruch_even(mu, order)).feasible)
    assert len(verdicts) == 1


def test_reduction_errors():
    with pytest.raises(ValueError):
        reduce_hirzebruch_odd(1, ["1/2"])
    with pytest.raises(ValueError):
        reduce_hirzebruch_even(Fraction(1, 2), ["1/2"])
    with pytest.raises(ValueError):
        reduce_hirzebruch_even(2, ["1/2", 1])
    with pytest.raises(UnsupportedError):
        reduce_hirzebruch_odd(Fraction(1, 2), ["1/10"] * 8)


def test_torus_and_k3():
    irr = TorusOrK3(4, True, Fraction(1))
    assert pack(irr, ["1/2", "1/2"]).feasible
    assert not pack(irr, ["1/2", "1/2", "1/2", "1/2"]).feasible  # 4/4 is not below 1
    assert pack(TorusOrK3(4, False), ["1/10"]).status is Status.OUTSIDE
    raw = TorusOrK3(4, True, QuadScalar(3, 1, 2), units="raw")
    # pi^2 * 1/4 ~ 2.47 < 3 + sqrt 2 ~ 4.41 < pi^2 / 2 ~ 4.93
    assert pack(raw, ["1/2"]).feasible
    assert not pack(raw, [1, "1/2"]).feasible
    assert not pack(raw, ["7/10"]).feasible
    assert packing_number(irr, ["1/3"] * 5) == 1
    assert pack(TorusOrK3(4, True, kind="k3"), ["1/2"]).feasible


def test_seshadri_gap():
    assert seshadri_t4_gap() == (Fraction(16, 9), Fraction(2))


def test_packing_number_unsupported():
    with pytest.raises(UnsupportedError):
        packing_number(CP2(), [1] * 10)
    with pytest.raises(UnsupportedError):
        packing_number(HirzebruchOdd(Fraction(1, 2)), [1])
    assert packing_number(CP2(), [1] * 16) == 1
    assert packing_number(CPn(3), [1] * 8) == 1


@pytest.mark.parametrize(
    "target",
    [CP2(), Ball4(), CPn(3), ProductProj((1, 2), (Fraction(1), Fraction(3, 2))), HirzebruchOdd(Fraction(1, 3)),
     HirzebruchEven(Fraction(5, 2)), TorusOrK3(6, True, QuadScalar(1, 1, 3), "raw"), TorusOrK3(4, False, kind="k3")],
)
def test_target_json_roundtrip(target):
    assert target_from_json(target_to_json(target)) == target
    prob = PackingProblem(target, (Fraction(1, 3), Fraction(1, 2)))
    assert PackingProblem.from_json(prob.to_json()) == prob


def test_problem_sorts_and_validates():
    p = PackingProblem(CP2(), (Fraction(1, 3), Fraction(1, 2)))
    assert p.weights == (Fraction(1, 2), Fraction(1, 3))
    with pytest.raises(ValueError):
        PackingProblem(CP2(), (Fraction(0),))
    assert ball_volume(p.weights, 2) == Fraction(13, 36)


def test_random_single_digit_cases_against_cone():
    from packmat.delpezzo import kahler_cone_contains

    rng = random.Random(3)
    for _ in range(500):
        k = rng.randint(1, 8)
        w = sorted((Fraction(rng.randint(1, 9), 10) for _ in range(k)), reverse=True)
        assert pack(CP2(), w).feasible == kahler_cone_contains(w).feasible
