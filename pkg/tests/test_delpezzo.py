import json
import random
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from oracles import cone_by_brute_force, exceptional_classes_bruteforce
from packmat.delpezzo import (
    UnsupportedError,
    degree_range,
    enumerate_exceptional,
    general_position,
    general_position_failure,
    kahler_cone_contains,
    kahler_cone_contains_many,
    mp_inequalities,
    wall_patterns,
)
from packmat.divisor import DivisorClass, canonical_class, intersect

FIXTURE = Path(__file__).parent / "fixtures" / "exceptional_k8.json"

COUNTS = {0: 0, 1: 1, 2: 3, 3: 6, 4: 10, 5: 16, 6: 27, 7: 56, 8: 240}


@pytest.mark.parametrize("k", range(9))
def test_counts(k):
    assert len(enumerate_exceptional(k)) == COUNTS[k]


@pytest.mark.parametrize("k", range(1, 9))
def test_matches_bruteforce(k):
    ours = [(c.a, c.b) for c in enumerate_exceptional(k)]
    assert ours == list(exceptional_classes_bruteforce(k))


def test_k8_regression_fixture():
    frozen = json.loads(FIXTURE.read_text())
    assert enumerate_exceptional(8).to_json() == frozen


def test_classes_are_exceptional():
    K = canonical_class(8)
    for c in enumerate_exceptional(8):
        assert intersect(c, c) == -1
        assert intersect(c, K) == -1


def test_degree_range_k8():
    assert list(degree_range(8)) == list(range(-1, 8))
    assert enumerate_exceptional(8).max_degree == 6


def test_k9_unsupported():
    with pytest.raises(UnsupportedError):
        enumerate_exceptional(9)


def test_wall_patterns_k8_are_the_six_families():
    assert [str(c) for c in wall_patterns(8)] == [
        "(1;1,1,0,0,0,0,0,0)",
        "(2;1,1,1,1,1,0,0,0)",
        "(3;2,1,1,1,1,1,1,0)",
        "(4;2,2,2,1,1,1,1,1)",
        "(5;2,2,2,2,2,2,1,1)",
        "(6;3,2,2,2,2,2,2,2)",
    ]


def _random_sorted(rng, k, den):
    return tuple(sorted((Fraction(rng.randint(1, den), den) for _ in range(k)), reverse=True))


@pytest.mark.parametrize("k", range(1, 9))
def test_cone_against_bruteforce_oracle(k):
    rng = random.Random(k)
    for _ in range(300):
        u = _random_sorted(rng, k, rng.choice([4, 6, 10, 12]))
        assert kahler_cone_contains(u).feasible == cone_by_brute_force(u), u


def test_witness_is_a_class_or_label():
    v = kahler_cone_contains((Fraction(3, 4), Fraction(1, 2)))
    assert not v.feasible and v.witness == DivisorClass(1, (1, 1))
    assert v.margin == Fraction(-1, 4)
    assert kahler_cone_contains((Fraction(1),)).witness == "volume"


def test_unsorted_rejected():
    with pytest.raises(ValueError):
        kahler_cone_contains((Fraction(1, 4), Fraction(1, 2)))


def test_mp_minimal_failing():
    v = mp_inequalities((Fraction(1, 2),) * 8)
    assert v.witness == "(c6)" and v.margin == Fraction(-5, 2)
    assert set(v.failures) == {"(v)", "(c1)", "(c2)", "(c3)", "(c4)", "(c5)", "(c6)"}
    ok = mp_inequalities((Fraction(1, 3),) * 8)
    assert ok.feasible and ok.margins["(c6)"] == Fraction(1, 3)


weights = st.integers(1, 8).flatmap(
    lambda k: st.lists(st.fractions(Fraction(1, 30), Fraction(1), max_denominator=30), min_size=k, max_size=k)
)


@settings(max_examples=200)
@given(weights)
def test_cone_monotone(u):
    u = sorted(u, reverse=True)
    if kahler_cone_contains(u).feasible:
        smaller = sorted((x * Fraction(9, 10) for x in u), reverse=True)
        assert kahler_cone_contains(smaller).feasible


@settings(max_examples=200)
@given(weights)
def test_batch_matches_scalar(u):
    u = sorted(u, reverse=True)
    v = [x * Fraction(2, 3) for x in u]
    assert kahler_cone_contains_many([u, v]) == [kahler_cone_contains(u).feasible, kahler_cone_contains(v).feasible]


def test_batch_large_denominators_fallback():
    u = [Fraction(1, 2**31 + 11), Fraction(1, 2**31 + 12)]
    assert kahler_cone_contains_many([u]) == [True]


def test_general_position():
    assert general_position([(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)])
    assert "collinear" in general_position_failure([(1, 0, 0), (0, 1, 0), (1, 1, 0)])
    # six points on the conic xz = y^2
    conic = [(1, t, t * t) for t in range(6)]
    assert "conic" in general_position_failure(conic)
    with pytest.raises(ValueError):
        general_position([(1, 0, 0), (2, 0, 0)])
    with pytest.raises(ValueError):
        general_position([(0, 0, 0)])


def test_general_position_eight_points():
    good = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1), (1, 2, 3), (2, 3, 7), (3, -1, 4), (5, 2, -3)]
    assert general_position(good), general_position_failure(good)
    # node (0:0:1) plus seven points of the nodal cubic y^2 z = x^2 (x + z),
    # parametrised by x = t^2 - 1, y = t (t^2 - 1)
    pts = [(0, 0, 1)] + [(t * t - 1, t * (t * t - 1), 1) for t in range(2, 9)]
    assert general_position_failure(pts) == "a cubic through all points is singular at point 0"
