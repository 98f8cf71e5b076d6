import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import pfaffian_recursive, wedge_power_coefficients
from packmat.exact import QuadScalar, det
from packmat.lattice import (
    AlternatingForm,
    DegenerateFormError,
    GramLattice,
    NotPositiveError,
    OnWallError,
    chamber_signature,
    direct_sum,
    e8_lattice,
    hyperbolic_plane,
    in_S,
    is_minus2,
    is_real_multiple_of_rational,
    k3_lattice,
    pair,
    pfaffian_bruteforce,
    positive_plane,
    sample_S,
    signature,
    standard_symplectic_matrix,
    wedge,
    wedge_power,
)

R2 = QuadScalar.sqrt(2)


def test_irrational_vectors():
    assert not is_real_multiple_of_rational([1, R2])
    assert is_real_multiple_of_rational([2, 4, 6])
    assert is_real_multiple_of_rational([R2, 2 * R2, 0])
    assert is_real_multiple_of_rational([1 + R2, 3 + 3 * R2])
    with pytest.raises(ValueError):
        is_real_multiple_of_rational([0, 0])


def antisym(n, rng, quad=False):
    A = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            x = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
            if quad:
                x = QuadScalar(x, Fraction(rng.randint(-2, 2)), 2)
            A[i][j], A[j][i] = x, -x
    return A


@pytest.mark.parametrize("n", [2, 4, 6])
def test_pfaffian_matches_recursive_and_det(n):
    rng = random.Random(n)
    for _ in range(10):
        A = antisym(n, rng)
        pf = pfaffian_bruteforce(A)
        assert pf == pfaffian_recursive(A)
        assert pf * pf == det(A)


@pytest.mark.parametrize("n,l", [(4, 2), (6, 2), (6, 3), (8, 2)])
def test_wedge_power_matches_pfaffian_formula(n, l):
    rng = random.Random(10 * n + l)
    A = antisym(n, rng, quad=True)
    eta = wedge_power(AlternatingForm.from_matrix(A), l)
    assert eta.coeffs == wedge_power_coefficients(A, l)


def test_wedge_power_example_r6():
    omega = AlternatingForm(6, 2, {(0, 1): 1, (2, 3): R2, (4, 5): 1})
    eta = wedge_power(omega, 2)
    assert eta.coeffs == {(0, 1, 2, 3): 2 * R2, (0, 1, 4, 5): 2, (2, 3, 4, 5): 2 * R2}
    assert not eta.is_rational_multiple()
    assert not omega.is_rational_multiple()
    top = wedge_power(omega, 3)
    assert top.coeffs == {(0, 1, 2, 3, 4, 5): 6 * R2}


def test_wedge_antisymmetry_and_json():
    a = AlternatingForm(4, 1, {(0,): 1})
    b = AlternatingForm(4, 1, {(1,): 1})
    assert wedge(a, b).coeffs == {(0, 1): 1}
    assert wedge(b, a).coeffs == {(0, 1): -1}
    assert wedge(a, a).coeffs == {}
    f = AlternatingForm(4, 2, {(1, 0): R2, (2, 3): Fraction(1, 2)})
    assert f.coefficient((0, 1)) == -R2
    assert AlternatingForm.from_json(4, 2, f.to_json()) == f
    with pytest.raises(ValueError):
        wedge_power(f, 3)


def test_in_s_rejections():
    for n in (1, 2, 3):
        I = [[Fraction(int(i == j)) for j in range(2 * n)] for i in range(2 * n)]
        assert not in_S(I)
        assert not in_S([[R2 * x for x in row] for row in I])
    J = standard_symplectic_matrix(2)
    assert not in_S(J)
    with pytest.raises(ValueError):
        in_S([[1, 0, 0], [0, 1, 0], [0, 0, 1]])


@pytest.mark.parametrize("n", [2, 3])
def test_sample_s(n):
    for seed in range(20):
        s = sample_S(n, seed)
        assert in_S(s.Z)
        assert s == sample_S(n, seed)
    with pytest.raises(ValueError):
        sample_S(1)


def test_pulled_back_form_is_antisymmetric_for_samples():
    from packmat.lattice import _pulled_back

    s = sample_S(2, 5)
    M = _pulled_back(s.Z)
    for i in range(4):
        for j in range(4):
            assert M[i][j] == -M[j][i]
    a, b = s.pivot, s.witness
    ratio = M[b[0]][b[1]] / M[a[0]][a[1]]
    assert not ratio.is_rational()


def test_e8_and_k3():
    E8 = e8_lattice()
    assert det(E8.gram) == 1
    assert all(E8.gram[i][i] == 2 for i in range(8))
    assert E8.signature() == (8, 0)
    assert e8_lattice(-1).signature() == (0, 8)
    assert hyperbolic_plane().signature() == (1, 1)
    K3 = k3_lattice()
    assert K3.rank == 22
    assert K3.signature() == (3, 19)
    assert abs(det(K3.gram)) == 1
    assert all(K3.gram[i][i] % 2 == 0 for i in range(22))


int_sym = st.integers(1, 7).flatmap(
    lambda n: st.lists(st.integers(-5, 5), min_size=n * (n + 1) // 2, max_size=n * (n + 1) // 2).map(
        lambda xs, n=n: _sym_from_upper(n, xs)
    )
)


def _sym_from_upper(n, xs):
    M = [[0] * n for _ in range(n)]
    it = iter(xs)
    for i in range(n):
        for j in range(i, n):
            M[i][j] = M[j][i] = next(it)
    return M


@settings(max_examples=300)
@given(int_sym)
def test_signature_matches_eigenvalues(M):
    ev = np.linalg.eigvalsh(np.array(M, dtype=float))
    pos, neg = int((ev > 1e-9).sum()), int((ev < -1e-9).sum())
    if pos + neg < len(M):
        with pytest.raises(DegenerateFormError) as exc:
            signature(M)
        assert (exc.value.pos, exc.value.neg) == (pos, neg)
    else:
        assert signature(M) == (pos, neg)


def test_degenerate_and_asymmetric():
    with pytest.raises(DegenerateFormError):
        GramLattice([[0, 0], [0, 1]]).signature()
    with pytest.raises(ValueError):
        GramLattice([[0, 1], [2, 0]])
    assert direct_sum(hyperbolic_plane(), hyperbolic_plane()).rank == 4


def test_minus2_and_planes():
    U = hyperbolic_plane()
    assert is_minus2(U, [1, -1])
    assert not is_minus2(U, [1, 1])
    assert pair(U, [1, 1], [1, 1]) == 2
    L = direct_sum(U, U, U)
    assert positive_plane(L, [1, 1, 0, 0, 0, 0], [0, 0, 1, 1, 0, 0])
    assert not positive_plane(L, [1, 1, 0, 0, 0, 0], [1, -1, 0, 0, 0, 0])
    with pytest.raises(ValueError):
        positive_plane(L, [1, 1, 0, 0, 0, 0], [2, 2, 0, 0, 0, 0])


def test_chamber_signature_basics():
    U = hyperbolic_plane()
    # q((x, y), (1, -1)) = y - x
    assert chamber_signature(U, [2, 1], [[1, -1]]) == (-1,)
    assert chamber_signature(U, [1, 2], [[1, -1]]) == (1,)
    with pytest.raises(OnWallError):
        chamber_signature(U, [1, 1], [[1, -1]])
    with pytest.raises(NotPositiveError):
        chamber_signature(U, [1, -1], [])
    with pytest.raises(ValueError):
        chamber_signature(U, [2, 1], [[1, 1]])
    # irrational alpha
    assert chamber_signature(U, [1 + R2, 1], [[1, -1]]) == (-1,)
