import random

import pytest
from hypothesis import given, settings, strategies as st

from spinlattice.exactalg import WittRing, mat_identity, mat_mul, mat_scal, mat_add
from spinlattice.hodgeclifford import (
    PAIRS,
    NotEven,
    RankDeficient,
    bracket,
    clifford_build_and_embed,
    even_part_report,
    from_x_coordinates,
    gspin_element_check,
    herm_wedge,
    hodge_star,
    image_divisors,
    iota_matrix,
    l_basis,
    phi_endo_scaled,
    phi_wedge_scaled,
    random_wedge,
    scalar_relation_check,
    standard_clifford,
    wedge_basis,
    wedge_product_22,
    wedge_to_endo,
    x_coordinates,
    x_gram,
    x_phi_matrix_scaled,
    x_vectors,
)

R = WittRing(3, 12)
seeds = st.integers(0, 2**32 - 1)


def basis():
    return [wedge_basis(R, b, pr) for b in "ef" for pr in PAIRS]


def test_star_table_on_basis():
    B = basis()
    for x in B:
        for y in B:
            assert wedge_product_22(R, y, hodge_star(R, x)) == herm_wedge(R, y, x)


def test_scalar_relation_on_pure_pairs():
    B = basis()
    assert all(scalar_relation_check(R, x, y) for x in B for y in B)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_star_is_involution_and_scalar_relation_holds(seed):
    rng = random.Random(seed)
    x, y = random_wedge(R, rng), random_wedge(R, rng)
    assert hodge_star(R, hodge_star(R, x)) == x
    assert scalar_relation_check(R, x, y)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_frobenius_commutes_with_star(seed):
    x = random_wedge(R, random.Random(seed))
    assert phi_wedge_scaled(R, hodge_star(R, x)) == hodge_star(R, phi_wedge_scaled(R, x))


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_frobenius_on_wedges_matches_conjugation_of_endomorphisms(seed):
    x = random_wedge(R, random.Random(seed))
    # p * Phi on wedges against p * F X F^{-1}, both scaled by the same p
    lhs = wedge_to_endo(R, phi_wedge_scaled(R, x))
    rhs = phi_endo_scaled(R, wedge_to_endo(R, x))
    assert lhs == rhs


def test_hodge_fixed_basis():
    xs = x_vectors(R)
    for v in xs:
        assert hodge_star(R, v) == v
    G = x_gram(R)
    minus = R.from_int(-1)
    for i in range(6):
        for j in range(6):
            assert G[i][j] == (minus if j == i ^ 1 else R.zero)
    for k, v in enumerate(xs):
        c = x_coordinates(R, v)
        assert c == [R.one if i == k else R.zero for i in range(6)]
        assert from_x_coordinates(R, c) == v


def test_rational_basis_is_frobenius_fixed_with_expected_norms():
    B = l_basis(R)
    p, d = 3, R.nonsquare
    assert B.qy == [R.from_int(a) for a in (-p, p * d, -1, d, -1, d)]
    P = x_phi_matrix_scaled(R)
    for y in B.y:
        c = x_coordinates(R, y)
        img = [R.zero] * 6
        for j in range(6):
            sc = R.sigma(c[j])
            for i in range(6):
                img[i] = R.add(img[i], R.mul(P[i][j], sc))
        assert img == [R.mulp(a, 1) for a in c]


def test_clifford_relations_on_x_basis():
    xs = x_vectors(R)
    X = [wedge_to_endo(R, v) for v in xs]
    I = mat_identity(R, 8)
    for i in range(6):
        for j in range(6):
            anti = mat_add(R, mat_mul(R, X[i], X[j]), mat_mul(R, X[j], X[i]))
            assert anti == mat_scal(R, bracket(R, xs[i], xs[j]), I)


def test_clifford_image_is_all_endomorphisms():
    alg = standard_clifford(R)
    assert image_divisors(alg) == [0] * 64
    ok, even = even_part_report(alg)
    assert ok and even == [0] * 32


def test_rational_basis_clifford_image_has_index():
    """On the y-basis the image has full rank but is not all of End."""
    B = l_basis(R)
    alg = clifford_build_and_embed(R, B.y, B.qy)
    exps = image_divisors(alg)
    assert len(exps) == 64 and set(exps) == {0, 1} and sum(exps) == 32


def test_dependent_family_is_rank_deficient():
    B = l_basis(R)
    vecs = [B.z[0], B.z[0], B.z[2], B.z[3], B.z[4], B.z[5]]
    with pytest.raises((RankDeficient, AssertionError)):
        clifford_build_and_embed(R, vecs, [B.qz[0], B.qz[0]] + B.qz[2:])


def test_even_element_is_spin_similitude():
    rep = gspin_element_check(R, {0b10100: R.one})
    assert rep.preserves_L and rep.similitude_ok and rep.det_condition_ok
    assert rep.nu == R.one


def test_scalar_unit_is_unitary_similitude_but_not_in_the_spin_image():
    rep = gspin_element_check(R, iota_matrix(R, 1, 1))
    assert rep.similitude_ok
    assert rep.nu == R.from_int(1 - R.nonsquare)
    assert not rep.det_condition_ok


def test_odd_element_rejected():
    with pytest.raises(NotEven):
        gspin_element_check(R, {0b1: R.one})
