import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spinlattice.exactalg import (
    ConfigInvalid,
    FiniteField,
    fq_matmul,
    Lattice,
    PrimeConfig,
    WittRing,
    ZpRing,
    fq_nullspace,
    fq_rank,
    hermite_form,
    intersect,
    is_irreducible,
    legendre,
    mat_from_ints,
    mat_identity,
    mat_mul,
    p_valuation,
    smallest_nonsquare,
    smith_form,
    standard_lattice,
)
from spinlattice.exactalg import _hermite_form_int

W3 = WittRing(3, 8)


def witt_elems(R=W3):
    return st.tuples(*[st.integers(0, R.mod - 1)] * R.degree)


def test_config_defaults_pick_smallest_nonsquare():
    assert PrimeConfig(3).nonsquare == 2
    assert PrimeConfig(7).nonsquare == 3


@pytest.mark.parametrize("kw", [dict(p=4), dict(p=2), dict(p=3, nonsquare=1), dict(p=3, N=5), dict(p=3, m=0)])
def test_config_rejects_bad_values(kw):
    with pytest.raises(ConfigInvalid):
        PrimeConfig(**kw)


def test_legendre_matches_squares():
    for p in (3, 5, 7, 11):
        squares = {x * x % p for x in range(1, p)}
        for a in range(1, p):
            assert legendre(a, p) == (1 if a in squares else -1)
        assert legendre(smallest_nonsquare(p), p) == -1


def test_p_valuation():
    assert p_valuation(3**5 * 7, 3) == 5
    with pytest.raises(ValueError):
        p_valuation(0, 3)


@pytest.mark.parametrize("p,k", [(3, 1), (3, 2), (3, 4), (5, 2), (7, 2)])
def test_finite_field_tables(p, k):
    F = FiniteField(p, k)
    assert is_irreducible(F.modulus, p)
    q = p**k
    for a in range(1, q):
        assert F.mul(a, F.inv(a)) == 1
    # the Frobenius has order k and fixes exactly F_p
    fixed = [a for a in range(q) if F.frob(a) == a]
    assert len(fixed) == p
    assert all(F.frob(a, k) == a for a in range(q))


def test_field_rank_and_nullspace():
    F = FiniteField(3, 2)
    M = np.array([[1, 2, 0], [2, 1, 0]])
    assert fq_rank(F, M) == 1
    N = fq_nullspace(F, M)
    assert N.shape == (2, 3)
    assert not fq_matmul(F, M, N.T).any()


@given(witt_elems(), witt_elems(), witt_elems())
def test_witt_ring_axioms(a, b, c):
    R = W3
    assert R.mul(a, R.mul(b, c)) == R.mul(R.mul(a, b), c)
    assert R.mul(a, R.add(b, c)) == R.add(R.mul(a, b), R.mul(a, c))
    assert R.sub(R.add(a, b), b) == a


@given(witt_elems(), witt_elems())
def test_sigma_is_ring_automorphism_of_order_two(a, b):
    R = W3
    assert R.sigma(R.mul(a, b)) == R.mul(R.sigma(a), R.sigma(b))
    assert R.sigma(R.sigma(a)) == a
    assert R.sigma_inv(R.sigma(a)) == a


@given(witt_elems())
def test_sigma_lifts_frobenius(a):
    R = W3
    F = R.field
    assert R.residue(R.sigma(a)) == F.frob(R.residue(a))


@given(witt_elems())
def test_inverse_of_units(a):
    R = W3
    if R.residue(a) == 0:
        with pytest.raises(ZeroDivisionError):
            R.inv(a)
    else:
        assert R.mul(a, R.inv(a)) == R.one


def test_delta_squares_to_nonsquare_and_is_negated_by_sigma():
    R = W3
    assert R.mul(R.delta, R.delta) == R.from_int(R.nonsquare)
    assert R.sigma(R.delta) == R.neg(R.delta)


def test_zp_valuation_and_division():
    R = ZpRing(5, 6)
    assert R.val(R.from_int(250)) == 3
    assert R.val(R.zero) == R.N
    assert R.divp(R.from_int(250), 2) == 10


def _random_matrix(R, rng, n, k):
    return [[R.mulp(R.random(rng), rng.choice([0, 0, 1, 2])) for _ in range(k)] for _ in range(n)]


def test_integer_hermite_path_agrees_with_generic_path():
    """The specialised Z/p^N elimination is checked against the generic one."""
    R = ZpRing(3, 10)
    rng = random.Random(5)

    class Generic:
        pass

    generic = Generic()
    for name in ("p", "N", "mod", "zero", "one", "val", "inv", "divp", "mul", "sub", "split", "mulp", "is_zero"):
        setattr(generic, name, getattr(R, name))
    for _ in range(60):
        M = _random_matrix(R, rng, 5, rng.randrange(3, 9))
        fast = _hermite_form_int(R, M, 5)
        slow = hermite_form(generic, M, 5)
        assert fast == slow


def test_smith_exponents_of_diagonal():
    R = ZpRing(3, 10)
    M = mat_from_ints(R, [[9, 0, 0], [0, 1, 0], [0, 0, 3]])
    exps, _ = smith_form(R, M)
    assert sorted(exps) == [0, 1, 2]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_dual_of_dual_is_the_lattice(seed):
    R = WittRing(3, 10)
    rng = random.Random(seed)
    G = mat_from_ints(R, [[0, 0, 1], [0, -1, 0], [1, 0, 0]])
    gens = mat_identity(R, 3)
    for j in range(3):
        for i in range(3):
            gens[i][j] = R.mulp(R.random(rng), rng.choice([0, 1])) if i != j else R.mulp(R.one, rng.randrange(2))
    lat = Lattice(R, gens, rng.randrange(2), 3)
    assert lat.dual(G).dual(G) == lat


def test_lattice_sum_intersection_and_index():
    R = ZpRing(3, 10)
    G = mat_from_ints(R, [[1, 0], [0, 1]])
    a = Lattice(R, mat_from_ints(R, [[3, 0], [0, 1]]), 0, 2)
    b = Lattice(R, mat_from_ints(R, [[1, 0], [0, 3]]), 0, 2)
    std = standard_lattice(R, 2)
    assert a + b == std
    meet = intersect(a, b, G)
    assert meet == std.scaled(1)
    assert meet.index_in(a) == 1
    assert a.contains(meet) and not meet.contains(a)


def test_lattice_key_is_canonical():
    R = ZpRing(3, 10)
    A = mat_from_ints(R, [[1, 1], [0, 3]])
    B = mat_mul(R, A, mat_from_ints(R, [[2, 1], [1, 1]]))
    assert Lattice(R, A, 1, 2) == Lattice(R, B, 1, 2)
