from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spinlattice.exactalg import FiniteField, PrimeConfig
from spinlattice.forms import (
    anisotropic_kernel_ok,
    class_rep,
    conic_solvable,
    diagonalize_rational,
    hasse_of_diagonal,
    hilbert_symbol,
    isotropic_subspaces,
    isotropic_vectors_bruteforce,
    lphi_gram,
    omega_nonsplit,
    omega_split_form,
    qp_invariants,
    qp_space,
    square_class,
    witt_index,
)
from spinlattice.dlstrata import lagrangian_count

nonzero = st.integers(-200, 200).filter(bool)


def test_hilbert_symbol_matches_conic_oracle():
    p = 3
    reps = [class_rep((i, j), p, 2) for i in (0, 1) for j in (0, 1)]
    for a in reps:
        for b in reps:
            assert (hilbert_symbol(a, b, p) == 1) == conic_solvable(a, b, p), (a, b)


@given(nonzero, nonzero, nonzero, st.sampled_from([3, 5, 7]))
def test_hilbert_symbol_is_symmetric_and_bimultiplicative(a, b, c, p):
    assert hilbert_symbol(a, b, p) == hilbert_symbol(b, a, p)
    assert hilbert_symbol(a * c, b, p) == hilbert_symbol(a, b, p) * hilbert_symbol(c, b, p)
    assert hilbert_symbol(a, -a, p) == 1


@given(st.lists(nonzero, min_size=2, max_size=5), st.sampled_from([3, 5]), st.randoms(use_true_random=False))
def test_hasse_invariant_ignores_order(diag, p, rnd):
    shuffled = list(diag)
    rnd.shuffle(shuffled)
    assert hasse_of_diagonal(diag, p) == hasse_of_diagonal(shuffled, p)


@pytest.mark.parametrize("p", [3, 5])
def test_rational_space_invariants(p):
    cfg = PrimeConfig(p)
    inv = qp_invariants(qp_space(lphi_gram(cfg), p))
    assert inv.hasse == -1
    assert inv.det_class == square_class(-cfg.nonsquare, p)


def test_diagonalisation_preserves_determinant():
    gram = [[0, 1, 0], [1, 0, 0], [0, 0, 3]]
    diag = diagonalize_rational([[Fraction(x) for x in r] for r in gram])
    prod = Fraction(1)
    for d in diag:
        prod *= d
    assert prod == -3


@pytest.mark.parametrize("d,q", [(1, 3), (2, 3), (3, 3), (1, 9), (2, 9)])
def test_isotropic_lines_against_brute_force(d, q):
    F = FiniteField(3, 1 if q == 3 else 2)
    form = omega_split_form(d, F)
    expected = (q**d - 1) * (q ** (d - 1) + 1) // (q - 1)
    assert isotropic_vectors_bruteforce(form) == expected
    assert len(isotropic_subspaces(form, 1)) == expected


@pytest.mark.parametrize("d,k", [(1, 1), (2, 1), (3, 1), (1, 2), (2, 2)])
def test_lagrangian_counts(d, k):
    F = FiniteField(3, k)
    form = omega_split_form(d, F)
    Ls = isotropic_subspaces(form, d)
    assert len(Ls) == lagrangian_count(d, 3**k)
    # canonical bases are distinct and totally isotropic
    assert len({L.tobytes() for L in Ls}) == len(Ls)
    for L in Ls[:20]:
        assert not form.gram_of(L).any()


@pytest.mark.parametrize("d", [1, 2, 3])
def test_nonsplit_rational_form_has_index_d_minus_one(d):
    form = omega_nonsplit(d, 3)
    assert witt_index(form) == d - 1
    assert anisotropic_kernel_ok(form)


def test_split_form_index():
    form = omega_split_form(3, FiniteField(3, 1))
    assert witt_index(form) == 3
    assert anisotropic_kernel_ok(form)


def test_base_change_keeps_gram():
    form = omega_nonsplit(2, 3)
    big = form.base_change(FiniteField(3, 2))
    assert np.array_equal(big.G, form.G)
