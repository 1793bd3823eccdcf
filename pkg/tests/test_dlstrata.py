import itertools

import pytest

from spinlattice.dlstrata import (
    BudgetExceeded,
    ChainNotIncreasing,
    fermat_line_points,
    fermat_model,
    lagrangians,
    omega_over,
    partner_count,
    phi_swaps_signs,
    sign_of,
    span_dim,
    stratum_and_vertex,
    unitary_dl_points,
    x_points,
)
from spinlattice.exactalg import FiniteField


@pytest.fixture(scope="module")
def d3():
    form = omega_over(3, 3)
    return form, x_points(form, with_points=True)


def fermat_count_oracle(p):
    """Projective solutions of sum x_i^(p+1) = 0 over F_{p^2} by plain iteration."""
    F = FiniteField(p, 2)
    q = p * p
    norms = [F.pow(a, p + 1) for a in range(q)]
    total = 0
    for v in itertools.product(range(q), repeat=4):
        if not any(v):
            continue
        acc = 0
        for a in v:
            acc = F.add(acc, norms[a])
        total += acc == 0
    return total // (q - 1)


def test_fermat_points_against_oracle():
    model = fermat_model(3)
    assert len(model.points) == fermat_count_oracle(3) == 280


@pytest.mark.parametrize("p", [3, 5])
def test_fermat_incidence(p):
    model = fermat_model(p)
    assert len(model.points) == (p**3 + 1) * (p**2 + 1)
    assert len(model.lines) == (p**3 + 1) * (p + 1)
    assert model.points_per_line() == [p**2 + 1]
    assert model.lines_per_point() == [p + 1]


def test_line_over_larger_field_has_rational_subline():
    model = fermat_model(3)
    assert fermat_line_points(model, FiniteField(3, 4), 0) == (82, 10)


def test_d1_and_d2_counts():
    s1 = x_points(omega_over(1, 3))
    assert (s1.plus, s1.minus) == (1, 1)
    s2 = x_points(omega_over(2, 3))
    assert s2.lagrangians == 20 and (s2.plus, s2.minus) == (10, 10)
    s4 = x_points(omega_over(2, 3, m=2))
    assert (s4.plus, s4.minus) == (82, 82)
    assert s4.strata[1] == {0: 10, 1: 72}


def test_d3_summary(d3):
    form, s = d3
    assert s.lagrangians == 1640
    assert s.strata == {1: {0: 280, 1: 0, 2: 0}, -1: {0: 280, 1: 0, 2: 0}}
    assert s.rational_stable == 0
    assert phi_swaps_signs(form, s.points)
    for x in s.points[:50]:
        assert x.fixed_dims[0] - x.fixed_dims[1] == 2 * (x.r + 1)
        assert sign_of(form, x.L) == x.sign


def test_partner_count_is_two(d3):
    form, s = d3
    for x in s.points[:30]:
        assert partner_count(form, x.L) == 2


def test_unitary_models_match_d3_strata(d3):
    _, s = d3
    n13, st13 = unitary_dl_points(3, (1, 3))
    n31, st31 = unitary_dl_points(3, (3, 1))
    assert n13 == s.plus and n31 == s.minus
    assert st13 == s.strata[1] and st31 == s.strata[-1]


def test_unitary_model_over_larger_field():
    n, st = unitary_dl_points(3, (1, 3), m=2)
    assert n == 8344 and st == {0: 280, 1: 8064, 2: 0}


def test_lagrangian_not_in_variety_is_rejected():
    form = omega_over(3, 3)
    Ls = lagrangians(form)
    F = form.F
    far = next(L for L in Ls if span_dim(F, L, form.phi(L)) > 4)
    with pytest.raises(ChainNotIncreasing):
        stratum_and_vertex(form, far)


def test_budget():
    with pytest.raises(BudgetExceeded):
        x_points(omega_over(3, 3), budget=100)
    with pytest.raises(ValueError):
        unitary_dl_points(3, (2, 2))
