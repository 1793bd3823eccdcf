import random

import pytest
from hypothesis import given, settings, strategies as st

from spinlattice.exactalg import Lattice, PrimeConfig, intersect, mat_identity
from spinlattice.forms import witt_index
from spinlattice.vertexlat import (
    HASSE_REASON,
    DenominatorOverflow,
    NotVertex,
    QuadSpace,
    RadiusTooLarge,
    apply_isometry,
    base_quotient_form,
    base_type6,
    build_complex,
    duality_violations,
    intersection_type,
    make_vertex,
    neighbors_above,
    neighbors_below,
    random_stabilizing_isometry,
    s_labeling,
    vertex_type,
)


def counts(vs):
    out = {}
    for v in vs:
        out[v.type] = out.get(v.type, 0) + 1
    return out


def test_base_lattice(space, base):
    assert base.type == 6
    assert base.verify()
    assert base.dual == base.lattice.scaled(1)
    assert witt_index(base_quotient_form(space, base)) == 2


def test_base_neighbours(space, base):
    below = neighbors_below(space, base, verify=True)
    assert counts(below) == {2: 280, 4: 112}
    assert neighbors_above(space, base) == []
    assert len({v.key for v in below}) == len(below)


def test_type4_node_sits_between_two_type6(space, base):
    v = next(w for w in neighbors_below(space, base) if w.type == 4)
    above = neighbors_above(space, v, verify=True)
    sup = [w for w in above if w.type == 6]
    assert len(sup) == 2 and base.key in {w.key for w in sup}
    assert intersect(sup[0].lattice, sup[1].lattice, space.G) == v.lattice
    assert intersection_type(space, sup[0], sup[1]) == 4
    assert counts(neighbors_below(space, v)) == {2: 10}


def test_type2_node_neighbourhood(space, base):
    v = next(w for w in neighbors_below(space, base) if w.type == 2)
    assert counts(neighbors_above(space, v)) == {4: 16, 6: 8}
    assert neighbors_below(space, v) == []


def test_radius_one_complex(complex1):
    cx = complex1
    assert cx.type_counts() == {2: 280, 4: 112, 6: 1}
    assert len(cx.edges) == 1512
    assert len(cx.simplices()) == 3025
    s_labeling(cx)
    dims = {}
    for d in cx.dims.values():
        dims[d] = dims.get(d, 0) + 1
    assert dims == {0: 280, 1: 112, 2: 1}
    assert cx.labels[cx.base] == "herm0"


def test_radius_one_neighbour_duality(complex1):
    keys = sorted(complex1.nodes)[:40] + [complex1.base]
    assert duality_violations(complex1, keys) == []


def test_radius_zero_complex(space, base):
    cx = build_complex(space, base, 0)
    assert list(cx.nodes) == [base.key]
    assert cx.edges == set()


def test_radius_limit(space, base):
    with pytest.raises(RadiusTooLarge):
        build_complex(space, base, 4)


def test_non_vertex_lattices(space):
    R = space.R
    std = Lattice(R, mat_identity(R, 6), 0, 6)
    assert not vertex_type(space, std)
    H = mat_identity(R, 6)
    for i in range(1, 6):
        H[i][i] = 3
    # span(y1/p, y2, ..., y6) has the volume of its dual without containing it
    t = vertex_type(space, Lattice(R, H, 1, 6))
    assert isinstance(t, NotVertex) and t.reason == HASSE_REASON
    with pytest.raises(ValueError):
        make_vertex(space, std)


def test_denominator_bound():
    space = QuadSpace(PrimeConfig(3, N=12, B=0))
    with pytest.raises(DenominatorOverflow):
        base_type6(space)


@settings(max_examples=4, deadline=None)
@given(st.integers(0, 10**6))
def test_stabilising_isometry_permutes_neighbours(space, base, seed):
    rng = random.Random(seed)
    M, n = random_stabilizing_isometry(space, base, rng)
    assert apply_isometry(space, M, n, base.lattice) == base.lattice
    below = neighbors_below(space, base)
    keys = {v.key for v in below}
    sample = rng.sample(below, 15)
    for v in sample:
        img = apply_isometry(space, M, n, v.lattice)
        assert img.key in keys
        assert vertex_type(space, img) == v.type
