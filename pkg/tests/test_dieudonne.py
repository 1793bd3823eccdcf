import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spinlattice import dieudonne as dd
from spinlattice.exactalg import Lattice, PrimeConfig, fq_rank, mat_identity, mat_mul, mat_zero
from spinlattice.hodgeclifford import iota_matrix

seeds = st.integers(0, 2**32 - 1)


@pytest.fixture(scope="module")
def pair(iso):
    return dd.special_pair(iso, iso.standard())


def diag_lattice(R, exps):
    H = mat_identity(R, 8)
    for i, e in enumerate(exps):
        H[i][i] = R.mulp(R.one, e)
    return Lattice(R, H, 0, 8)


def test_frobenius_matrix_pattern(iso):
    R = iso.R
    allowed = {R.zero, R.one, R.from_int(3)}
    assert all(a in allowed for row in iso.Fm for a in row)
    # F e_i lands in the f-block and F f_i in the e-block
    for i in range(8):
        nz = [j for j in range(8) if not R.is_zero(iso.Fm[j][i])]
        assert len(nz) == 1 and (nz[0] < 4) != (i < 4)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_lambda_adjointness(iso, seed):
    R = iso.R
    rng = random.Random(seed)
    x = [R.random(rng) for _ in range(8)]
    y = [R.random(rng) for _ in range(8)]
    assert dd.adjointness_holds(iso, x, y)


def test_standard_lattice_is_dieudonne(iso):
    R = iso.R
    cert = dd.is_dieudonne(iso, iso.standard())
    assert cert and cert.failures == [] and cert.ell == 0
    # hand evaluation: D1 = span(p e1, p e2, e3, e4, f1, f2, p f3, p f4)
    assert cert.d1 == diag_lattice(R, [1, 1, 0, 0, 0, 0, 1, 1])


def test_f_calculus_volumes(iso):
    fc = dd.f_calculus(iso, iso.standard())
    assert (fc.vol, fc.vol_f_inverse, fc.vol_f_push) == (0, -4, 4)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_f_push_of_f_inverse_is_contained(iso, seed):
    R = iso.R
    rng = random.Random(seed)
    H = mat_identity(R, 8)
    for i in range(8):
        H[i][i] = R.mulp(R.one, rng.randrange(3))
        for j in range(i + 1, 8):
            H[i][j] = R.random(rng) if rng.random() < 0.3 else R.zero
    D = Lattice(R, H, rng.randrange(2), 8)
    fc = dd.f_calculus(iso, D)
    back = iso.f_push(fc.f_inverse)
    assert D.contains(back)
    assert (back == D) == (fc.vol_f_inverse == fc.vol - 4)


def test_breaking_self_duality_is_reported(iso):
    R = iso.R
    D = diag_lattice(R, [1, 0, 0, 0, 0, 0, 0, 0])
    cert = dd.is_dieudonne(iso, D)
    assert not cert
    assert cert.failures == ["(2) D^dual = cD"]
    with pytest.raises(dd.NotDieudonne):
        dd.special_pair(iso, D)


def test_non_stable_lattice_is_reported(iso):
    R = iso.R
    H = mat_identity(R, 8)
    H[0][0] = R.from_int(3)
    H[0][4] = R.one
    cert = dd.is_dieudonne(iso, Lattice(R, H, 0, 8))
    assert "O_E-stability" in cert.failures


def test_unit_scalar_keeps_dieudonne(iso):
    R = iso.R
    D = iso.standard().transform(iota_matrix(R, 1, 1))
    assert dd.is_dieudonne(iso, D)


def test_pair_of_standard_lattice(iso, pair):
    R = iso.R
    assert pair.Lsharp == Lattice(R, mat_identity(R, 6), 0, 6)
    assert (pair.L.scale, pair.L.pivot_exps) == (1, [2, 0, 1, 1, 1, 1])
    assert dd.is_special(iso, pair.L)
    assert dd.signature(iso, iso.standard(), pair.d1) == (2, 2)


def test_pair_stabilizer_is_maximal(iso, pair):
    """No x in p^{-1}L outside L maps D1 into itself: the residue map
    v -> x_v D1 / p D1 has trivial kernel (independent of the Smith route)."""
    R = iso.R
    F = R.field
    D1 = pair.d1
    L = pair.L
    blocks = []
    for k in range(6):
        X = mat_zero(R, 8, 8)
        for j in range(6):
            c = L.H[j][k]
            if not R.is_zero(c):
                X = [[R.add(a, R.mul(c, b)) for a, b in zip(ra, rb)] for ra, rb in zip(X, iso.X[j])]
        Y = dd._solve_upper(R, D1.H, mat_mul(R, X, D1.H))
        assert min(R.val(a) for row in Y for a in row) >= L.scale
        blocks.append([R.residue(R.divp(a, L.scale)) for row in Y for a in row])
    M = np.array(blocks, dtype=np.int64).T
    assert fq_rank(F, M) == 6


def test_pair_ignores_p_powers(iso, pair):
    other = dd.special_pair(iso, iso.standard().scaled(1))
    assert (other.L, other.Lsharp) == (pair.L, pair.Lsharp)


@pytest.mark.parametrize("N", [12, 16])
def test_standard_round_trip(N):
    iso = dd.Isocrystal.from_config(PrimeConfig(3, N=N))
    assert dd.round_trip(iso, iso.standard(), random.Random(3))


def test_reconstruction_routes_agree(iso, pair):
    rec = dd.dieudonne_from_pair(iso, pair.L, pair.Lsharp, random.Random(11))
    assert rec.idempotent_route == rec.vector_route
    assert dd.same_up_to_p(rec.D, iso.standard())
    assert iso.f_push(rec.d1) == rec.D.scaled(1)


def test_lifted_special_lattices_round_trip(iso, cfg):
    rng = random.Random(2)
    lifted = dd.lifted_special_lattices(iso, cfg, 4, rng)
    assert len(lifted) == 4
    for L, _ in lifted:
        Ls = iso.phi_push(L)
        rec = dd.dieudonne_from_pair(iso, L, Ls, rng)
        cert = dd.is_dieudonne(iso, rec.D)
        assert cert
        got = dd.special_pair(iso, rec.D)
        assert (got.L, got.Lsharp) == (L, Ls)
        assert dd.signature(iso, rec.D, cert.d1) == (2, 2)


def test_kernel_equals_image_for_isotropic_vectors(iso, pair):
    assert dd.kernel_image_check(iso, iso.standard(), pair.Lsharp, random.Random(4), 50) == 50


def test_idempotent_search_budget(iso, pair):
    real = dd.realise(iso, pair.Lsharp)
    with pytest.raises(dd.IdempotentSearchFailed):
        dd.primitive_idempotent(real, random.Random(0), tries=1)


def test_non_special_input_rejected(iso, pair):
    with pytest.raises(ValueError):
        dd.dieudonne_from_pair(iso, pair.L.scaled(1), pair.Lsharp, random.Random(0))
    with pytest.raises(ValueError):
        dd.dieudonne_from_pair(iso, pair.L, pair.L, random.Random(0))
