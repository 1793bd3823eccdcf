"""Exterior square of the rank-8 Hermitian module, its Hodge star, the
rank-6 lattice of Hodge-fixed vectors and its Clifford algebra.

Conventions.  The rank-8 module has W-basis e1..e4 (the epsilon_0 part) and
f1..f4 (the epsilon_1 part), stored in that order.  Scalars of O_E (x) W are
pairs (a0, a1) of ring elements, one per idempotent; conjugation swaps them.
A wedge element is a list of 12 ring elements: the coefficients of
e_i^e_j (i<j, lexicographic) followed by those of f_i^f_j.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache

from .exactalg import (
    mat_add,
    mat_identity,
    mat_inverse_unimodular,
    mat_mul,
    mat_scal,
    mat_sigma,
    mat_zero,
    smith_form,
)

PAIRS = list(itertools.combinations(range(4), 2))
PAIR_INDEX = {pr: i for i, pr in enumerate(PAIRS)}


class RankDeficient(ArithmeticError):
    pass


class NotEven(ValueError):
    pass


class NotUnit(ValueError):
    pass


def _perm_sign(seq) -> int:
    s = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
    return s


def _complement(pr):
    i, j = pr
    k, l = [t for t in range(4) if t not in pr]
    return (k, l), _perm_sign((i, j, k, l))


def f_exponents():
    """p-exponents of F on (e1..e4) and (f1..f4)."""
    return (0, 0, 1, 1), (1, 1, 0, 0)


def frobenius_matrix(R):
    """Matrix Fm with F(v) = Fm sigma(v) on the standard basis."""
    ee, fe = f_exponents()
    M = mat_zero(R, 8, 8)
    for i in range(4):
        M[4 + i][i] = R.mulp(R.one, ee[i])
        M[i][4 + i] = R.mulp(R.one, fe[i])
    return M


def p_frobenius_inverse_matrix(R):
    """p * Fm^{-1}, which is integral."""
    ee, fe = f_exponents()
    M = mat_zero(R, 8, 8)
    for i in range(4):
        # F e_i = p^ee f_i  =>  F^{-1} f_i = p^-ee e_i
        M[i][4 + i] = R.mulp(R.one, 1 - ee[i])
        M[4 + i][i] = R.mulp(R.one, 1 - fe[i])
    return M


def herm(R, x, y):
    """<x, y> on the rank-8 module, as a pair (eps0, eps1) of ring elements."""
    c0 = R.zero
    c1 = R.zero
    for i in range(4):
        c0 = R.add(c0, R.mul(x[i], y[4 + i]))
        c1 = R.add(c1, R.mul(x[4 + i], y[i]))
    return c0, c1


def scalar_matrix(R, c):
    """Action of an O_E (x) W scalar (c0, c1) on the rank-8 module."""
    M = mat_zero(R, 8, 8)
    for i in range(4):
        M[i][i] = c[0]
        M[4 + i][4 + i] = c[1]
    return M


def iota(R, a: int, b: int):
    """O_E element a + b*delta as an O_E (x) W scalar."""
    d = R.delta
    x = R.add(R.from_int(a), R.scal(b, d))
    y = R.sub(R.from_int(a), R.scal(b, d))
    return x, y


# ---------------------------------------------------------------------------
# wedge elements


def wedge_basis(R, block: str, pr) -> list:
    v = [R.zero] * 12
    i, j = pr
    sign = 1
    if i > j:
        i, j, sign = j, i, -1
    v[PAIR_INDEX[(i, j)] + (0 if block == "e" else 6)] = R.from_int(sign)
    return v


def wedge_add(R, x, y):
    return [R.add(a, b) for a, b in zip(x, y)]


def wedge_sub(R, x, y):
    return [R.sub(a, b) for a, b in zip(x, y)]


def wedge_scale(R, c, x):
    """Multiply by a W scalar."""
    return [R.mul(c, a) for a in x]


def wedge_escale(R, c, x):
    """Multiply by an O_E (x) W scalar (c0, c1)."""
    return [R.mul(c[0], a) for a in x[:6]] + [R.mul(c[1], a) for a in x[6:]]


def herm_wedge(R, x, y):
    """Hermitian form on the exterior square (determinant of pairings)."""
    c0 = R.zero
    c1 = R.zero
    for k in range(6):
        c0 = R.add(c0, R.mul(x[k], y[6 + k]))
        c1 = R.add(c1, R.mul(x[6 + k], y[k]))
    return c0, c1


def hodge_star(R, x, twist=None):
    """Hodge star for omega = e1^e2^e3^e4 + f1^f2^f3^f4.

    ``twist`` = (a0, a1) with a0*a1 = 1 rescales omega by a norm-one scalar.
    """
    out = [R.zero] * 12
    for pr, k in PAIR_INDEX.items():
        comp, s = _complement(pr)
        c = PAIR_INDEX[comp]
        out[6 + c] = R.scal(s, x[k])
        out[c] = R.scal(s, x[6 + k])
    if twist is not None:
        out = wedge_escale(R, twist, out)
    return out


def wedge_to_endo(R, x):
    """(a^b)(z) = <a,z> b - <b,z> a as an 8x8 matrix (acting on columns)."""
    M = mat_zero(R, 8, 8)
    for (i, j), k in PAIR_INDEX.items():
        a = x[k]
        if not R.is_zero(a):
            # e_i^e_j : f_i -> e_j, f_j -> -e_i
            M[j][4 + i] = R.add(M[j][4 + i], a)
            M[i][4 + j] = R.sub(M[i][4 + j], a)
        b = x[6 + k]
        if not R.is_zero(b):
            M[4 + j][i] = R.add(M[4 + j][i], b)
            M[4 + i][j] = R.sub(M[4 + i][j], b)
    return M


def exterior4_coefficients(R, vecs):
    """Coefficients of v1^v2^v3^v4 on e1234 and f1234 (O_E-exterior power)."""
    e = [[v[i] for i in range(4)] for v in vecs]
    f = [[v[4 + i] for i in range(4)] for v in vecs]
    return det4(R, e), det4(R, f)


def det4(R, rows):
    total = R.zero
    for perm in itertools.permutations(range(4)):
        term = R.from_int(_perm_sign(perm))
        for i, j in enumerate(perm):
            term = R.mul(term, rows[i][j])
            if R.is_zero(term):
                break
        total = R.add(total, term)
    return total


def wedge_product_22(R, x, y):
    """x ^ y in the rank-2 module of 4-forms, as (eps0, eps1) coefficients."""
    c0 = R.zero
    c1 = R.zero
    for pr, k in PAIR_INDEX.items():
        comp, s = _complement(pr)
        c = PAIR_INDEX[comp]
        c0 = R.add(c0, R.scal(s, R.mul(x[k], y[c])))
        c1 = R.add(c1, R.scal(s, R.mul(x[6 + k], y[6 + c])))
    return c0, c1


def phi_wedge_scaled(R, x):
    """p * Phi(x) with Phi(a^b) = p^{-1} (Fa)^(Fb)."""
    ee, fe = f_exponents()
    out = [R.zero] * 12
    for (i, j), k in PAIR_INDEX.items():
        out[6 + k] = R.mulp(R.sigma(x[k]), ee[i] + ee[j])
        out[k] = R.mulp(R.sigma(x[6 + k]), fe[i] + fe[j])
    return out


def phi_endo_scaled(R, X):
    """p * F X F^{-1} for an endomorphism matrix X."""
    return mat_mul(R, mat_mul(R, frobenius_matrix(R), mat_sigma(R, X)), p_frobenius_inverse_matrix(R))


def scalar_relation_check(R, x, y) -> bool:
    """x o y + y* o x* == -<x, y>."""
    lhs = mat_add(
        R,
        mat_mul(R, wedge_to_endo(R, x), wedge_to_endo(R, y)),
        mat_mul(R, wedge_to_endo(R, hodge_star(R, y)), wedge_to_endo(R, hodge_star(R, x))),
    )
    c = herm_wedge(R, x, y)
    rhs = scalar_matrix(R, (R.neg(c[0]), R.neg(c[1])))
    return lhs == rhs


def bracket(R, x, y):
    """[x, y] = -1/2 Tr <x, y>."""
    c0, c1 = herm_wedge(R, x, y)
    half = R.from_int(pow(2, -1, R.mod))
    return R.neg(R.mul(half, R.add(c0, c1)))


def random_wedge(R, rng: random.Random):
    return [R.random(rng) for _ in range(12)]


# ---------------------------------------------------------------------------
# the lattice of Hodge-fixed vectors


@dataclass
class LBasis:
    """Bases of the Hodge-fixed lattice.

    ``x``: the six sums e_i^e_j + (e_i^e_j)*; ``z``: an orthogonal W-basis
    of the same lattice (x1+x2, x1-x2, ...); ``y``: the orthogonal basis of
    the Frobenius-fixed rational subspace (u^2 = nonsquare, u = delta).
    ``qx``, ``qz``, ``qy`` hold Q(v) = v o v for the orthogonal ones.
    """

    R: object
    x: list
    y: list
    z: list
    qy: list
    qz: list

    def gram(self, vecs):
        R = self.R
        return [[bracket(R, a, b) for b in vecs] for a in vecs]


def x_vectors(R):
    def pair(e_pr, f_pr, f_sign=1):
        v = wedge_basis(R, "e", e_pr)
        w = wedge_basis(R, "f", f_pr)
        if f_sign < 0:
            w = [R.neg(a) for a in w]
        return wedge_add(R, v, w)

    # indices are 0-based: (0,1) means e1^e2
    return [
        pair((0, 1), (2, 3)),
        pair((2, 3), (0, 1)),
        pair((0, 2), (3, 1)),
        pair((3, 1), (0, 2)),
        pair((0, 3), (1, 2)),
        pair((1, 2), (0, 3)),
    ]


@lru_cache(maxsize=None)
def l_basis(R) -> LBasis:
    xs = x_vectors(R)
    p = R.p
    u = R.delta
    pR = R.from_int(p)
    y = [
        wedge_add(R, wedge_scale(R, pR, xs[0]), xs[1]),
        wedge_scale(R, u, wedge_sub(R, wedge_scale(R, pR, xs[0]), xs[1])),
        wedge_add(R, xs[2], xs[3]),
        wedge_scale(R, u, wedge_sub(R, xs[2], xs[3])),
        wedge_add(R, xs[4], xs[5]),
        wedge_scale(R, u, wedge_sub(R, xs[4], xs[5])),
    ]
    z = []
    for k in range(3):
        z.append(wedge_add(R, xs[2 * k], xs[2 * k + 1]))
        z.append(wedge_sub(R, xs[2 * k], xs[2 * k + 1]))
    half = R.from_int(pow(2, -1, R.mod))
    qy = [R.mul(half, bracket(R, v, v)) for v in y]
    qz = [R.mul(half, bracket(R, v, v)) for v in z]
    return LBasis(R, xs, y, z, qy, qz)


def x_phi_matrix_scaled(R):
    """Matrix of p * Phi on the x-basis, in x-coordinates (columns), sigma aside."""
    xs = x_vectors(R)
    cols = [x_coordinates(R, phi_wedge_scaled(R, v)) for v in xs]
    return [[cols[j][i] for j in range(6)] for i in range(6)]


def x_coordinates(R, w):
    """Coordinates of a Hodge-fixed wedge element in the x-basis."""
    # x_k has a unique e-block entry with coefficient +-1
    xs = x_vectors(R)
    out = []
    for v in xs:
        k = next(i for i in range(6) if not R.is_zero(v[i]))
        s = v[k]
        out.append(R.mul(w[k], R.inv(s)))
    return out


def from_x_coordinates(R, c):
    xs = x_vectors(R)
    out = [R.zero] * 12
    for ci, v in zip(c, xs):
        if not R.is_zero(ci):
            out = wedge_add(R, out, wedge_scale(R, ci, v))
    return out


def x_gram(R):
    xs = x_vectors(R)
    return [[bracket(R, a, b) for b in xs] for a in xs]


# ---------------------------------------------------------------------------
# Clifford algebra on an orthogonal basis


def _blade_product(S: int, T: int, q):
    """e_S e_T = sign * prod(q_i, i in S&T) * e_{S^T} as (sign, mask, common)."""
    sign = 1
    t = T
    while t:
        j = (t & -t).bit_length() - 1
        # generators of S with index > j must be passed
        if bin(S >> (j + 1)).count("1") % 2:
            sign = -sign
        t &= t - 1
    return sign, S ^ T, S & T


@dataclass
class CliffordAlgebra:
    R: object
    q: list  # Q values of the orthogonal generators
    gens: list  # 8x8 matrices of the generators
    images: dict  # mask -> 8x8 matrix of the ordered product

    @property
    def rank(self):
        return len(self.q)

    def mul(self, a: dict, b: dict) -> dict:
        R = self.R
        out: dict = {}
        for S, x in a.items():
            for T, y in b.items():
                sign, U, common = _blade_product(S, T, self.q)
                c = R.scal(sign, R.mul(x, y))
                for i in range(self.rank):
                    if common >> i & 1:
                        c = R.mul(c, self.q[i])
                out[U] = R.add(out.get(U, R.zero), c)
        return {k: v for k, v in out.items() if not R.is_zero(v)}

    def reversal(self, a: dict) -> dict:
        R = self.R
        out = {}
        for S, x in a.items():
            k = bin(S).count("1")
            out[S] = x if (k * (k - 1) // 2) % 2 == 0 else R.neg(x)
        return out

    def embed(self, a: dict):
        R = self.R
        M = mat_zero(R, 8, 8)
        for S, x in a.items():
            M = mat_add(R, M, mat_scal(R, x, self.images[S]))
        return M

    def generator(self, i: int) -> dict:
        return {1 << i: self.R.one}

    def scalar(self, c) -> dict:
        return {0: c} if not self.R.is_zero(c) else {}


def clifford_build_and_embed(R, vectors, qs) -> CliffordAlgebra:
    """Clifford algebra on an orthogonal family with its map to 8x8 matrices.

    Checks the generator relations in the image; raises RankDeficient if the
    64 ordered products do not have full rank over the fraction field.
    """
    gens = [wedge_to_endo(R, v) for v in vectors]
    n = len(gens)
    for i in range(n):
        for j in range(n):
            anti = mat_add(R, mat_mul(R, gens[i], gens[j]), mat_mul(R, gens[j], gens[i]))
            expected = scalar_matrix(R, (R.scal(2, qs[i]), R.scal(2, qs[i]))) if i == j else mat_zero(R, 8, 8)
            if anti != expected:
                raise AssertionError(f"generator relation fails for ({i},{j})")
    images = {0: mat_identity(R, 8)}
    for S in range(1, 1 << n):
        low = (S & -S).bit_length() - 1
        images[S] = mat_mul(R, gens[low], images[S & (S - 1)])
    alg = CliffordAlgebra(R, list(qs), gens, images)
    exps = image_divisors(alg)
    if max(exps) >= R.N:
        raise RankDeficient("Clifford image does not span")
    return alg


def _flatten(M):
    return [a for row in M for a in row]


def image_divisors(alg: CliffordAlgebra, masks=None):
    """Elementary divisor exponents of the span of the chosen blade images."""
    R = alg.R
    masks = sorted(alg.images) if masks is None else masks
    cols = [_flatten(alg.images[S]) for S in masks]
    T = [[cols[j][i] for j in range(len(cols))] for i in range(64)]
    exps, _ = smith_form(R, T)
    return sorted(exps)


def is_e_linear(R, M) -> bool:
    """Block diagonal with respect to the eps0 / eps1 decomposition."""
    return all(R.is_zero(M[i][j]) for i in range(8) for j in range(8) if (i < 4) != (j < 4))


def even_part_report(alg: CliffordAlgebra):
    """(all even images E-linear, divisor exponents of the even span)."""
    R = alg.R
    even = [S for S in alg.images if bin(S).count("1") % 2 == 0]
    ok = all(is_e_linear(R, alg.images[S]) for S in even)
    # restrict to the 32 block-diagonal coordinates
    coords = [(i, j) for i in range(8) for j in range(8) if (i < 4) == (j < 4)]
    T = [[alg.images[S][i][j] for S in sorted(even)] for (i, j) in coords]
    exps, _ = smith_form(R, T)
    return ok, sorted(exps)


@lru_cache(maxsize=None)
def standard_clifford(R) -> CliffordAlgebra:
    """Clifford algebra on the orthogonal W-basis z of the self-dual lattice."""
    B = l_basis(R)
    return clifford_build_and_embed(R, B.z, B.qz)


@lru_cache(maxsize=None)
def _coordinate_inverse(R):
    alg = standard_clifford(R)
    masks = list(range(64))
    T = [[_flatten(alg.images[S])[i] for S in masks] for i in range(64)]
    return mat_inverse_unimodular(R, T)


def clifford_coordinates(R, M) -> dict:
    """Coordinates of an 8x8 matrix in the blade basis of the z-generators."""
    inv = _coordinate_inverse(R)
    v = [[a] for a in _flatten(M)]
    c = mat_mul(R, inv, v)
    return {S: c[S][0] for S in range(64) if not R.is_zero(c[S][0])}


def hermitian_adjoint(R, M):
    """Adjoint of an E-linear matrix for <.,.>: <Ma, b> = <a, M' b>."""
    if not is_e_linear(R, M):
        raise NotEven("adjoint is only defined here for E-linear maps")
    A = [[M[i][j] for j in range(4)] for i in range(4)]
    D = [[M[4 + i][4 + j] for j in range(4)] for i in range(4)]
    out = mat_zero(R, 8, 8)
    for i in range(4):
        for j in range(4):
            out[i][j] = D[j][i]
            out[4 + i][4 + j] = A[j][i]
    return out


@dataclass(frozen=True)
class GSpinReport:
    preserves_L: bool
    nu: object
    similitude_ok: bool
    det_condition_ok: bool
    det: tuple


def gspin_element_check(R, g) -> GSpinReport:
    """Element-level check of the spin-similitude / unitary-similitude match.

    ``g`` is a blade dictionary on the z-generators or an 8x8 matrix.
    """
    alg = standard_clifford(R)
    if isinstance(g, dict):
        coords = g
        G = alg.embed(g)
    else:
        G = g
        coords = clifford_coordinates(R, G)
    if any(bin(S).count("1") % 2 for S in coords):
        raise NotEven("element has odd components")
    nu_elem = alg.mul(alg.reversal(coords), coords)
    if set(nu_elem) - {0}:
        # g'g is not a scalar: not a spin similitude
        nu = None
    else:
        nu = nu_elem.get(0, R.zero)
        if R.is_zero(nu):
            raise NotUnit("g'g vanishes at this precision")
    Gp = alg.embed(alg.reversal(coords))
    adj_ok = Gp == hermitian_adjoint(R, G)
    if not adj_ok:
        raise AssertionError("Clifford reversal disagrees with the Hermitian adjoint")
    # similitude: <Ga, Gb> = nu <a, b> on basis vectors
    sim_ok = nu is not None
    if sim_ok:
        cols = [[G[i][j] for i in range(8)] for j in range(8)]
        basis = [[R.one if i == j else R.zero for i in range(8)] for j in range(8)]
        for a in range(8):
            for b in range(8):
                lhs = herm(R, cols[a], cols[b])
                c = herm(R, basis[a], basis[b])
                if lhs != (R.mul(nu, c[0]), R.mul(nu, c[1])):
                    sim_ok = False
    # preservation of L: g x g' must stay in the degree-one part
    preserves = nu is not None
    if preserves:
        for i in range(6):
            gx = mat_mul(R, mat_mul(R, G, alg.gens[i]), Gp)
            c = clifford_coordinates(R, gx)
            if any(bin(S).count("1") != 1 for S in c):
                preserves = False
                break
    d0 = det4(R, [[G[i][j] for j in range(4)] for i in range(4)])
    d1 = det4(R, [[G[4 + i][4 + j] for j in range(4)] for i in range(4)])
    det_ok = nu is not None and R.mul(nu, nu) == d0 and R.mul(nu, nu) == d1
    return GSpinReport(preserves, nu, sim_ok, det_ok, (d0, d1))


def iota_matrix(R, a: int, b: int):
    return scalar_matrix(R, iota(R, a, b))
