"""Rank-8 isocrystal with its Frobenius, Dieudonne lattices in it, and the
passage to and from pairs of special lattices in the Hodge-fixed space.

Lattices of the rank-8 module are ``Lattice`` objects in the standard basis
e1..e4, f1..f4; lattices of the Hodge-fixed space are in x-coordinates.
Every Dieudonne lattice is only meaningful up to powers of p, and
``canonical`` picks the representative compared in round trips.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .dlstrata import lagrangians, span_dim
from .exactalg import (
    Lattice,
    PrimeConfig,
    WittRing,
    fq_matmul,
    fq_nullspace,
    fq_rank,
    mat_identity,
    mat_min_val,
    mat_mul,
    mat_sigma,
    mat_sigma_inv,
    mat_transpose,
    mat_zero,
    preimage_lattice_gens,
)
from .hodgeclifford import (
    CliffordAlgebra,
    frobenius_matrix,
    l_basis,
    p_frobenius_inverse_matrix,
    wedge_to_endo,
    x_coordinates,
    x_gram,
    x_phi_matrix_scaled,
    x_vectors,
)
from .vertexlat import QuadSpace, base_quotient_form, base_type6


class NotDieudonne(ValueError):
    pass


class IdempotentSearchFailed(RuntimeError):
    pass


def pairing_matrix(R):
    """Gram of lambda(x, y) = Tr(delta^{-1} <x, y>) on the standard basis."""
    di = R.inv(R.delta)
    G = mat_zero(R, 8, 8)
    for i in range(4):
        G[i][4 + i] = di
        G[4 + i][i] = R.neg(di)
    return G


def _mat_vec(R, A, v):
    out = []
    for row in A:
        acc = R.zero
        for a, x in zip(row, v):
            if not R.is_zero(a) and not R.is_zero(x):
                acc = R.add(acc, R.mul(a, x))
        out.append(acc)
    return out


def _bilinear(R, x, G, y):
    return _mat_vec(R, [x], _mat_vec(R, G, y))[0]


class Isocrystal:
    """The rank-8 module over R = W/p^N with F(v) = Fm sigma(v), V = p F^{-1}.

    ``B`` is the denominator bound; round-trip assertions are made at
    precision N - B.
    """

    def __init__(self, R, B: int = 4):
        self.R = R
        self.B = B
        self.Fm = frobenius_matrix(R)
        self.pFinv = p_frobenius_inverse_matrix(R)
        self.lam = pairing_matrix(R)
        self.eps = []
        for part in (0, 1):
            E = mat_zero(R, 8, 8)
            for i in range(4):
                E[4 * part + i][4 * part + i] = R.one
            self.eps.append(E)
        self.X = [wedge_to_endo(R, v) for v in x_vectors(R)]
        self.gram = x_gram(R)
        self.phi = x_phi_matrix_scaled(R)

    @classmethod
    def from_config(cls, cfg: PrimeConfig) -> "Isocrystal":
        return isocrystal(WittRing.from_config(cfg), cfg.B)

    def F(self, v):
        R = self.R
        return _mat_vec(R, self.Fm, [R.sigma(a) for a in v])

    def V(self, v):
        R = self.R
        return [R.sigma_inv(a) for a in _mat_vec(R, self.pFinv, v)]

    def pairing(self, x, y):
        return _bilinear(self.R, x, self.lam, y)

    def standard(self) -> Lattice:
        return Lattice(self.R, mat_identity(self.R, 8), 0, 8)

    def f_push(self, D: Lattice) -> Lattice:
        """F_*(D), the W-span of F(D)."""
        return D.sigma().transform(self.Fm)

    def f_inverse(self, D: Lattice) -> Lattice:
        """F^{-1}(D) = sigma^{-1}(Fm^{-1} D)."""
        lat = D.transform(self.pFinv, 1)
        return Lattice(self.R, mat_sigma_inv(self.R, lat.H), lat.scale, 8)

    def d1(self, D: Lattice) -> Lattice:
        return self.f_inverse(D.scaled(1))

    def dual(self, D: Lattice) -> Lattice:
        return D.dual(self.lam)

    def eps_split(self, A: Lattice, B: Lattice) -> Lattice:
        """eps0 A + eps1 B."""
        R = self.R
        s = max(A.scale, B.scale)
        a = mat_mul(R, self.eps[0], A.columns_at(s))
        b = mat_mul(R, self.eps[1], B.columns_at(s))
        return Lattice(R, [ra + rb for ra, rb in zip(a, b)], s, 8)

    def oe_stable(self, D: Lattice) -> bool:
        return self.eps_split(D, D) == D

    def phi_push(self, L: Lattice) -> Lattice:
        """Phi_*(L) for a lattice in x-coordinates."""
        R = self.R
        return Lattice(R, mat_mul(R, self.phi, mat_sigma(R, L.H)), L.scale + 1, 6)

    def with_precision(self, N: int) -> "Isocrystal":
        R = self.R
        return isocrystal(WittRing(R.p, N, R.degree, R.nonsquare), self.B)


@lru_cache(maxsize=None)
def isocrystal(R, B: int = 4) -> Isocrystal:
    return Isocrystal(R, B)


def adjointness_holds(iso: Isocrystal, x, y) -> bool:
    """lambda(Fx, y) == sigma(lambda(x, Vy)) at precision N - 1."""
    R = iso.R
    lhs = iso.pairing(iso.F(x), y)
    rhs = R.sigma(iso.pairing(x, iso.V(y)))
    return R.reduce_to(lhs, R.N - 1) == R.reduce_to(rhs, R.N - 1)


def canonical(D: Lattice) -> Lattice:
    """The representative p^k D whose basis has minimal valuation 0."""
    return D.scaled(D.scale - mat_min_val(D.R, D.H))


def same_up_to_p(a: Lattice, b: Lattice) -> bool:
    return canonical(a) == canonical(b)


# ---------------------------------------------------------------------------
# F-calculus and the Dieudonne predicate


@dataclass
class FCalculus:
    f_inverse: Lattice
    f_push: Lattice
    vol: int
    vol_f_inverse: int
    vol_f_push: int


def f_calculus(iso: Isocrystal, D: Lattice) -> FCalculus:
    fi = iso.f_inverse(D)
    fp = iso.f_push(D)
    return FCalculus(fi, fp, D.volume_exp(), fi.volume_exp(), fp.volume_exp())


@dataclass
class DieudonneCertificate:
    ok: bool
    failures: list = field(default_factory=list)
    ell: int | None = None
    d1: Lattice | None = None

    def __bool__(self):
        return self.ok


def is_dieudonne(iso: Isocrystal, D: Lattice) -> DieudonneCertificate:
    """Check the lattice conditions; failures are labelled by condition."""
    failures = []
    if not iso.oe_stable(D):
        failures.append("O_E-stability")
    D1 = iso.d1(D)
    if not (D1.contains(D.scaled(1)) and D.contains(D1)):
        failures.append("(1) pD in D1 in D")
    ell = None
    Dv = iso.dual(D)
    diff = Dv.volume_exp() - D.volume_exp()
    if diff % 8 == 0 and Dv == D.scaled(diff // 8):
        ell = diff // 8
    else:
        failures.append("(2) D^dual = cD")
    if "(1) pD in D1 in D" not in failures:
        if D.scaled(1).index_in(D1) != 4:
            failures.append("(3') length D1/pD = 4")
    if iso.f_push(iso.f_inverse(D)) != D:
        failures.append("(3) D = F_*(F^{-1} D)")
    return DieudonneCertificate(not failures, failures, ell, D1)


def signature(iso: Isocrystal, D: Lattice, D1: Lattice) -> tuple[int, int]:
    """Lengths of eps0 D / eps0 D1 and eps1 D / eps1 D1."""
    a0 = D1.index_in(iso.eps_split(D, D1))
    return a0, D1.index_in(D) - a0


# ---------------------------------------------------------------------------
# Dieudonne lattice -> special pair


def stabilizer(iso: Isocrystal, src: Lattice, dst: Lattice) -> Lattice:
    """{x in the Hodge-fixed space : x src in dst}, in x-coordinates."""
    R = iso.R
    dd = iso.dual(dst)
    left = mat_mul(R, mat_transpose(dd.H), iso.lam)
    cols = []
    for X in iso.X:
        M = mat_mul(R, left, mat_mul(R, X, src.H))
        cols.append([a for row in M for a in row])
    T = [[c[i] for c in cols] for i in range(64)]
    gens, sc = preimage_lattice_gens(R, T, dd.scale + src.scale)
    return Lattice(R, gens, sc, 6)


@dataclass
class SpecialPair:
    L: Lattice
    Lsharp: Lattice
    total: Lattice
    d1: Lattice
    ell: int


def is_self_dual(iso: Isocrystal, L: Lattice) -> bool:
    return L.dual(iso.gram) == L


def is_special(iso: Isocrystal, L: Lattice) -> bool:
    if not is_self_dual(iso, L):
        return False
    return L.index_in(L + iso.phi_push(L)) == 1


def special_pair(iso: Isocrystal, D: Lattice) -> SpecialPair:
    cert = is_dieudonne(iso, D)
    if not cert:
        raise NotDieudonne("; ".join(cert.failures))
    D1 = cert.d1
    L = stabilizer(iso, D1, D1)
    Ls = stabilizer(iso, D, D)
    total = stabilizer(iso, D1, D)
    problems = []
    if not is_self_dual(iso, L) or not is_self_dual(iso, Ls):
        problems.append("not self-dual")
    if iso.phi_push(L) != Ls:
        problems.append("Phi_*(L) != L#")
    if L.index_in(L + Ls) != 1:
        problems.append("length (L + L#)/L != 1")
    if L + Ls != total:
        problems.append("L + L# differs from the D1 -> D stabilizer")
    if problems:
        raise AssertionError("special pair postconditions: " + ", ".join(problems))
    return SpecialPair(L, Ls, total, D1, cert.ell)


# ---------------------------------------------------------------------------
# special pair -> Dieudonne lattice


def orthogonal_basis(R, G):
    """Rows c_i with c_i^T G c_j = 0 (i != j) spanning the same lattice.

    G must be symmetric with unit determinant; returns (rows, c_i^T G c_i).
    """
    n = len(G)
    pool = [[R.one if i == j else R.zero for j in range(n)] for i in range(n)]
    rows, vals = [], []
    while pool:
        idx = next((i for i, u in enumerate(pool) if R.val(_bilinear(R, u, G, u)) == 0), None)
        if idx is None:
            pair = next(
                ((i, j) for i in range(len(pool)) for j in range(i + 1, len(pool))
                 if R.val(_bilinear(R, pool[i], G, pool[j])) == 0),
                None,
            )
            if pair is None:
                raise ValueError("form is not unimodular")
            i, j = pair
            pool[i] = [R.add(a, b) for a, b in zip(pool[i], pool[j])]
            idx = i
        v = pool.pop(idx)
        bv = _bilinear(R, v, G, v)
        inv = R.inv(bv)
        rows.append(v)
        vals.append(bv)
        Gv = _mat_vec(R, G, v)
        new = []
        for w in pool:
            c = R.mul(_mat_vec(R, [w], Gv)[0], inv)
            new.append([R.sub(a, R.mul(c, b)) for a, b in zip(w, v)])
        pool = new
    return rows, vals


@dataclass
class CliffordRealisation:
    """C(L) for a self-dual L on an orthogonal basis, with matrix images.

    ``images[S]`` is p^{s |S|} times the matrix of the blade S, which is
    integral; s is the scale of L.
    """

    alg: CliffordAlgebra
    scale: int
    images: list
    residue_q: list


def realise(iso: Isocrystal, L: Lattice) -> CliffordRealisation:
    R = iso.R
    s = L.scale
    Gint = mat_mul(R, mat_mul(R, mat_transpose(L.H), iso.gram), L.H)
    if mat_min_val(R, Gint) < 2 * s:
        raise ValueError("lattice is not integral")
    G = [[R.divp(a, 2 * s) for a in row] for row in Gint]
    rows, vals = orthogonal_basis(R, G)
    half = R.from_int(pow(2, -1, R.mod))
    q = [R.mul(half, v) for v in vals]
    gens = []
    for c in rows:
        xc = _mat_vec(R, L.H, c)
        M = mat_zero(R, 8, 8)
        for a, X in zip(xc, iso.X):
            if not R.is_zero(a):
                M = [[R.add(m, R.mul(a, x)) for m, x in zip(mr, xr)] for mr, xr in zip(M, X)]
        gens.append(M)
    images = [mat_identity(R, 8)]
    for S in range(1, 64):
        low = (S & -S).bit_length() - 1
        images.append(mat_mul(R, gens[low], images[S & (S - 1)]))
    alg = CliffordAlgebra(R, q, gens, {})
    return CliffordRealisation(alg, s, images, [R.residue(a) for a in q])


def _hyperbolic_pairs(F, qres, rng: random.Random, tries: int):
    """Random u_i, v_i with Q(u_i) = Q(v_i) = 0, [u_i, v_j] = delta_ij mod p."""
    n = len(qres)
    two_q = [F.mul(F.from_int(2), a) for a in qres]

    def b(u, v):
        acc = 0
        for t, x, y in zip(two_q, u, v):
            if x and y:
                acc = F.add(acc, F.mul(t, F.mul(x, y)))
        return acc

    def combo(span):
        out = [0] * n
        for w in span:
            c = rng.randrange(F.q)
            if c:
                out = [F.add(a, F.mul(c, x)) for a, x in zip(out, w)]
        return out

    span = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    pairs = []
    budget = tries
    while len(pairs) < n // 2:
        u = v = None
        while budget > 0 and u is None:
            budget -= 1
            cand = combo(span)
            if any(cand) and b(cand, cand) == 0:
                u = cand
        while budget > 0 and u is not None and v is None:
            budget -= 1
            cand = combo(span)
            t = b(u, cand)
            if t:
                v = [F.mul(F.inv(t), a) for a in cand]
        if v is None:
            raise IdempotentSearchFailed(f"no hyperbolic pair found in {tries} random draws")
        c = F.mul(b(v, v), F.inv(F.from_int(2)))
        v = [F.sub(a, F.mul(c, x)) for a, x in zip(v, u)]
        pairs.append((u, v))
        span = [
            [F.sub(F.sub(w_i, F.mul(b(w, v), u_i)), F.mul(b(w, u), v_i)) for w_i, u_i, v_i in zip(w, u, v)]
            for w in span
        ]
    return pairs


def _elem_add(R, a: dict, b: dict, cb: int = 1) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = R.add(out.get(k, R.zero), R.scal(cb, v))
    return {k: v for k, v in out.items() if not R.is_zero(v)}


def primitive_idempotent(real: CliffordRealisation, rng: random.Random, tries: int = 2000) -> dict:
    """A primitive idempotent of C(L): found mod p, then lifted by e <- 3e^2 - 2e^3."""
    alg = real.alg
    R = alg.R
    pairs = _hyperbolic_pairs(R.field, real.residue_q, rng, tries)
    e = alg.scalar(R.one)
    for u, v in pairs:
        ue = {1 << i: R.lift(c) for i, c in enumerate(u) if c}
        ve = {1 << i: R.lift(c) for i, c in enumerate(v) if c}
        e = alg.mul(e, alg.mul(ue, ve))
    defect = _elem_add(R, alg.mul(e, e), e, -1)
    if any(R.val(c) == 0 for c in defect.values()):
        raise IdempotentSearchFailed("residue product is not idempotent")
    for _ in range(R.N.bit_length() + 3):
        e2 = alg.mul(e, e)
        if e2 == e:
            return e
        e3 = alg.mul(e2, e)
        e = _elem_add(R, {k: R.scal(3, c) for k, c in e2.items()}, e3, -2)
    raise IdempotentSearchFailed("idempotent iteration did not converge")


def element_matrix(real: CliffordRealisation, a: dict):
    """(numerator, scale) of the 8x8 matrix of an algebra element."""
    R = real.alg.R
    s = real.scale
    top = 6 * s
    M = mat_zero(R, 8, 8)
    for S, c in a.items():
        c = R.mulp(c, top - s * bin(S).count("1"))
        if R.is_zero(c):
            continue
        P = real.images[S]
        M = [[R.add(m, R.mul(c, x)) for m, x in zip(mr, xr)] for mr, xr in zip(M, P)]
    return M, top


def module_from_idempotent(real: CliffordRealisation, e: dict) -> Lattice:
    """C(L) e applied to the ambient module: span of (b_S e) w for a generator w of eW^8."""
    alg = real.alg
    R = alg.R
    Me, top = element_matrix(real, e)
    j = min(range(8), key=lambda c: min(R.val(Me[i][c]) for i in range(8)))
    cols = []
    for S in range(64):
        f = alg.mul({S: R.one}, e)
        M, _ = element_matrix(real, f)
        cols.append([M[i][j] for i in range(8)])
    return Lattice(R, [[c[i] for c in cols] for i in range(8)], top, 8)


def module_from_vector(real: CliffordRealisation, w) -> Lattice:
    """C(L) w."""
    R = real.alg.R
    s = real.scale
    top = 6 * s
    cols = []
    for S in range(64):
        v = _mat_vec(R, real.images[S], w)
        cols.append([R.mulp(a, top - s * bin(S).count("1")) for a in v])
    return Lattice(R, [[c[i] for c in cols] for i in range(8)], top, 8)


def idempotent_is_primitive(real: CliffordRealisation, e: dict) -> bool:
    """A rank-one idempotent has trace 1."""
    R = real.alg.R
    Me, top = element_matrix(real, e)
    tr = R.zero
    for i in range(8):
        tr = R.add(tr, Me[i][i])
    return tr == R.mulp(R.one, top)


def clifford_closure(real: CliffordRealisation, M: Lattice) -> Lattice:
    """The smallest lattice containing M and stable under the generators."""
    while True:
        nxt = M
        for g in real.alg.gens:
            nxt = nxt + M.transform(g, real.scale)
        if nxt == M:
            return M
        M = nxt


@dataclass
class Reconstruction:
    D: Lattice
    d1: Lattice
    idempotent_route: Lattice
    vector_route: Lattice


def working_precision(iso: Isocrystal, *lats: Lattice) -> int:
    s = max(L.scale for L in lats)
    return iso.R.N + 6 * s + 8


def dieudonne_from_pair(iso: Isocrystal, L: Lattice, Lsharp: Lattice, rng: random.Random) -> Reconstruction:
    """Rebuild D (up to p-power) from a special pair (L, Phi_*(L)).

    Input Hermite forms are exact, so the computation is carried out in a
    ring with 6s + 8 extra digits and the result read back at precision N.
    """
    if not is_special(iso, L):
        raise ValueError("L is not special")
    if iso.phi_push(L) != Lsharp:
        raise ValueError("second lattice is not Phi_*(L)")
    hi = iso.with_precision(working_precision(iso, L, Lsharp))
    Rh = hi.R
    Lh = Lattice(Rh, L.H, L.scale, 6)
    Lsh = Lattice(Rh, Lsharp.H, Lsharp.scale, 6)

    real_s = realise(hi, Lsh)
    e = primitive_idempotent(real_s, rng)
    if not idempotent_is_primitive(real_s, e):
        raise IdempotentSearchFailed("idempotent is not primitive")
    D_idem = canonical(module_from_idempotent(real_s, e))
    w = [Rh.random(rng) for _ in range(8)]
    D_vec = canonical(module_from_vector(real_s, w))
    if D_idem != D_vec:
        raise AssertionError("idempotent and random-vector routes disagree")
    D = D_idem

    real = realise(hi, Lh)
    e1 = primitive_idempotent(real, rng)
    D1 = module_from_idempotent(real, e1)
    closure = clifford_closure(real_s, D1)
    k, rem = divmod(closure.volume_exp() - D.volume_exp(), 8)
    if rem or closure != D.scaled(k):
        raise AssertionError("C(L#) D1 is not a multiple of D")
    D1 = D1.scaled(-k)
    if not (D.contains(D1) and D1.contains(D.scaled(1))):
        raise AssertionError("pD in D1 in D fails")
    if hi.f_push(D1) != D.scaled(1):
        raise AssertionError("F_*(D1) != pD")

    R = iso.R
    out = Reconstruction(
        D.reduce_precision(R), D1.reduce_precision(R), D_idem.reduce_precision(R), D_vec.reduce_precision(R)
    )
    low = iso.with_precision(R.N - iso.B)
    Dl = D.reduce_precision(low.R)
    if not is_dieudonne(low, Dl):
        raise AssertionError("reconstructed lattice is not Dieudonne")
    pair = special_pair(low, Dl)
    if pair.L != L.reduce_precision(low.R) or pair.Lsharp != Lsharp.reduce_precision(low.R):
        raise AssertionError("reconstructed lattice does not reproduce the pair")
    return out


def round_trip(iso: Isocrystal, D: Lattice, rng: random.Random) -> bool:
    """dieudonne_from_pair(special_pair(D)) == D up to p-power, at N - B."""
    pair = special_pair(iso, D)
    rec = dieudonne_from_pair(iso, pair.L, pair.Lsharp, rng)
    low = iso.with_precision(iso.R.N - iso.B).R
    return same_up_to_p(rec.D.reduce_precision(low), D.reduce_precision(low))


# ---------------------------------------------------------------------------
# kernel / image of isotropic vectors on D / pD


def _solve_upper(R, H, M):
    """H^{-1} M for the canonical (upper triangular, pivot p^k) basis H."""
    n = len(H)
    exps = [R.val(H[i][i]) for i in range(n)]
    out = [[R.zero] * len(M[0]) for _ in range(n)]
    for c in range(len(M[0])):
        for i in range(n - 1, -1, -1):
            r = M[i][c]
            for l in range(i + 1, n):
                if not R.is_zero(H[i][l]):
                    r = R.sub(r, R.mul(H[i][l], out[l][c]))
            if R.val(r) < exps[i]:
                raise ValueError("column does not lie in the lattice")
            unit = R.divp(H[i][i], exps[i])
            out[i][c] = R.mul(R.divp(r, exps[i]), R.inv(unit))
    return out


def _residue_matrix(R, M) -> np.ndarray:
    return np.array([[R.residue(a) for a in row] for row in M], dtype=np.int64)


def kernel_image_check(iso: Isocrystal, D: Lattice, Lsharp: Lattice, rng: random.Random, count: int = 50) -> int:
    """Number of random isotropic x in L#/pL# whose action on D/pD has
    kernel = image, of dimension 4, O_E-stable and isotropic for c*lambda."""
    R = iso.R
    F = R.field
    real = realise(iso, Lsharp)
    s = real.scale
    cert = is_dieudonne(iso, D)
    H = D.H
    G = mat_mul(R, mat_mul(R, mat_transpose(H), iso.lam), H)
    shift = cert.ell - 2 * D.scale
    if shift >= 0:
        G = [[R.mulp(a, shift) for a in row] for row in G]
    else:
        G = [[R.divp(a, -shift) for a in row] for row in G]
    Gres = _residue_matrix(R, G)
    if fq_rank(F, Gres) != 8:
        raise AssertionError("c*lambda is not perfect on D")
    E0 = _residue_matrix(R, _solve_upper(R, H, mat_mul(R, iso.eps[0], H)))
    two_q = [F.mul(F.from_int(2), a) for a in real.residue_q]
    passed = 0
    done = 0
    while done < count:
        x = [rng.randrange(F.q) for _ in range(6)]
        if not any(x):
            continue
        if _q_res(F, two_q, x):
            continue
        done += 1
        M = mat_zero(R, 8, 8)
        for c, g in zip(x, real.alg.gens):
            if c:
                lc = R.lift(c)
                M = [[R.add(m, R.mul(lc, a)) for m, a in zip(mr, gr)] for mr, gr in zip(M, g)]
        Y = _solve_upper(R, H, mat_mul(R, M, H))
        if mat_min_val(R, Y) < s:
            raise AssertionError("x does not preserve D")
        A = _residue_matrix(R, [[R.divp(a, s) for a in row] for row in Y])
        ker = fq_nullspace(F, A)
        ok = len(ker) == 4 and fq_rank(F, A) == 4
        ok = ok and not fq_matmul(F, A, A).any()
        ok = ok and fq_rank(F, np.vstack([ker, fq_matmul(F, ker, E0.T)])) == 4
        ok = ok and not fq_matmul(F, fq_matmul(F, ker, Gres), ker.T).any()
        passed += bool(ok)
    return passed


def _q_res(F, two_q, x) -> bool:
    """True when x is anisotropic for the residue form."""
    acc = 0
    for t, a in zip(two_q, x):
        acc = F.add(acc, F.mul(t, F.mul(a, a)))
    return acc != 0


# ---------------------------------------------------------------------------
# special lattices from points of the d = 3 variety


def lifted_special_lattices(iso: Isocrystal, cfg: PrimeConfig, count: int, rng: random.Random) -> list:
    """Special lattices pLambda in L in Lambda lifted from Lagrangians of
    Lambda/pLambda with dim(L + Phi L) = 4, Lambda the base type-6 lattice.

    Returns (lattice in x-coordinates, Lagrangian rows) pairs.
    """
    R = iso.R
    space = QuadSpace(cfg)
    base = base_type6(space)
    F = R.field
    form = base_quotient_form(space, base).base_change(F)
    lags = [Lg for Lg in lagrangians(form) if span_dim(F, Lg, F.frob_array(Lg)) == 4]
    chosen = rng.sample(range(len(lags)), min(count, len(lags)))
    B = l_basis(R)
    Y = [x_coordinates(R, y) for y in B.y]  # Y[k] = x-coordinates of y_k
    H0 = base.lattice.H
    cols = []
    for j in range(6):
        col = [R.zero] * 6
        for k in range(6):
            c = R.from_int(H0[k][j])
            if not R.is_zero(c):
                col = [R.add(a, R.mul(c, b)) for a, b in zip(col, Y[k])]
        cols.append(col)
    s0 = base.lattice.scale
    out = []
    for idx in sorted(chosen):
        Lg = lags[idx]
        gens = []
        for row in Lg:
            v = [R.zero] * 6
            for c, col in zip(row, cols):
                if c:
                    lc = R.lift(int(c))
                    v = [R.add(a, R.mul(lc, b)) for a, b in zip(v, col)]
            gens.append(v)
        gens += [[R.mulp(a, 1) for a in col] for col in cols]
        lat = Lattice(R, [[g[i] for g in gens] for i in range(6)], s0, 6)
        out.append((lat, Lg))
    return out
