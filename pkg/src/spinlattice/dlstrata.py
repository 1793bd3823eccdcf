"""Lagrangians of the nonsplit orthogonal space Omega over finite fields,
their Frobenius chains and component signs, and the Hermitian (Fermat)
model of the same strata.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exactalg import (
    FiniteField,
    fixed_points_semilinear,
    fp_combinations_in,
    fq_matmul,
    fq_nullspace,
    fq_rank,
    fq_rref,
    fq_span_key,
    smallest_nonsquare,
)
from .forms import FqForm, herm_v0, isotropic_subspaces, omega_split_form


class BudgetExceeded(RuntimeError):
    pass


class ChainNotIncreasing(ValueError):
    pass


def lagrangian_count(d: int, q: int) -> int:
    """Number of maximal isotropic subspaces of a split 2d-space over F_q."""
    out = 2
    for i in range(1, d):
        out *= q**i + 1
    return out


def omega_over(d: int, p: int, m: int = 1, nonsquare: int | None = None) -> FqForm:
    F = FiniteField(p, 2 * m, nonsquare if m == 1 else None)
    return omega_split_form(d, F)


def lagrangians(form: FqForm, budget: int = 10**7) -> np.ndarray:
    """All Lagrangians of ``form`` as canonical RREF bases (count, d, 2d)."""
    d = form.dim // 2
    expected = lagrangian_count(d, form.F.q)
    if expected > budget:
        raise BudgetExceeded(f"{expected} Lagrangians exceed the budget {budget}")
    out = isotropic_subspaces(form, d)
    if len(out) != expected:
        raise AssertionError(f"enumerated {len(out)} Lagrangians, expected {expected}")
    return out


def span_dim(F: FiniteField, *blocks) -> int:
    return fq_rank(F, np.vstack(blocks))


def intersection_dim(F: FiniteField, A, B) -> int:
    return len(A) + len(B) - span_dim(F, A, B)


def rational_phi_stable(form: FqForm, L) -> bool:
    """Phi(L) = L with L spanned by Phi-fixed vectors."""
    F = form.F
    if span_dim(F, L, form.phi(L)) != len(L):
        return False
    fixed = fixed_points_semilinear(F, form.frob_matrix)
    return len(fp_combinations_in(F, fixed, L)) == len(L)


def chain(form: FqForm, L, limit: int | None = None) -> list:
    """Bases of L, L + Phi L, L + Phi L + Phi^2 L, ... until it stabilises."""
    F = form.F
    limit = form.dim if limit is None else limit
    cur, _ = fq_rref(F, L)
    out = [cur]
    img = cur
    for _ in range(limit):
        img = form.phi(img)
        nxt, _ = fq_rref(F, np.vstack([cur, img]))
        if len(nxt) == len(cur):
            break
        out.append(nxt)
        cur = nxt
    return out


@dataclass
class XPoint:
    L: np.ndarray
    sign: int
    r: int
    chain_dims: tuple
    fixed_dims: tuple = ()  # (dim fixed(L^(d)), dim fixed(L))

    @property
    def key(self):
        return tuple(int(x) for x in self.L.ravel())


def sign_of(form: FqForm, L) -> int:
    """+1 iff dim(L meet span(e_1..e_d)) has the parity of d."""
    d = form.dim // 2
    E = np.eye(form.dim, dtype=np.int64)[:d]
    return 1 if intersection_dim(form.F, L, E) % 2 == d % 2 else -1


def stratum_and_vertex(form: FqForm, L, fixed=None):
    """(r, chain dims, (dim fixed(L^(d)), dim fixed(L))) for an X-point L.

    The difference of fixed dimensions is the type 2(r + 1) of the
    associated vertex lattice; the fixed part of L is checked to be the
    orthogonal of the fixed part of L^(d) in the rational space.
    """
    F = form.F
    d = form.dim // 2
    ch = chain(form, L)
    dims = tuple(len(c) for c in ch)
    if len(dims) < 2 or dims[1] != d + 1:
        raise ChainNotIncreasing("L + Phi(L) does not have dimension d + 1")
    if any(b != a + 1 for a, b in zip(dims, dims[1:])):
        raise ChainNotIncreasing(f"chain dimensions {dims} do not grow by one")
    r = len(dims) - 2
    if r >= d:
        raise ChainNotIncreasing("chain longer than d steps")
    top = ch[-1]
    if fixed is None:
        fixed = fixed_points_semilinear(F, form.frob_matrix)
    big = fp_combinations_in(F, fixed, top)
    small = fp_combinations_in(F, fixed, L)
    t = len(big) - len(small)
    if t != 2 * (r + 1):
        raise AssertionError(f"vertex type {t} differs from 2(r+1) = {2 * (r + 1)}")
    if len(big) + len(small) != form.dim:
        raise AssertionError("fixed parts are not mutually orthogonal complements")
    if len(small) and len(big) and np.any(fq_matmul(F, fq_matmul(F, small, form.G), big.T) != 0):
        raise AssertionError("fixed part of L is not orthogonal to the fixed part of L^(d)")
    return r, dims, (len(big), len(small))


def partner_count(form: FqForm, L) -> int:
    """Number of Lagrangians containing W = L meet Phi(L), by brute force in W^perp / W."""
    F = form.F
    P = form.phi(L)
    W = _intersection(F, L, P)
    perp = fq_nullspace(F, fq_matmul(F, W, form.G))
    # complement of W inside W^perp
    comp = []
    rows = list(W)
    for v in perp:
        if fq_rank(F, np.array(rows + [v])) > len(rows):
            rows.append(v)
            comp.append(v)
    comp = np.array(comp)
    plane = FqForm(F, form.gram_of(comp))
    lines = projective_points(F, 2)
    return int(np.count_nonzero(plane.pair(lines, lines) == 0))


def _intersection(F: FiniteField, A, B):
    """Row basis of span(A) meet span(B)."""
    M = np.vstack([A, B]).T
    N = fq_nullspace(F, M)
    if len(N) == 0:
        return np.zeros((0, A.shape[1]), dtype=np.int64)
    vecs = fq_matmul(F, np.asarray(N)[:, : len(A)], A)
    R, _ = fq_rref(F, vecs)
    return R


@dataclass
class StrataSummary:
    d: int
    q: int
    lagrangians: int
    plus: int
    minus: int
    strata: dict  # sign -> {r: count}
    rational_stable: int
    points: list = field(default_factory=list, repr=False)


def x_points(form: FqForm, budget: int = 10**7, with_points: bool = False) -> StrataSummary:
    """Enumerate X-points (dim(L + Phi L) = d + 1) with signs and strata."""
    F = form.F
    d = form.dim // 2
    Ls = lagrangians(form, budget)
    fixed = fixed_points_semilinear(F, form.frob_matrix)
    strata: dict = {1: {r: 0 for r in range(d)}, -1: {r: 0 for r in range(d)}}
    pts = []
    stable = 0
    phis = form.phi(Ls.reshape(-1, form.dim)).reshape(Ls.shape)
    for L, P in zip(Ls, phis):
        s = span_dim(F, L, P)
        if s == d:
            stable += rational_phi_stable(form, L)
            continue
        if s != d + 1:
            continue
        r, dims, fx = stratum_and_vertex(form, L, fixed)
        sg = sign_of(form, L)
        strata[sg][r] += 1
        if with_points:
            pts.append(XPoint(L, sg, r, dims, fx))
    plus = sum(strata[1].values())
    minus = sum(strata[-1].values())
    return StrataSummary(d, F.q, len(Ls), plus, minus, strata, stable, pts)


def phi_swaps_signs(form: FqForm, points) -> bool:
    """Phi maps X^+ bijectively onto X^- (and is sign-reversing)."""
    F = form.F
    keys = {fq_span_key(F, x.L): x.sign for x in points}
    images = {}
    for x in points:
        k = fq_span_key(F, form.phi(x.L))
        if keys.get(k) != -x.sign:
            return False
        images[k] = True
    return len(images) == len(points)


# ---------------------------------------------------------------------------
# the Hermitian model


def norm_root(F: FiniteField, c: int) -> int:
    """Some lambda with lambda^(p+1) = c for c in F_p^*."""
    for x in range(1, F.q):
        if F.pow(x, F.p + 1) == c:
            return x
    raise ValueError("not a norm")


def orthonormal_basis(form: FqForm) -> np.ndarray:
    """Rows u_i with <u_i, u_j> = delta_ij, by Gram-Schmidt with search."""
    F = form.F
    n = form.dim
    basis = []
    space = np.eye(n, dtype=np.int64)
    while len(basis) < n:
        # search the current orthogonal complement for an anisotropic vector
        found = None
        k = len(space)
        for code in range(1, F.q**k):
            c = np.array([(code // F.q**i) % F.q for i in range(k)], dtype=np.int64)
            v = fq_matmul(F, c[None, :], space)[0]
            val = int(form.pair(v, v))
            if val:
                found = (v, val)
                break
        if found is None:
            raise AssertionError("form is degenerate")
        v, val = found
        lam = norm_root(F, F.inv(val))
        u = np.array([F.mul(lam, int(a)) for a in v], dtype=np.int64)
        basis.append(u)
        cond = fq_matmul(F, form.conj(np.array(basis)), form.G.T)
        space = np.asarray(fq_nullspace(F, cond), dtype=np.int64).reshape(-1, n)
    return np.array(basis)


def projective_points(F: FiniteField, n: int) -> np.ndarray:
    """Normalised representatives (first nonzero coordinate 1) of P^{n-1}(F)."""
    out = []
    q = F.q
    for lead in range(n):
        k = n - lead - 1
        codes = np.arange(q**k, dtype=np.int64)
        tail = np.stack([(codes // q**i) % q for i in range(k)], axis=1) if k else np.zeros((1, 0), dtype=np.int64)
        block = np.zeros((len(tail), n), dtype=np.int64)
        block[:, lead] = 1
        block[:, lead + 1:] = tail
        out.append(block)
    return np.concatenate(out)


def _normalise(F: FiniteField, X) -> np.ndarray:
    X = np.array(X, dtype=np.int64)
    for row in X:
        nz = np.nonzero(row)[0]
        inv = F.inv(int(row[nz[0]]))
        row[:] = F.mul_t[row, inv]
    return X


def power_array(F: FiniteField, X, e: int) -> np.ndarray:
    X = np.asarray(X, dtype=np.int64)
    out = F.exp_t[(F.log_t[X] * e) % (F.q - 1)]
    return np.where(X == 0, 0, out)


def hermitian_norm_sum(F: FiniteField, X) -> np.ndarray:
    """Row-wise sum of x_i^(p+1)."""
    pw = power_array(F, X, F.p + 1)
    acc = pw[:, 0]
    for j in range(1, pw.shape[1]):
        acc = F.add_t[acc, pw[:, j]]
    return acc


@dataclass
class FermatModel:
    p: int
    F: FiniteField
    points: np.ndarray  # (count, 4)
    lines: np.ndarray  # (count, 2, 4) in identity-form coordinates
    incidence: list  # per line: sorted point indices

    def points_per_line(self):
        return sorted({len(x) for x in self.incidence})

    def lines_per_point(self):
        cnt = np.zeros(len(self.points), dtype=np.int64)
        for idx in self.incidence:
            cnt[idx] += 1
        return sorted(set(int(c) for c in cnt))


def fermat_points(F: FiniteField) -> np.ndarray:
    """Projective points of x0^(p+1) + ... + x3^(p+1) = 0 over F."""
    P = projective_points(F, 4)
    return P[hermitian_norm_sum(F, P) == 0]


def fermat_model(p: int, nonsquare: int | None = None) -> FermatModel:
    """Points over F_{p^2}, the isotropic planes of HermV0 moved to the
    identity form, and the point/line incidence."""
    ns = smallest_nonsquare(p) if nonsquare is None else nonsquare
    form = herm_v0(p, ns)
    F = form.F
    pts = fermat_points(F)
    index = {tuple(int(a) for a in r): i for i, r in enumerate(pts)}
    U = orthonormal_basis(form)
    Uinv = _inverse(F, U)
    planes = isotropic_subspaces(form, 2)
    lines = []
    incidence = []
    pairs = projective_points(F, 2)
    for B in planes:
        Bi = fq_matmul(F, B, Uinv)
        Bi, _ = fq_rref(F, Bi)
        lines.append(Bi)
        members = _normalise(F, fq_matmul(F, pairs, Bi))
        idx = sorted(index[tuple(int(a) for a in r)] for r in members)
        incidence.append(idx)
    return FermatModel(p, F, pts, np.array(lines), incidence)


def _inverse(F: FiniteField, M) -> np.ndarray:
    n = len(M)
    aug = np.hstack([np.asarray(M, dtype=np.int64), np.eye(n, dtype=np.int64)])
    R, piv = fq_rref(F, aug)
    if list(piv[:n]) != list(range(n)):
        raise AssertionError("singular change of basis")
    return R[:, n:]


def fermat_line_points(model: FermatModel, F2: FiniteField, line: int):
    """(points of the line over F2 on the surface, how many are F_{p^2}-rational)."""
    from .forms import field_embedding

    emb = field_embedding(model.F, F2)
    B = emb[model.lines[line]]
    pts = _normalise(F2, fq_matmul(F2, projective_points(F2, 2), B))
    on = pts[hermitian_norm_sum(F2, pts) == 0]
    sub = set(int(x) for x in emb)
    rational = sum(all(int(a) in sub for a in r) for r in on)
    return len(on), rational


def unitary_dl_points(p: int, signature=(1, 3), m: int = 1, nonsquare: int | None = None):
    """Points of the unitary Deligne-Lusztig variety over F_{p^(2m)}.

    V = F_{p^2}^4 with the identity Hermitian form, extended to F_{p^2m} by
    <<x a, y b>> = <x, y> a b^p, and U^perp = {y : <<U, y>> = 0}.
    Signature (1,3): lines U inside U^perp; (3,1): 3-spaces containing
    U^perp.  Returns (count, strata) for tau = the p^2-Frobenius: stratum 0
    is tau-stable U, stratum 1 has U + tau U (for lines) or U meet tau U
    (for 3-spaces) tau-stable, stratum 2 is the rest.
    """
    if signature not in ((1, 3), (3, 1)):
        raise ValueError("signature must be (1,3) or (3,1)")
    F = FiniteField(p, 2 * m, nonsquare if m == 1 else None)
    P = projective_points(F, 4)
    if signature == (1, 3):
        # x in x^perp  <=>  sum x_i x_i^p = 0
        sel = P[hermitian_norm_sum(F, P) == 0]
    else:
        # U = ker(c); U^perp is spanned by sigma^{-1}(c), which lies in U iff c . sigma^{-1}(c) = 0
        c_inv = F.frob_array(P, F.k - 1)
        prod = F.mul_t[P, c_inv]
        acc = prod[:, 0]
        for j in range(1, 4):
            acc = F.add_t[acc, prod[:, j]]
        sel = P[acc == 0]
    strata = {0: 0, 1: 0, 2: 0}
    t1 = F.frob_array(sel, 2)
    t2 = F.frob_array(t1, 2)
    for x, a, b in zip(sel, t1, t2):
        if fq_rank(F, np.vstack([x, a])) == 1:
            strata[0] += 1
        elif fq_rank(F, np.vstack([x, a, b])) == 2:
            strata[1] += 1
        else:
            strata[2] += 1
    return len(sel), strata
