"""Quadratic and Hermitian spaces, their local invariants, and isotropic
subspace enumeration over finite fields."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exactalg import (
    FiniteField,
    PrimeConfig,
    fixed_points_semilinear,
    fq_dot,
    fq_matmul,
    fq_nullspace,
    fq_rank,
    legendre,
    p_valuation,
)

HASSE_CONVENTION = "product over i<j of (a_i, a_j) on a diagonalisation"


class DegenerateForm(ValueError):
    pass


# ---------------------------------------------------------------------------
# Q_p square classes and the Hilbert symbol (p odd)


def _split(x, p: int) -> tuple[int, int]:
    """Write a nonzero rational as p^k * u and return (k, u mod p)."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("zero has no square class")
    k = p_valuation(x.numerator, p) if x.numerator % p == 0 else 0
    k -= p_valuation(x.denominator, p) if x.denominator % p == 0 else 0
    u = x / Fraction(p) ** k
    return k, (u.numerator * pow(u.denominator, -1, p)) % p


def square_class(x, p: int) -> tuple[int, int]:
    """Class of x in Q_p^x / squares as (k mod 2, 1 if the unit part is a nonsquare)."""
    k, u = _split(x, p)
    return k % 2, 0 if legendre(u, p) == 1 else 1


def class_name(cls: tuple[int, int]) -> str:
    return {(0, 0): "1", (0, 1): "D", (1, 0): "p", (1, 1): "pD"}[cls]


def class_rep(cls: tuple[int, int], p: int, nonsquare: int) -> int:
    return p ** cls[0] * nonsquare ** cls[1]


def hilbert_symbol(a, b, p: int) -> int:
    """Hilbert symbol (a, b) over Q_p for odd p."""
    if p == 2:
        raise ValueError("only odd p is supported")
    ka, ua = _split(a, p)
    kb, ub = _split(b, p)
    eps = (p - 1) // 2
    s = (-1) ** (ka * kb * eps)
    s *= legendre(ua, p) ** kb
    s *= legendre(ub, p) ** ka
    return s


def conic_solvable(a, b, p: int) -> bool:
    """Brute-force oracle: does z^2 = a x^2 + b y^2 have a nonzero Q_p solution?

    a and b are first reduced to square-class representatives with valuation
    0 or 1.  A primitive solution modulo p^3 whose gradient has valuation at
    most 1 lifts by Hensel's lemma, and every true solution gives one.
    """
    ka, ua = _split(a, p)
    kb, ub = _split(b, p)
    A = p ** (ka % 2) * ua
    Bv = p ** (kb % 2) * ub
    mod = p**3
    for x in range(mod):
        for y in range(mod):
            rhs = (A * x * x + Bv * y * y) % mod
            for z in range(mod):
                if x % p == 0 and y % p == 0 and z % p == 0:
                    continue
                if (z * z - rhs) % mod:
                    continue
                grads = [2 * z, 2 * A * x, 2 * Bv * y]
                v = min(p_valuation(g, p) if g % mod else 3 for g in grads)
                if v <= 1:
                    return True
    return False


@dataclass
class GramSpace:
    """A Gram matrix together with the ring it lives over.

    ``base`` is one of ``"Qp"`` (entries are Fractions), ``"Fq"`` (codes in
    ``field``), ``"Herm-Fq"`` (Hermitian for x -> x^sqrt(q)) or ``"Herm-E"``.
    """

    base: str
    gram: object
    p: int
    field: FiniteField | None = None
    nonsquare: int | None = None
    label: str = ""

    @property
    def dim(self) -> int:
        return len(self.gram)


def qp_space(gram, p: int, nonsquare: int | None = None, label: str = "") -> GramSpace:
    g = [[Fraction(x) for x in row] for row in gram]
    for i in range(len(g)):
        for j in range(len(g)):
            if g[i][j] != g[j][i]:
                raise ValueError("Gram matrix is not symmetric")
    return GramSpace("Qp", g, p, nonsquare=nonsquare, label=label)


def diagonalize_rational(gram) -> list[Fraction]:
    """Diagonal entries of a congruent diagonal form (symmetric elimination over Q)."""
    A = [[Fraction(x) for x in row] for row in gram]
    n = len(A)

    def add_multiple(i, t, c):
        # e_i <- e_i + c e_t, applied to rows and columns
        A[i] = [x + c * y for x, y in zip(A[i], A[t])]
        for row in A:
            row[i] += c * row[t]

    for t in range(n):
        if A[t][t] == 0:
            j = next((j for j in range(t + 1, n) if A[j][j] != 0), None)
            if j is not None:
                A[t], A[j] = A[j], A[t]
                for row in A:
                    row[t], row[j] = row[j], row[t]
            else:
                j = next((j for j in range(t + 1, n) if A[t][j] != 0), None)
                if j is None:
                    raise DegenerateForm("Gram matrix is singular")
                add_multiple(t, j, Fraction(1))
        d = A[t][t]
        for i in range(t + 1, n):
            if A[i][t]:
                add_multiple(i, t, -A[i][t] / d)
    return [A[i][i] for i in range(n)]


def hasse_of_diagonal(diag, p: int) -> int:
    h = 1
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            h *= hilbert_symbol(diag[i], diag[j], p)
    return h


@dataclass(frozen=True)
class QpInvariants:
    diagonal: tuple
    det_class: tuple[int, int]
    hasse: int

    @property
    def det_name(self) -> str:
        return class_name(self.det_class)


def qp_invariants(space: GramSpace) -> QpInvariants:
    if space.base != "Qp":
        raise ValueError("qp_invariants needs a Q_p space")
    diag = diagonalize_rational(space.gram)
    if any(d == 0 for d in diag):
        raise DegenerateForm("degenerate form")
    det = Fraction(1)
    for d in diag:
        det *= d
    return QpInvariants(tuple(diag), square_class(det, space.p), hasse_of_diagonal(diag, space.p))


def lphi_gram(cfg: PrimeConfig) -> list[list[int]]:
    """Diagonal Gram Q(y_i) = [y_i, y_i]/2 of the rational six-dimensional space."""
    p, D = cfg.p, cfg.nonsquare
    d = [-p, p * D, -1, D, -1, D]
    return [[d[i] if i == j else 0 for j in range(6)] for i in range(6)]


# ---------------------------------------------------------------------------
# spaces over finite fields


@dataclass
class FqForm:
    """Symmetric bilinear (``hermitian=False``) or Hermitian form over F_q.

    The pairing of row vectors x, y is x G conj(y)^T, where conj is the
    identity for bilinear forms and x -> x^sqrt(q) for Hermitian ones.  A
    semilinear Frobenius Phi(x) = A sigma(x) may be attached.
    """

    F: FiniteField
    G: np.ndarray
    hermitian: bool = False
    frob_matrix: np.ndarray | None = None
    label: str = ""

    @property
    def dim(self) -> int:
        return self.G.shape[0]

    def conj(self, X):
        if not self.hermitian:
            return X
        return self.F.frob_array(X, self.F.k // 2)

    def pair(self, X, Y):
        """Row-wise pairing of broadcastable arrays of vectors."""
        XG = fq_matmul(self.F, np.atleast_2d(X), self.G)
        if np.ndim(X) == 1:
            XG = XG[0]
        return fq_dot(self.F, XG, self.conj(np.asarray(Y)))

    def gram_of(self, basis):
        B = np.atleast_2d(np.asarray(basis, dtype=np.int64))
        return fq_matmul(self.F, fq_matmul(self.F, B, self.G), self.conj(B).T)

    def phi(self, X):
        """Apply Phi = A o sigma to row vectors."""
        X = np.atleast_2d(np.asarray(X, dtype=np.int64))
        Y = self.F.frob_array(X)
        if self.frob_matrix is None:
            return Y
        return fq_matmul(self.F, Y, self.frob_matrix.T)

    def base_change(self, F2: FiniteField) -> "FqForm":
        """Same Gram read in a larger field with compatible embedding."""
        emb = field_embedding(self.F, F2)
        A = None if self.frob_matrix is None else emb[self.frob_matrix]
        return FqForm(F2, emb[self.G], self.hermitian, A, self.label)


def field_embedding(F1: FiniteField, F2: FiniteField) -> np.ndarray:
    """Codes in F2 of the elements of F1 (an embedding fixing F_p).

    The generator of F1's modulus is sent to the smallest root of that
    modulus in F2, which makes the choice deterministic.
    """
    if F2.k % F1.k or F1.p != F2.p:
        raise ValueError("no embedding")
    if F1 is F2:
        return np.arange(F1.q)
    f = F1.modulus
    root = None
    for x in range(F2.q):
        acc = 0
        for c in reversed(f):
            acc = F2.add(F2.mul(acc, x), c)
        if acc == 0:
            root = x
            break
    powers = [1]
    for _ in range(1, F1.k):
        powers.append(F2.mul(powers[-1], root))
    out = np.zeros(F1.q, dtype=np.int64)
    for code in range(F1.q):
        acc = 0
        for i, c in enumerate(F1.digits[code]):
            if c:
                acc = F2.add(acc, F2.mul(int(c), powers[i]))
        out[code] = acc
    return out


def omega_split_form(d: int, F: FiniteField) -> FqForm:
    """Omega tensor F_q: basis e_1..e_d, f_1..f_d, [e_i, f_j] = delta_ij,
    with Frobenius fixing e_i, f_i for i < d and swapping e_d and f_d."""
    n = 2 * d
    G = np.zeros((n, n), dtype=np.int64)
    for i in range(d):
        G[i, d + i] = G[d + i, i] = 1
    A = np.eye(n, dtype=np.int64)
    A[d - 1, d - 1] = A[2 * d - 1, 2 * d - 1] = 0
    A[d - 1, 2 * d - 1] = A[2 * d - 1, d - 1] = 1
    return FqForm(F, G, False, A, f"Omega({d})")


def omega_nonsplit(d: int, p: int, nonsquare: int | None = None) -> FqForm:
    """The F_p-rational points of Omega with their (nonsplit) form.

    The basis is computed as the fixed points of the Frobenius on
    Omega tensor F_{p^2}; its Gram matrix lands in F_p.
    """
    F2 = FiniteField(p, 2, nonsquare)
    big = omega_split_form(d, F2)
    R = fixed_points_semilinear(F2, big.frob_matrix)
    G2 = big.gram_of(R)
    # Gram entries are fixed by Frobenius, hence lie in F_p (codes < p)
    if np.any(G2 >= p):
        raise AssertionError("rational Gram matrix left F_p")
    F1 = FiniteField(p, 1, nonsquare)
    form = FqForm(F1, G2.copy(), False, None, f"OmegaNonsplit({d})")
    form.rational_basis = R  # type: ignore[attr-defined]
    return form


def herm_v0(p: int, nonsquare: int | None = None) -> FqForm:
    """F_{p^2}^4 with <e_i, e_{5-j}> = delta_ij."""
    F = FiniteField(p, 2, nonsquare)
    G = np.zeros((4, 4), dtype=np.int64)
    for i in range(4):
        G[i, 3 - i] = 1
    return FqForm(F, G, True, None, "HermV0")


def herm_identity(p: int, nonsquare: int | None = None) -> FqForm:
    F = FiniteField(p, 2, nonsquare)
    return FqForm(F, np.eye(4, dtype=np.int64), True, None, "HermIdentity")


def hyperbolic_plane(F: FiniteField) -> FqForm:
    return FqForm(F, np.array([[0, 1], [1, 0]], dtype=np.int64), False, None, "H")


# ---------------------------------------------------------------------------
# isotropic subspace enumeration


def _all_vectors(F: FiniteField, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((F.q,) * k).reshape(k, -1).T
    return grids.astype(np.int64)


def isotropic_subspaces(form: FqForm, r: int, limit: int | None = None) -> np.ndarray:
    """All totally isotropic r-dimensional subspaces as canonical RREF bases.

    Returns an array of shape (count, r, n) sorted lexicographically by the
    flattened basis codes.  For bilinear forms "isotropic" means the bilinear
    form vanishes, which in odd characteristic is the same as the quadratic
    form vanishing.
    """
    F, n = form.F, form.dim
    if r == 0:
        return np.zeros((1, 0, n), dtype=np.int64)
    if 2 * r > n:
        return np.zeros((0, r, n), dtype=np.int64)
    found = []
    total = 0
    for piv in itertools.combinations(range(n), r):
        parts = [np.zeros((1, 0, n), dtype=np.int64)]
        cur = parts[0]
        for i, c in enumerate(piv):
            free = [j for j in range(c + 1, n) if j not in piv]
            vals = _all_vectors(F, len(free))
            cand = np.zeros((vals.shape[0], n), dtype=np.int64)
            cand[:, c] = 1
            if free:
                cand[:, free] = vals
            self_ok = form.pair(cand, cand) == 0
            cand = cand[self_ok]
            if cand.shape[0] == 0:
                cur = np.zeros((0, i + 1, n), dtype=np.int64)
                break
            nxt = []
            for partial in cur:
                ok = np.ones(cand.shape[0], dtype=bool)
                for prev in partial:
                    ok &= form.pair(np.broadcast_to(prev, cand.shape), cand) == 0
                if ok.any():
                    keep = cand[ok]
                    block = np.empty((keep.shape[0], i + 1, n), dtype=np.int64)
                    block[:, :i, :] = partial
                    block[:, i, :] = keep
                    nxt.append(block)
            cur = np.concatenate(nxt) if nxt else np.zeros((0, i + 1, n), dtype=np.int64)
            if cur.shape[0] == 0:
                break
        if cur.shape[0]:
            found.append(cur)
            total += cur.shape[0]
            if limit is not None and total >= limit:
                break
    if not found:
        return np.zeros((0, r, n), dtype=np.int64)
    allsp = np.concatenate(found)
    flat = allsp.reshape(allsp.shape[0], -1)
    order = np.lexsort(flat.T[::-1])
    return allsp[order]


def isotropic_vectors_bruteforce(form: FqForm) -> int:
    """Number of isotropic lines by scanning every vector (oracle)."""
    V = _all_vectors(form.F, form.dim)
    vals = form.pair(V, V)
    nz = np.count_nonzero(vals[1:] == 0)
    return nz // (form.F.q - 1)


def _vectors_range(F: FiniteField, n: int, start: int, stop: int) -> np.ndarray:
    codes = np.arange(start, stop, dtype=np.int64)
    out = np.empty((codes.size, n), dtype=np.int64)
    for i in range(n - 1, -1, -1):
        out[:, i] = codes % F.q
        codes //= F.q
    return out


def _first_isotropic(form: FqForm, basis, chunk: int = 1 << 15):
    """First nonzero isotropic vector in the span of ``basis`` (scan order)."""
    F = form.F
    k = basis.shape[0]
    total = F.q**k
    for start in range(1, total, chunk):
        coeffs = _vectors_range(F, k, start, min(total, start + chunk))
        vecs = fq_matmul(F, coeffs, basis)
        hit = np.nonzero(form.pair(vecs, vecs) == 0)[0]
        if hit.size:
            return vecs[hit[0]]
    return None


def witt_decomposition(form: FqForm):
    """Split off hyperbolic planes one isotropic vector at a time.

    Returns (isotropic basis U of maximal dimension, basis of the
    anisotropic kernel).  Each isotropic vector is found by an exhaustive
    scan of the current complement.
    """
    F = form.F
    if fq_rank(F, form.G) < form.dim:
        raise DegenerateForm("degenerate form")
    W = np.eye(form.dim, dtype=np.int64)
    iso = []
    while W.shape[0] >= 2:
        v = _first_isotropic(form, W)
        if v is None:
            break
        vals = form.pair(np.broadcast_to(v, W.shape), W)
        j = int(np.nonzero(vals)[0][0])
        w = W[j]
        iso.append(v)
        plane = np.vstack([v, w])
        # orthogonal complement of the plane inside span(W)
        C = fq_matmul(F, fq_matmul(F, W, form.G), form.conj(plane).T)
        coeff = fq_nullspace(F, C.T)
        W = fq_matmul(F, coeff, W) if coeff.shape[0] else np.zeros((0, form.dim), dtype=np.int64)
    U = np.array(iso, dtype=np.int64).reshape(len(iso), form.dim)
    return U, W


def witt_index(form: FqForm) -> int:
    """Maximal dimension of a totally isotropic subspace."""
    return witt_decomposition(form)[0].shape[0]


def anisotropic_kernel_ok(form: FqForm) -> bool:
    """dim = 2 * index + dim(kernel), with the kernel checked anisotropic by
    scanning all of its vectors."""
    U, K = witt_decomposition(form)
    if form.dim != 2 * U.shape[0] + K.shape[0]:
        return False
    if K.shape[0] == 0:
        return True
    if form.F.q ** K.shape[0] > 1 << 22:
        raise ValueError("kernel too large to scan")
    return _first_isotropic(form, K) is None
