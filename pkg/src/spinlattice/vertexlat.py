"""Vertex lattices in the 6-dimensional Q_p-quadratic space with Gram
diag(-p, p*D, -1, D, -1, D), their neighbours, and the incidence complex.

Lattices are written in the orthogonal y-coordinates.  The bilinear form is
b(x, y) = x^T G y with b(x, x) = Q(x); dual lattices are taken for b.
"""
from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .exactalg import (
    FiniteField,
    Lattice,
    PrecisionExhausted,
    PrimeConfig,
    ZpRing,
    fq_matmul,
    fq_nullspace,
    fq_rank,
    intersect,
    mat_from_ints,
    mat_mul,
    mat_transpose,
)
from .forms import FqForm, isotropic_subspaces


class DenominatorOverflow(ArithmeticError):
    pass


class SearchExhausted(RuntimeError):
    pass


class RadiusTooLarge(ValueError):
    pass


class NotBipartite(AssertionError):
    pass


@dataclass(frozen=True)
class NotVertex:
    reason: str

    def __bool__(self):
        return False


HASSE_REASON = "type 0 contradicts Hasse invariant"


class QuadSpace:
    """The space (L_Q^Phi, Q) over Z/p^N in y-coordinates."""

    def __init__(self, cfg: PrimeConfig):
        self.cfg = cfg
        self.p = p = cfg.p
        self.R = ZpRing(p, cfg.N)
        self.field = FiniteField(p, 1)
        d = cfg.nonsquare
        self.diag = [-p, p * d, -1, d, -1, d]
        self.G = mat_from_ints(self.R, [[self.diag[i] if i == j else 0 for j in range(6)] for i in range(6)])

    def b(self, x, y):
        R = self.R
        return sum(R.mul(R.mul(x[i], y[i]), self.G[i][i]) for i in range(6)) % R.mod

    def gram_int(self, H):
        """H^T G H for an integral basis matrix H."""
        return mat_mul(self.R, mat_mul(self.R, mat_transpose(H), self.G), H)

    def dual(self, lat: Lattice) -> Lattice:
        try:
            out = lat.dual(self.G)
        except PrecisionExhausted as exc:
            raise DenominatorOverflow(str(exc)) from exc
        if out.scale > self.cfg.B:
            raise DenominatorOverflow(f"dual needs denominator p^{out.scale} > p^{self.cfg.B}")
        return out

    def lattice(self, gens, scale: int = 0) -> Lattice:
        lat = Lattice(self.R, gens, scale, 6)
        if lat.scale > self.cfg.B:
            raise DenominatorOverflow(f"lattice needs denominator p^{lat.scale}")
        return lat


class VertexLattice:
    """A vertex lattice with its type; the dual is computed on demand."""

    __slots__ = ("space", "lattice", "type", "_dual")

    def __init__(self, space: "QuadSpace", lattice: Lattice, type: int, dual: Lattice | None = None):
        self.space, self.lattice, self.type, self._dual = space, lattice, type, dual

    @property
    def dual(self) -> Lattice:
        if self._dual is None:
            self._dual = self.space.dual(self.lattice)
        return self._dual

    @property
    def key(self) -> str:
        return self.lattice.key

    def verify(self) -> bool:
        return vertex_type(self.space, self.lattice) == self.type

    def __repr__(self):
        return f"VertexLattice(type={self.type}, key={self.key[:24]}...)"


def dual_lattice(space: QuadSpace, lat: Lattice) -> Lattice:
    return space.dual(lat)


def _scaled_form(space: QuadSpace, H, scale: int, shift: int) -> np.ndarray:
    """(p^shift * Gram of p^{-scale} H) mod p, asserting integrality."""
    R = space.R
    M = space.gram_int(H)
    e = 2 * scale - shift
    out = np.zeros((6, 6), dtype=np.int64)
    for i in range(6):
        for j in range(6):
            a = M[i][j]
            if e > 0:
                if not R.is_zero(a) and R.val(a) < e:
                    raise AssertionError("quotient form is not integral")
                a = R.divp(a, e)
            elif e < 0:
                a = R.mulp(a, -e)
            out[i, j] = a % space.p
    return out


def vertex_type(space: QuadSpace, lat: Lattice, dual: Lattice | None = None):
    """Type dim(L / L^dual) of a vertex lattice, or NotVertex with a reason."""
    d = space.dual(lat) if dual is None else dual
    if not lat.contains(d):
        if d == lat or d.volume_exp() == lat.volume_exp():
            return NotVertex(HASSE_REASON)
        return NotVertex("dual not contained in lattice")
    if not d.contains(lat.scaled(1)):
        return NotVertex("p*lattice not contained in dual")
    t = d.index_in(lat)
    if t == 0:
        return NotVertex(HASSE_REASON)
    return t


def make_vertex(space: QuadSpace, lat: Lattice) -> VertexLattice:
    d = space.dual(lat)
    t = vertex_type(space, lat, d)
    if not t:
        raise ValueError(f"not a vertex lattice: {t.reason}")
    return VertexLattice(space, lat, t, d)


# ---------------------------------------------------------------------------
# the base lattice of type 6


def _newton_isotropic(space: QuadSpace, v, c):
    """Lift v + t c to an exact zero of Q, given Q(v) = 0 mod p and b(v, c) a unit."""
    R = space.R
    q_v, b_vc, q_c = space.b(v, v), space.b(v, c), space.b(c, c)
    t = 0
    for _ in range(R.N.bit_length() + 2):
        f = (q_v + 2 * t * b_vc + t * t * q_c) % R.mod
        df = (2 * b_vc + 2 * t * q_c) % R.mod
        t = (t - f * pow(df, -1, R.mod)) % R.mod
    w = [(a + t * b) % R.mod for a, b in zip(v, c)]
    assert space.b(w, w) == 0
    return w


def _hyperbolic_pair(space: QuadSpace, basis):
    """Isotropic w, w' in span(basis) with b(w, w') = 1, by search mod p."""
    R, p = space.R, space.p
    n = len(basis)
    for coeffs in itertools.product(range(p), repeat=n):
        if not any(coeffs):
            continue
        v = [sum(c * b[i] for c, b in zip(coeffs, basis)) % R.mod for i in range(6)]
        if space.b(v, v) % p:
            continue
        partner = next((b for b in basis if space.b(v, b) % p), None)
        if partner is None:
            continue
        w = _newton_isotropic(space, v, partner)
        c = partner
        s = pow(space.b(w, c), -1, R.mod)
        c = [(s * a) % R.mod for a in c]
        h = space.b(c, c) * pow(2, -1, R.mod) % R.mod
        w2 = [(a - h * b) % R.mod for a, b in zip(c, w)]
        assert space.b(w2, w2) == 0 and space.b(w, w2) == 1
        return w, w2
    raise SearchExhausted("no isotropic vector in the unimodular part")


def _project_away(space: QuadSpace, v, w, w2):
    R = space.R
    a, b = space.b(v, w2), space.b(v, w)
    return [(x - a * y - b * z) % R.mod for x, y, z in zip(v, w, w2)]


def base_type6(space: QuadSpace) -> VertexLattice:
    """Type-6 lattice span(y1/p, y2/p, w1, w1'/p, w2, w2'/p).

    (w_i, w_i') are hyperbolic pairs splitting the unimodular part
    <-1, D, -1, D> of the y-coordinates.
    """
    R = space.R
    unit = [[1 if i == j else 0 for i in range(6)] for j in range(2, 6)]
    w1, w1p = _hyperbolic_pair(space, unit)
    rest = [_project_away(space, v, w1, w1p) for v in unit]
    w2, w2p = _hyperbolic_pair(space, rest)
    p = space.p
    cols = [
        [1, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0],
        [(p * a) % R.mod for a in w1],
        w1p,
        [(p * a) % R.mod for a in w2],
        w2p,
    ]
    lat = space.lattice([[c[i] for c in cols] for i in range(6)], 1)
    v = make_vertex(space, lat)
    if v.type != 6:
        raise SearchExhausted("constructed lattice is not of type 6")
    return v


def base_quotient_form(space: QuadSpace, v: VertexLattice) -> FqForm:
    """(L / pL, pQ mod p) for a type-6 lattice."""
    A = _scaled_form(space, v.lattice.H, v.lattice.scale, 1)
    return FqForm(space.field, A, label="pQ on L/pL")


# ---------------------------------------------------------------------------
# neighbours


def _complement(F: FiniteField, rad: np.ndarray, n: int) -> np.ndarray:
    rows = list(rad)
    comp = []
    for i in range(n):
        e = np.zeros(n, dtype=np.int64)
        e[i] = 1
        if fq_rank(F, np.array(rows + [e])) > len(rows):
            rows.append(e)
            comp.append(e)
    return np.array(comp, dtype=np.int64).reshape(len(comp), n)


def _quotient_isotropic(F: FiniteField, A: np.ndarray):
    """Radical, complement and the isotropic-subspace enumerator of A."""
    rad = fq_nullspace(F, A)
    rad = np.asarray(rad, dtype=np.int64).reshape(-1, A.shape[0])
    comp = _complement(F, rad, A.shape[0])
    if len(comp) == 0:
        return rad, comp, None
    B = fq_matmul(F, fq_matmul(F, comp, A), comp.T)
    if fq_rank(F, B) != len(comp):
        raise AssertionError("quotient form is degenerate")
    return rad, comp, FqForm(F, B)


def _neighbor(space: QuadSpace, lat: Lattice, t: int, verify: bool) -> VertexLattice:
    """Wrap a constructed neighbour; with ``verify`` its type is recomputed."""
    if not verify:
        return VertexLattice(space, lat, t)
    nb = make_vertex(space, lat)
    if nb.type != t:
        raise AssertionError(f"expected type {t}, found {nb.type}")
    return nb


def _basis_arrays(space: QuadSpace, H):
    Hn = np.array(H, dtype=np.int64)
    return Hn, (Hn * space.p) % space.R.mod


def _span_with_p(space: QuadSpace, Hn, pH, rows):
    """Generators of span(H rows^T) + p span(H), as nested lists."""
    top = (Hn @ np.asarray(rows, dtype=np.int64).T) % space.R.mod
    return np.hstack([top, pH]).tolist()


def neighbors_below(space: QuadSpace, v: VertexLattice, verify: bool = False) -> list[VertexLattice]:
    """Vertex lattices strictly inside v (coisotropic subspaces of L/L^dual)."""
    F = space.field
    H, s = v.lattice.H, v.lattice.scale
    A = _scaled_form(space, H, s, 1)
    rad, comp, form = _quotient_isotropic(F, A)
    assert len(comp) == v.type
    Hn, pH = _basis_arrays(space, H)
    out = []
    for k in range(1, v.type // 2 + 1):
        for T in isotropic_subspaces(form, k):
            Tt = np.vstack([fq_matmul(F, T, comp), rad]) if len(rad) else fq_matmul(F, T, comp)
            U = fq_nullspace(F, fq_matmul(F, Tt, A))
            lat = space.lattice(_span_with_p(space, Hn, pH, U), s)
            out.append(_neighbor(space, lat, v.type - 2 * k, verify))
    out.sort(key=lambda w: w.key)
    return out


def neighbors_above(space: QuadSpace, v: VertexLattice, verify: bool = False) -> list[VertexLattice]:
    """Vertex lattices strictly containing v (isotropic subspaces of p^-1 L^dual / L)."""
    F = space.field
    Hd, sd = v.dual.H, v.dual.scale
    # p^2 b on p^{-1} L^dual = b on L^dual, i.e. the Gram of p^{-sd} Hd
    A = _scaled_form(space, Hd, sd, 0)
    rad, comp, form = _quotient_isotropic(F, A)
    assert len(rad) == v.type
    Hn, pH = _basis_arrays(space, Hd)
    out = []
    if form is None:
        return out
    for k in range(1, len(comp) // 2 + 1):
        for T in isotropic_subspaces(form, k):
            Tt = np.vstack([fq_matmul(F, T, comp), rad])
            lat = space.lattice(_span_with_p(space, Hn, pH, Tt), sd + 1)
            nb = _neighbor(space, lat, v.type + 2 * k, verify)
            if verify and not nb.lattice.contains(v.lattice):
                raise AssertionError("superlattice does not contain the input")
            out.append(nb)
    out.sort(key=lambda w: w.key)
    return out


# ---------------------------------------------------------------------------
# the complex


MAX_RADIUS = 3


@dataclass
class BuildingComplex:
    """Nodes reached by BFS from a base lattice, with inclusion edges.

    ``below`` / ``above`` cache neighbour lists: ``below`` for every node
    closer than the radius, ``above`` for every node of type 2 or 4.  Every
    inclusion has its smaller end of type < 6, so the ``above`` lists alone
    determine all edges between reached nodes.
    """

    space: QuadSpace
    nodes: dict  # key -> VertexLattice
    edges: set  # (sub key, super key)
    radius: int
    depth: dict  # key -> BFS distance from the base
    base: str
    below: dict = field(default_factory=dict)
    above: dict = field(default_factory=dict)
    labels: dict = field(default_factory=dict)
    dims: dict = field(default_factory=dict)
    pairs: dict = field(default_factory=dict)

    def keys(self):
        return sorted(self.nodes)

    def type_counts(self):
        out: dict = {}
        for v in self.nodes.values():
            out[v.type] = out.get(v.type, 0) + 1
        return dict(sorted(out.items()))

    def superiors(self, key):
        return sorted(b for a, b in self.edges if a == key)

    def inferiors(self, key):
        return sorted(a for a, b in self.edges if b == key)

    def simplices(self):
        """All sets of at most three pairwise comparable nodes."""
        adj: dict = {k: set() for k in self.nodes}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        out = [(k,) for k in self.keys()]
        out += sorted(tuple(sorted(e)) for e in self.edges)
        tri = set()
        for a, b in self.edges:
            for c in adj[a] & adj[b]:
                tri.add(tuple(sorted((a, b, c))))
        return out + sorted(tri)

    def neighbors_below(self, key):
        if key not in self.below:
            self.below[key] = neighbors_below(self.space, self.nodes[key])
        return self.below[key]

    def neighbors_above(self, key):
        if key not in self.above:
            self.above[key] = neighbors_above(self.space, self.nodes[key])
        return self.above[key]


def build_complex(space: QuadSpace, base: VertexLattice, radius: int = 2, budget: int | None = None) -> BuildingComplex:
    """BFS closure under neighbours, with edges among all reached nodes."""
    if radius > MAX_RADIUS:
        raise RadiusTooLarge(f"radius {radius} exceeds {MAX_RADIUS}")
    cx = BuildingComplex(space, {base.key: base}, set(), radius, {base.key: 0}, base.key)
    frontier = [base]
    for r in range(1, radius + 1):
        nxt = []
        for v in frontier:
            for w in cx.neighbors_below(v.key) + cx.neighbors_above(v.key):
                if w.key not in cx.nodes:
                    cx.nodes[w.key] = w
                    cx.depth[w.key] = r
                    nxt.append(w)
                    if budget is not None and len(cx.nodes) > budget:
                        raise RadiusTooLarge(f"node budget {budget} exceeded")
        frontier = sorted(nxt, key=lambda w: w.key)
    for key in sorted(cx.nodes):
        if cx.nodes[key].type == 6:
            continue
        for w in cx.neighbors_above(key):
            if w.key in cx.nodes:
                cx.edges.add((key, w.key))
    return cx


def type6_graph(cx: BuildingComplex):
    """Adjacency of type-6 nodes through shared type-4 nodes."""
    adj = {k: set() for k, v in cx.nodes.items() if v.type == 6}
    pairs = {}
    for k in cx.keys():
        if cx.nodes[k].type != 4:
            continue
        sup = [w for w in cx.neighbors_above(k) if w.type == 6]
        if len(sup) != 2:
            raise AssertionError("type-4 node without exactly two type-6 superiors")
        a, b = sup[0].key, sup[1].key
        pairs[k] = (a, b)
        if a in adj and b in adj:
            adj[a].add(b)
            adj[b].add(a)
    return adj, pairs


def s_labeling(cx: BuildingComplex) -> BuildingComplex:
    """Hermitian relabelling: 2-colour type-6 nodes, pair up at type 4.

    The base lattice (or the smallest key of each component) receives
    Hermitian type 0; the colouring is otherwise forced by adjacency.
    """
    adj, pairs = type6_graph(cx)
    colour: dict = {}
    starts = ([cx.base] if cx.base in adj else []) + sorted(adj)
    for start in starts:
        if start in colour:
            continue
        colour[start] = 0
        queue = deque([start])
        while queue:
            a = queue.popleft()
            for b in sorted(adj[a]):
                if b not in colour:
                    colour[b] = 4 - colour[a]
                    queue.append(b)
                elif colour[b] == colour[a]:
                    raise NotBipartite(f"adjacent type-6 nodes share colour {colour[a]}")
    labels, dims = {}, {}
    for k, v in cx.nodes.items():
        if v.type == 6:
            labels[k] = f"herm{colour[k]}"
            dims[k] = 2
        elif v.type == 4:
            labels[k] = "pair"
            dims[k] = 1
        else:
            labels[k] = "herm2"
            dims[k] = 0
    cx.labels, cx.dims, cx.pairs = labels, dims, pairs
    return cx


def duality_violations(cx: BuildingComplex, keys=None) -> list:
    """Pairs breaking: w in below(v) <=> v in above(w), over reached nodes."""
    keys = cx.keys() if keys is None else keys
    bad = []
    for k in keys:
        v = cx.nodes[k]
        for w in cx.neighbors_below(k):
            if w.key in cx.nodes and k not in {u.key for u in cx.neighbors_above(w.key)}:
                bad.append((w.key, k))
        if v.type < 6:
            for w in cx.neighbors_above(k):
                if w.key in cx.nodes and k not in {u.key for u in cx.neighbors_below(w.key)}:
                    bad.append((k, w.key))
    return bad


def intersection_type(space: QuadSpace, a: VertexLattice, b: VertexLattice):
    """Type of the intersection lattice (or NotVertex)."""
    lat = intersect(a.lattice, b.lattice, space.G)
    assert a.lattice.contains(lat) and b.lattice.contains(lat)
    return vertex_type(space, lat)


# ---------------------------------------------------------------------------
# isometries


def reflection_matrix(space: QuadSpace, v_int):
    """p * s_v for v = v_int / p with p*Q(v) a unit; returns (matrix, scale 1)."""
    R = space.R
    q = space.b(v_int, v_int)  # = p^2 Q(v)
    if R.val(q) != 1:
        raise ValueError("reflection vector must have pQ(v) a unit")
    u = R.divp(q, 1)
    c = (2 * pow(u, -1, R.mod)) % R.mod
    Gv = [space.G[i][i] * v_int[i] % R.mod for i in range(6)]
    M = [[((space.p if i == j else 0) - c * v_int[i] * Gv[j]) % R.mod for j in range(6)] for i in range(6)]
    return M


def random_stabilizing_isometry(space: QuadSpace, base: VertexLattice, rng: random.Random, n_refl: int = 2):
    """Product of reflections in vectors of the type-6 base preserving it."""
    R = space.R
    H, s = base.lattice.H, base.lattice.scale
    assert s == 1
    mats = []
    while len(mats) < n_refl:
        c = [rng.randrange(space.p) for _ in range(6)]
        v_int = [sum(H[i][j] * c[j] for j in range(6)) % R.mod for i in range(6)]
        q = space.b(v_int, v_int)
        if R.is_zero(q) or R.val(q) != 1:
            continue
        mats.append(reflection_matrix(space, v_int))
    M = mats[0]
    for A in mats[1:]:
        M = mat_mul(R, A, M)
    return M, len(mats)


def apply_isometry(space: QuadSpace, M, scale: int, lat: Lattice) -> Lattice:
    return lat.transform(M, scale)
