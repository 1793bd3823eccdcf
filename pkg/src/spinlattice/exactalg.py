"""Exact arithmetic over finite fields and truncated unramified Witt rings.

Three coefficient systems live here:

* ``FiniteField``: F_q with q = p^k, elements encoded as integers
  ``sum(c_i * p**i)`` and all arithmetic done through lookup tables.
* ``ZpRing``: Z/p^N with plain integers.
* ``WittRing``: W(F_{p^k})/p^N realised as (Z/p^N)[t]/(f) for a monic lift f
  of the residue field modulus, with the Frobenius lift acting on t.

Both p-adic rings share one small duck-typed interface, so the normal-form and
lattice routines below work over either of them.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class PrecisionExhausted(ArithmeticError):
    """A valuation could not be certified below the working precision."""


class SingularOperator(ArithmeticError):
    pass


class ConfigInvalid(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, math.isqrt(n) + 1):
        if n % d == 0:
            return False
    return True


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def smallest_nonsquare(p: int) -> int:
    for a in range(2, p):
        if legendre(a, p) == -1:
            return a
    raise ConfigInvalid(f"no nonsquare modulo {p}")


def p_valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class PrimeConfig:
    """Prime, nonsquare, extension degree, precision and denominator bound."""

    p: int = 3
    nonsquare: int | None = None
    m: int = 1
    N: int = 12
    B: int = 4

    def __post_init__(self):
        if self.nonsquare is None:
            if not (isinstance(self.p, int) and self.p > 2 and is_prime(self.p)):
                raise ConfigInvalid(f"p must be an odd prime, got {self.p!r}")
            object.__setattr__(self, "nonsquare", smallest_nonsquare(self.p))
        self.validate()

    def validate(self) -> None:
        p = self.p
        if not (isinstance(p, int) and p > 2 and is_prime(p)):
            raise ConfigInvalid(f"p must be an odd prime, got {p!r}")
        if legendre(self.nonsquare, p) != -1:
            raise ConfigInvalid(f"{self.nonsquare} is not a nonsquare unit mod {p}")
        if self.m < 1:
            raise ConfigInvalid("extension degree m must be at least 1")
        if self.B < 0:
            raise ConfigInvalid("denominator bound B must be nonnegative")
        if self.N < 2 * self.B + 4:
            raise ConfigInvalid(f"precision N={self.N} below 2B+4={2 * self.B + 4}")

    def with_precision(self, N: int) -> "PrimeConfig":
        return PrimeConfig(self.p, self.nonsquare, self.m, N, self.B)

    def with_m(self, m: int) -> "PrimeConfig":
        return PrimeConfig(self.p, self.nonsquare, m, self.N, self.B)


# ---------------------------------------------------------------------------
# polynomials over F_p (coefficient lists, lowest degree first)


def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], f: list[int], p: int) -> list[int]:
    a = [x % p for x in a]
    _poly_trim(a)
    df = len(f) - 1
    inv_lead = pow(f[-1], -1, p)
    while len(a) - 1 >= df:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - df
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % p
        _poly_trim(a)
    return a


def _poly_mulmod(a, b, f, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _poly_mod(out, f, p)


def _poly_powmod(a, e, f, p):
    result = [1]
    base = _poly_mod(list(a), f, p)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, f, p)
        base = _poly_mulmod(base, base, f, p)
        e >>= 1
    return result


def _poly_gcd(a, b, p):
    a = _poly_trim([x % p for x in a])
    b = _poly_trim([x % p for x in b])
    while b:
        a, b = b, _poly_mod(a, b, p)
    return a


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Rabin's test for a monic polynomial over F_p."""
    f = [c % p for c in f]
    n = len(f) - 1
    if n < 1:
        return False
    x = [0, 1]
    # x^(p^n) == x mod f
    h = x
    for _ in range(n):
        h = _poly_powmod(h, p, f, p)
    if _poly_mod([a - b for a, b in zip(h + [0] * 2, x + [0] * len(h))], f, p):
        return False
    for q in range(2, n + 1):
        if n % q or not is_prime(q):
            continue
        h = x
        for _ in range(n // q):
            h = _poly_powmod(h, p, f, p)
        diff = [0] * max(len(h), 2)
        for i, c in enumerate(h):
            diff[i] += c
        diff[1] -= 1
        g = _poly_gcd(f, diff, p)
        if len(g) > 1:
            return False
    return True


def residue_modulus(p: int, k: int, nonsquare: int) -> list[int]:
    """Monic irreducible of degree k over F_p used for F_{p^k}.

    Degree 2 uses t^2 - nonsquare so that t reduces the chosen square root.
    Other degrees take the lexicographically first irreducible.
    """
    if k == 1:
        return [0, 1]
    if k == 2:
        return [(-nonsquare) % p, 0, 1]
    for code in range(p**k):
        coeffs = [(code // p**i) % p for i in range(k)] + [1]
        if coeffs[0] and is_irreducible(coeffs, p):
            return coeffs
    raise ConfigInvalid(f"no irreducible of degree {k} mod {p}")


# ---------------------------------------------------------------------------
# finite fields


class FiniteField:
    """F_{p^k} with elements encoded as base-p integers and table arithmetic."""

    _cache: dict = {}

    def __new__(cls, p: int, k: int, nonsquare: int | None = None):
        ns = smallest_nonsquare(p) if nonsquare is None else nonsquare
        key = (p, k, ns)
        if key not in cls._cache:
            obj = super().__new__(cls)
            obj._build(p, k, ns)
            cls._cache[key] = obj
        return cls._cache[key]

    def __getnewargs__(self):
        return (self.p, self.k, self.nonsquare)

    def _build(self, p: int, k: int, ns: int) -> None:
        self.p, self.k, self.nonsquare = p, k, ns
        self.q = q = p**k
        self.modulus = residue_modulus(p, k, ns)
        digits = np.array([[(c // p**i) % p for i in range(k)] for c in range(q)], dtype=np.int64)
        self.digits = digits
        weights = p ** np.arange(k, dtype=np.int64)
        self._weights = weights
        self.add_t = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
        self.sub_t = ((digits[:, None, :] - digits[None, :, :]) % p) @ weights
        self.neg_t = ((-digits) % p) @ weights

        def mulpoly(a, b):
            r = _poly_mulmod(list(digits[a]), list(digits[b]), self.modulus, p)
            return sum(int(c) * p**i for i, c in enumerate(r))

        # primitive element and log tables
        gen = None
        for g in range(1, q):
            x, order = 1, 0
            while True:
                x = mulpoly(x, g)
                order += 1
                if x == 1:
                    break
            if order == q - 1:
                gen = g
                break
        exp = np.zeros(2 * (q - 1), dtype=np.int64)
        x = 1
        for i in range(q - 1):
            exp[i] = x
            exp[i + q - 1] = x
            x = mulpoly(x, gen)
        log = np.zeros(q, dtype=np.int64)
        log[exp[: q - 1]] = np.arange(q - 1)
        self.generator = gen
        self.exp_t, self.log_t = exp, log
        la = log[:, None] + log[None, :]
        mul = exp[la]
        mul[0, :] = 0
        mul[:, 0] = 0
        self.mul_t = mul
        inv = np.zeros(q, dtype=np.int64)
        inv[1:] = exp[(q - 1 - log[1:]) % (q - 1)]
        self.inv_t = inv
        frob = np.zeros(q, dtype=np.int64)
        frob[1:] = exp[(log[1:] * p) % (q - 1)]
        self.frob_t = frob
        # F_p embedding: the integer a < p is already the code of a
        self.prime_elems = np.arange(p)

    # scalar operations
    def add(self, a, b):
        return int(self.add_t[a, b])

    def sub(self, a, b):
        return int(self.sub_t[a, b])

    def mul(self, a, b):
        return int(self.mul_t[a, b])

    def neg(self, a):
        return int(self.neg_t[a])

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero in F_q")
        return int(self.inv_t[a])

    def pow(self, a, e: int):
        if a == 0:
            return 0 if e > 0 else 1
        return int(self.exp_t[(int(self.log_t[a]) * e) % (self.q - 1)])

    def frob(self, a, times: int = 1):
        return self.pow(a, self.p ** (times % self.k))

    def from_int(self, n: int) -> int:
        return n % self.p

    def frob_array(self, arr, times: int = 1):
        arr = np.asarray(arr)
        for _ in range(times % self.k):
            arr = self.frob_t[arr]
        return arr

    def is_square(self, a) -> bool:
        return a == 0 or int(self.log_t[a]) % 2 == 0

    def sqrt(self, a):
        if a == 0:
            return 0
        la = int(self.log_t[a])
        if la % 2:
            raise ValueError("not a square")
        r1 = int(self.exp_t[la // 2])
        r2 = self.neg(r1)
        return min(r1, r2)

    def subfield(self, k: int) -> np.ndarray:
        """Codes of the elements of the subfield F_{p^k}."""
        if self.k % k:
            raise ValueError("not a subfield")
        e = self.p**k
        return np.array([x for x in range(self.q) if self.pow(x, e) == x], dtype=np.int64)

    def __repr__(self):
        return f"FiniteField({self.p}^{self.k})"


# vectorised F_q linear algebra on numpy int arrays of codes


def fq_dot(F: FiniteField, a, b):
    """Sum of products along the last axis."""
    prod = F.mul_t[a, b]
    acc = prod[..., 0]
    for i in range(1, prod.shape[-1]):
        acc = F.add_t[acc, prod[..., i]]
    return acc


def fq_matmul(F: FiniteField, A, B):
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for k in range(A.shape[1]):
        out = F.add_t[out, F.mul_t[A[:, k][:, None], B[k, :][None, :]]]
    return out


def fq_rref(F: FiniteField, M):
    """Reduced row echelon form; returns (R, pivot columns). Zero rows dropped."""
    R = np.array(M, dtype=np.int64, copy=True)
    if R.ndim == 1:
        R = R[None, :]
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            R[[r, i]] = R[[i, r]]
        R[r] = F.mul_t[F.inv_t[R[r, c]], R[r]]
        for j in range(rows):
            if j != r and R[j, c]:
                R[j] = F.sub_t[R[j], F.mul_t[R[j, c], R[r]]]
        pivots.append(c)
        r += 1
    return R[:r], pivots


def fq_rank(F: FiniteField, M) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return len(fq_rref(F, M)[1])


def fq_nullspace(F: FiniteField, M):
    """Basis (rows) of {x : M x = 0}."""
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    R, piv = fq_rref(F, M)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = np.zeros(n, dtype=np.int64)
        v[f] = 1
        for i, pc in enumerate(piv):
            v[pc] = F.neg_t[R[i, f]]
        basis.append(v)
    if not basis:
        return np.zeros((0, n), dtype=np.int64)
    return np.array(basis, dtype=np.int64)


def fq_span_key(F: FiniteField, M) -> tuple:
    R, _ = fq_rref(F, M)
    return tuple(int(x) for x in R.ravel())


def fq_to_fp_matrix(F: FiniteField, a: int) -> np.ndarray:
    """Matrix of multiplication by a on F_q = F_p^k (columns = images of t^j)."""
    k, p = F.k, F.p
    cols = [F.digits[F.mul(a, p**j)] for j in range(k)]
    return np.array(cols, dtype=np.int64).T


def fp_nullspace(M, p: int) -> np.ndarray:
    return fq_nullspace(FiniteField(p, 1), np.asarray(M, dtype=np.int64) % p)


def fixed_points_semilinear(F: FiniteField, A) -> np.ndarray:
    """F_p-basis (rows, F_q codes) of {x in F_q^n : A sigma(x) = x}."""
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[0]
    if fq_rank(F, A) < n:
        raise SingularOperator("semilinear operator is not invertible")
    k, p = F.k, F.p
    sig = np.array([F.digits[F.frob(p**j)] for j in range(k)], dtype=np.int64).T
    big = np.zeros((n * k, n * k), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            blk = fq_to_fp_matrix(F, int(A[i, j])) @ sig
            if i == j:
                blk = blk - np.eye(k, dtype=np.int64)
            big[i * k:(i + 1) * k, j * k:(j + 1) * k] = blk % p
    ns = fp_nullspace(big, p)
    w = F._weights
    out = [[int(v[i * k:(i + 1) * k] @ w) for i in range(n)] for v in ns]
    return np.array(out, dtype=np.int64).reshape(len(out), n)


def fp_combinations_in(F: FiniteField, vectors, subspace) -> np.ndarray:
    """F_p-basis of coefficient vectors c with sum c_i v_i inside ``subspace``.

    ``vectors`` are rows over F_q, ``subspace`` a row basis over F_q.  Returned
    rows are the resulting F_q vectors (already combined).
    """
    V = np.asarray(vectors, dtype=np.int64)
    S = np.asarray(subspace, dtype=np.int64)
    n = V.shape[1]
    if S.shape[0] == 0:
        ann = np.eye(n, dtype=np.int64)
    else:
        ann = fq_nullspace(F, S)
    if ann.shape[0] == 0:
        return V.copy()
    C = fq_matmul(F, V, ann.T)  # len(V) x len(ann)
    p = F.p
    big = np.concatenate([F.digits[C[:, j]] for j in range(C.shape[1])], axis=1)
    ns = fp_nullspace(big.T, p)
    if ns.shape[0] == 0:
        return np.zeros((0, n), dtype=np.int64)
    return fq_matmul(F, ns, V)


# ---------------------------------------------------------------------------
# p-adic coefficient rings


class ZpRing:
    """Z/p^N with integer elements; sigma is the identity."""

    degree = 1

    def __init__(self, p: int, N: int):
        self.p, self.N = p, N
        self.mod = p**N
        self.zero, self.one = 0, 1
        self.field = FiniteField(p, 1)

    def from_int(self, n: int) -> int:
        return n % self.mod

    def add(self, a, b):
        return (a + b) % self.mod

    def sub(self, a, b):
        return (a - b) % self.mod

    def neg(self, a):
        return (-a) % self.mod

    def mul(self, a, b):
        return a * b % self.mod

    def scal(self, n: int, a):
        return n * a % self.mod

    def is_zero(self, a) -> bool:
        return a % self.mod == 0

    def val(self, a) -> int:
        a %= self.mod
        if a == 0:
            return self.N
        v = 0
        while a % self.p == 0:
            a //= self.p
            v += 1
        return v

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("not a unit")
        return pow(a, -1, self.mod)

    def divp(self, a, k: int):
        # exact division by p^k; the top k digits become 0
        return (a % self.mod) // self.p**k

    def split(self, a, k: int):
        pk = self.p**k
        return a // pk, a % pk

    def mulp(self, a, k: int):
        return a * self.p**k % self.mod

    def sigma(self, a):
        return a

    def sigma_inv(self, a):
        return a

    def residue(self, a) -> int:
        return a % self.p

    def lift(self, code: int):
        return code

    def random(self, rng: random.Random):
        return rng.randrange(self.mod)

    def random_unit(self, rng: random.Random):
        while True:
            a = rng.randrange(self.mod)
            if a % self.p:
                return a

    def key(self, a) -> str:
        return str(a)

    def reduce_to(self, a, N: int):
        return a % self.p**N


class WittRing:
    """W(F_{p^k})/p^N as (Z/p^N)[t]/(f) with the Frobenius lift sigma."""

    _cache: dict = {}

    def __new__(cls, p: int, N: int, k: int = 2, nonsquare: int | None = None):
        ns = smallest_nonsquare(p) if nonsquare is None else nonsquare
        key = (p, N, k, ns)
        if key not in cls._cache:
            obj = super().__new__(cls)
            obj._build(p, N, k, ns)
            cls._cache[key] = obj
        return cls._cache[key]

    def __getnewargs__(self):
        return (self.p, self.N, self.degree, self.nonsquare)

    @classmethod
    def from_config(cls, cfg: PrimeConfig) -> "WittRing":
        return cls(cfg.p, cfg.N, 2 * cfg.m, cfg.nonsquare)

    def _build(self, p, N, k, ns):
        self.p, self.N, self.degree, self.nonsquare = p, N, k, ns
        self.mod = p**N
        self.field = FiniteField(p, k, ns)
        f = self.field.modulus  # monic, coefficients in [0, p)
        self.f = list(f)
        self.zero = (0,) * k
        self.one = (1,) + (0,) * (k - 1)
        # t^j for j in [k, 2k-2] reduced modulo f
        red = []
        cur = [(-c) % self.mod for c in f[:k]]  # t^k
        for j in range(k, 2 * k - 1):
            red.append(tuple(cur))
            # multiply by t
            top = cur[-1]
            cur = [0] + cur[:-1]
            cur = [(c + top * r) % self.mod for c, r in zip(cur, red[0])]
        self._red = red
        # Hensel lift of the root congruent to t^p
        tpow = self._pow_t_p()
        root = self._newton_root(tpow)
        self.frob_root = root
        S = [self.one]
        for _ in range(1, k):
            S.append(self.mul(S[-1], root))
        self._sig = S  # sigma(t^i)
        self.delta = self._sqrt_nonsquare()

    def _pow_t_p(self):
        t = tuple(1 if i == 1 else 0 for i in range(self.degree))
        r = self.one
        for _ in range(self.p):
            r = self.mul(r, t)
        return r

    def _eval_f(self, x):
        acc = self.zero
        for c in reversed(self.f):
            acc = self.add(self.mul(acc, x), self.from_int(c))
        return acc

    def _eval_df(self, x):
        acc = self.zero
        n = len(self.f) - 1
        for i in range(n, 0, -1):
            acc = self.add(self.mul(acc, x), self.from_int(i * self.f[i]))
        return acc

    def _newton_root(self, x):
        for _ in range(self.N.bit_length() + 2):
            x = self.sub(x, self.mul(self._eval_f(x), self.inv(self._eval_df(x))))
        if not self.is_zero(self._eval_f(x)):
            raise PrecisionExhausted("Hensel lift of the Frobenius root failed")
        return x

    def _sqrt_nonsquare(self):
        F = self.field
        r0 = F.sqrt(F.from_int(self.nonsquare))
        x = self.lift(r0)
        d = self.from_int(self.nonsquare)
        for _ in range(self.N.bit_length() + 2):
            # x <- (x + d/x) / 2
            x = self.mul(self.add(x, self.mul(d, self.inv(x))), self.from_int(pow(2, -1, self.mod)))
        assert self.mul(x, x) == d
        return x

    # element arithmetic
    def from_int(self, n: int):
        return (n % self.mod,) + (0,) * (self.degree - 1)

    def add(self, a, b):
        m = self.mod
        return tuple((x + y) % m for x, y in zip(a, b))

    def sub(self, a, b):
        m = self.mod
        return tuple((x - y) % m for x, y in zip(a, b))

    def neg(self, a):
        m = self.mod
        return tuple((-x) % m for x in a)

    def scal(self, n: int, a):
        m = self.mod
        return tuple(n * x % m for x in a)

    def mul(self, a, b):
        k, m = self.degree, self.mod
        if k == 2:
            # fast path for t^2 = r0 + r1 t
            r0, r1 = self._red[0]
            a0, a1 = a
            b0, b1 = b
            c2 = a1 * b1
            return ((a0 * b0 + c2 * r0) % m, (a0 * b1 + a1 * b0 + c2 * r1) % m)
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        out = prod[:k]
        for j in range(k, 2 * k - 1):
            c = prod[j]
            if c:
                rj = self._red[j - k]
                for i in range(k):
                    out[i] += c * rj[i]
        return tuple(x % m for x in out)

    def is_zero(self, a) -> bool:
        return not any(a)

    def val(self, a) -> int:
        v = self.N
        p = self.p
        for x in a:
            if x:
                e = 0
                while x % p == 0:
                    x //= p
                    e += 1
                if e < v:
                    v = e
        return v

    def inv(self, a):
        F = self.field
        r = self.residue(a)
        if r == 0:
            raise ZeroDivisionError("not a unit")
        x = self.lift(F.inv(r))
        two = self.from_int(2)
        for _ in range(self.N.bit_length() + 1):
            x = self.mul(x, self.sub(two, self.mul(a, x)))
        return x

    def divp(self, a, k: int):
        pk = self.p**k
        return tuple(x // pk for x in a)

    def split(self, a, k: int):
        pk = self.p**k
        return tuple(x // pk for x in a), tuple(x % pk for x in a)

    def mulp(self, a, k: int):
        pk = self.p**k
        m = self.mod
        return tuple(x * pk % m for x in a)

    def sigma(self, a):
        out = self.zero
        for i, c in enumerate(a):
            if c:
                out = self.add(out, self.scal(c, self._sig[i]))
        return out

    def sigma_inv(self, a):
        for _ in range(self.degree - 1):
            a = self.sigma(a)
        return a

    def residue(self, a) -> int:
        p = self.p
        return sum((x % p) * p**i for i, x in enumerate(a))

    def lift(self, code: int):
        p = self.p
        return tuple((code // p**i) % p for i in range(self.degree))

    def random(self, rng: random.Random):
        return tuple(rng.randrange(self.mod) for _ in range(self.degree))

    def random_unit(self, rng: random.Random):
        while True:
            a = self.random(rng)
            if self.residue(a):
                return a

    def key(self, a) -> str:
        return ",".join(str(x) for x in a)

    def reduce_to(self, a, N: int):
        pk = self.p**N
        return tuple(x % pk for x in a)


def frobenius_sigma(R: WittRing, a):
    return R.sigma(a)


# ---------------------------------------------------------------------------
# matrices over a p-adic ring: lists of rows


def mat_zero(R, n, k):
    return [[R.zero] * k for _ in range(n)]


def mat_identity(R, n):
    M = mat_zero(R, n, n)
    for i in range(n):
        M[i][i] = R.one
    return M


def mat_mul(R, A, B):
    n, k, m = len(A), len(B), len(B[0]) if B else 0
    out = []
    for i in range(n):
        row = [R.zero] * m
        Ai = A[i]
        for t in range(k):
            a = Ai[t]
            if R.is_zero(a):
                continue
            Bt = B[t]
            for j in range(m):
                b = Bt[j]
                if not R.is_zero(b):
                    row[j] = R.add(row[j], R.mul(a, b))
        out.append(row)
    return out


def mat_add(R, A, B):
    return [[R.add(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(R, A, B):
    return [[R.sub(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scal(R, c, A):
    return [[R.mul(c, a) for a in row] for row in A]


def mat_transpose(A):
    return [list(r) for r in zip(*A)]


def mat_sigma(R, A, times: int = 1):
    out = A
    for _ in range(times):
        out = [[R.sigma(a) for a in row] for row in out]
    return out


def mat_sigma_inv(R, A):
    return [[R.sigma_inv(a) for a in row] for row in A]


def mat_mulp(R, A, k: int):
    return [[R.mulp(a, k) for a in row] for row in A]


def mat_is_zero(R, A) -> bool:
    return all(R.is_zero(a) for row in A for a in row)


def mat_min_val(R, A) -> int:
    return min((R.val(a) for row in A for a in row), default=R.N)


def mat_from_ints(R, rows):
    return [[R.from_int(x) for x in row] for row in rows]


def mat_inverse_unimodular(R, A):
    """Inverse of a matrix whose determinant is a unit."""
    n = len(A)
    M = [list(A[i]) + [R.one if j == i else R.zero for j in range(n)] for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if R.val(M[r][c]) == 0), None)
        if piv is None:
            raise SingularOperator("matrix is not invertible over the ring")
        M[c], M[piv] = M[piv], M[c]
        u = R.inv(M[c][c])
        M[c] = [R.mul(u, x) for x in M[c]]
        for r in range(n):
            if r != c and not R.is_zero(M[r][c]):
                f = M[r][c]
                M[r] = [R.sub(x, R.mul(f, y)) for x, y in zip(M[r], M[c])]
    return [row[n:] for row in M]


def smith_form(R, M):
    """Elementary divisor exponents of M and the column transform V.

    Returns (exps, V) with exps sorted ascending as produced; exponents equal
    to R.N mean the divisor vanished at the working precision.  V is an
    invertible k x k matrix such that M V has its i-th column equal to
    (row transform of) p^exps[i] e_i.
    """
    n = len(M)
    k = len(M[0]) if n else 0
    A = [list(row) for row in M]
    V = mat_identity(R, k)
    exps: list[int] = []
    for t in range(min(n, k)):
        best = None
        for i in range(t, n):
            row = A[i]
            for j in range(t, k):
                v = R.val(row[j])
                if best is None or v < best[0]:
                    best = (v, i, j)
                    if v == 0:
                        break
            if best is not None and best[0] == 0:
                break
        if best is None or best[0] >= R.N:
            exps.extend([R.N] * (min(n, k) - t))
            break
        v, i, j = best
        A[t], A[i] = A[i], A[t]
        if j != t:
            for row in A:
                row[t], row[j] = row[j], row[t]
            for row in V:
                row[t], row[j] = row[j], row[t]
        piv = A[t][t]
        unit = R.inv(R.divp(piv, v))  # piv = p^v * unit
        for row in A:
            row[t] = R.mul(row[t], unit)
        for row in V:
            row[t] = R.mul(row[t], unit)
        # eliminate row t to the right using column operations
        for j in range(t + 1, k):
            a = A[t][j]
            if R.is_zero(a):
                continue
            c = R.divp(a, v)
            for row in A:
                row[j] = R.sub(row[j], R.mul(c, row[t]))
            for row in V:
                row[j] = R.sub(row[j], R.mul(c, row[t]))
        # eliminate column t below using row operations
        for i in range(t + 1, n):
            a = A[i][t]
            if R.is_zero(a):
                continue
            c = R.divp(a, v)
            At = A[t]
            A[i] = [R.sub(x, R.mul(c, y)) for x, y in zip(A[i], At)]
        exps.append(v)
    return exps, V


def hermite_form(R, M, n: int | None = None):
    """Column Hermite form of the span of the columns of M (n x k).

    Pivots are processed from the last row upwards; the pivot of row i is
    p^{k_i} and every entry to the right of a pivot in its row is reduced
    modulo p^{k_i}.  Returns (H, pivot_rows, pivot_exps) where H has one
    column per pivot, ordered by pivot row.
    """
    if n is None:
        n = len(M)
    if isinstance(R, ZpRing):
        return _hermite_form_int(R, M, n)
    k = len(M[0]) if M else 0
    cols = [[M[i][j] for i in range(n)] for j in range(k)]
    active = list(range(k))
    pivots: dict[int, tuple[list, int]] = {}
    for i in range(n - 1, -1, -1):
        best = None
        for j in active:
            v = R.val(cols[j][i])
            if v < R.N and (best is None or v < best[0]):
                best = (v, j)
                if v == 0:
                    break
        if best is None:
            continue
        v, j = best
        active.remove(j)
        col = cols[j]
        unit = R.inv(R.divp(col[i], v))
        col = [R.mul(unit, x) for x in col]
        col[i] = R.mulp(R.one, v)
        for j2 in active:
            a = cols[j2][i]
            if R.is_zero(a):
                continue
            c = R.divp(a, v)
            c2 = cols[j2]
            cols[j2] = [R.sub(x, R.mul(c, y)) for x, y in zip(c2[: i + 1], col[: i + 1])] + c2[i + 1:]
            cols[j2][i] = R.zero
        pivots[i] = (col, v)
    rows = sorted(pivots)
    # reduce entries to the right of each pivot
    for idx, i in enumerate(rows):
        col = pivots[i][0]
        for j in reversed(rows[:idx]):
            pj, vj = pivots[j]
            qq, _ = R.split(col[j], vj)
            if not R.is_zero(qq):
                col = [R.sub(x, R.mul(qq, y)) for x, y in zip(col, pj)]
        pivots[i] = (col, pivots[i][1])
    H = [[pivots[i][0][r] for i in rows] for r in range(n)]
    return H, rows, [pivots[i][1] for i in rows]



def _hermite_form_int(R, M, n: int):
    """hermite_form specialised to Z/p^N with plain integer arithmetic."""
    p, mod = R.p, R.mod
    k = len(M[0]) if M else 0
    cols = [[M[i][j] % mod for i in range(n)] for j in range(k)]
    active = list(range(k))
    pivots: dict[int, tuple[list, int]] = {}
    for i in range(n - 1, -1, -1):
        best = None
        for j in active:
            a = cols[j][i]
            if a == 0:
                continue
            v = 0
            while a % p == 0:
                a //= p
                v += 1
            if best is None or v < best[0]:
                best = (v, j)
                if v == 0:
                    break
        if best is None:
            continue
        v, j = best
        active.remove(j)
        pv = p**v
        unit = pow(cols[j][i] // pv, -1, mod)
        col = [unit * x % mod for x in cols[j]]
        col[i] = pv
        for j2 in active:
            c2 = cols[j2]
            a = c2[i]
            if a == 0:
                continue
            c = a // pv
            c2 = [(x - c * y) % mod for x, y in zip(c2[: i + 1], col[: i + 1])] + c2[i + 1:]
            c2[i] = 0
            cols[j2] = c2
        pivots[i] = (col, v)
    rows = sorted(pivots)
    for idx, i in enumerate(rows):
        col = pivots[i][0]
        for j in reversed(rows[:idx]):
            pj, vj = pivots[j]
            qq = col[j] // p**vj
            if qq:
                col = [(x - qq * y) % mod for x, y in zip(col, pj)]
        pivots[i] = (col, pivots[i][1])
    H = [[pivots[i][0][r] for i in rows] for r in range(n)]
    return H, rows, [pivots[i][1] for i in rows]

def hermite_smith(R, M):
    """Canonical column form and elementary divisor exponents of M."""
    H, rows, _ = hermite_form(R, M)
    exps, _ = smith_form(R, M)
    return H, sorted(exps)


def preimage_lattice_gens(R, T, c: int):
    """Generators of {y : p^{-c} T y integral} for T (m x n) of rank n.

    Returns (generator columns, scale) with the lattice equal to
    p^{-scale} * span(columns).
    """
    exps, V = smith_form(R, T)
    n = len(T[0])
    if len(exps) < n or max(exps) >= R.N:
        raise PrecisionExhausted("integrality condition has infinite divisor at this precision")
    es = [c - d for d in exps]
    scale = max(0, -min(es))
    if scale + c > R.N:
        raise PrecisionExhausted("denominator exceeds working precision")
    gens = [[R.mulp(V[i][j], es[j] + scale) if es[j] + scale < R.N else R.zero for j in range(n)]
            for i in range(n)]
    return gens, scale


class Lattice:
    """Full-rank lattice p^{-scale} * colspan(H) in K^n with canonical H.

    H is the column Hermite form (upper triangular, pivots p^{k_i}); the scale
    is normalised so that scale >= 0 and, when positive, H has a unit entry.
    """

    __slots__ = ("R", "n", "H", "scale", "pivot_exps", "_key")

    def __init__(self, R, gens, scale: int = 0, n: int | None = None, bound: int | None = None):
        self.R = R
        self.n = n = len(gens) if n is None else n
        H, rows, exps = hermite_form(R, gens, n)
        if len(rows) < n:
            raise PrecisionExhausted("lattice is not of full rank at this precision")
        v = mat_min_val(R, H)
        if v and scale > 0:
            v = min(v, scale)
            H = [[R.divp(a, v) for a in row] for row in H]
            exps = [e - v for e in exps]
            scale -= v
        if scale < 0:
            H = mat_mulp(R, H, -scale)
            exps = [e - scale for e in exps]
            scale = 0
        lim = R.N if bound is None else R.N - bound
        if sum(exps) >= lim:
            sm, _ = smith_form(R, H)
            if max(sm) >= lim:
                raise PrecisionExhausted(f"pivot valuation {max(sm)} not certified below {lim}")
        self.H, self.scale, self.pivot_exps = H, scale, exps
        self._key = None

    @property
    def key(self) -> str:
        if self._key is None:
            R = self.R
            body = ";".join("|".join(R.key(a) for a in row) for row in self.H)
            self._key = f"{self.scale}#{body}"
        return self._key

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"Lattice(n={self.n}, scale={self.scale}, pivots={self.pivot_exps})"

    def columns_at(self, scale: int):
        """Generators rescaled to the common scale ``scale`` >= self.scale."""
        d = scale - self.scale
        if d < 0:
            raise ValueError("cannot lower scale")
        return mat_mulp(self.R, self.H, d) if d else [list(r) for r in self.H]

    def volume_exp(self) -> int:
        """ord_p of the volume relative to the standard lattice."""
        return sum(self.pivot_exps) - self.n * self.scale

    def scaled(self, k: int) -> "Lattice":
        """p^k * self."""
        return Lattice(self.R, self.H, self.scale - k, self.n)

    def __add__(self, other: "Lattice") -> "Lattice":
        s = max(self.scale, other.scale)
        A = self.columns_at(s)
        B = other.columns_at(s)
        return Lattice(self.R, [ra + rb for ra, rb in zip(A, B)], s, self.n)

    def contains(self, other: "Lattice") -> bool:
        return (self + other) == self

    def __le__(self, other: "Lattice") -> bool:
        return other.contains(self)

    def index_in(self, other: "Lattice") -> int:
        """length(other/self) assuming self <= other."""
        return self.volume_exp() - other.volume_exp()

    def transform(self, A, a_scale: int = 0) -> "Lattice":
        """Image under the matrix p^{-a_scale} A."""
        return Lattice(self.R, mat_mul(self.R, A, self.H), self.scale + a_scale, self.n)

    def sigma(self) -> "Lattice":
        return Lattice(self.R, mat_sigma(self.R, self.H), self.scale, self.n)

    def dual(self, G, g_scale: int = 0) -> "Lattice":
        """Dual for the bilinear form x^T (p^{-g_scale} G) y."""
        R = self.R
        T = mat_mul(R, mat_transpose(self.H), G)
        gens, s = preimage_lattice_gens(R, T, self.scale + g_scale)
        return Lattice(R, gens, s, self.n)

    def reduce_precision(self, R2) -> "Lattice":
        return Lattice(R2, [[R2.reduce_to(a, R2.N) for a in row] for row in self.H], self.scale, self.n)


def standard_lattice(R, n: int) -> Lattice:
    return Lattice(R, mat_identity(R, n), 0, n)


def intersect(a: Lattice, b: Lattice, G, g_scale: int = 0) -> Lattice:
    """Intersection via duality for a nondegenerate Gram matrix."""
    return (a.dual(G, g_scale) + b.dual(G, g_scale)).dual(G, g_scale)


def quotient_length(small: Lattice, big: Lattice) -> int:
    if not big.contains(small):
        raise ValueError("not a sublattice")
    return small.index_in(big)
