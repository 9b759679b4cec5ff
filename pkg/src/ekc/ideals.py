"""Integral ideals of an imaginary quadratic field.

An ideal is held in Hermite normal form (a, b, c), meaning the lattice
Z*a + Z*(b + c*omega) with c | a, c | b and 0 <= b < a.  Its norm is a*c.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import gcd

import numpy as np

from .field_core import FieldElement, ImagQuadField, mul, norm

MAX_ENUM = 10**7


@dataclass(frozen=True, order=True)
class IdealHNF:
    a: int
    b: int
    c: int

    @property
    def norm(self) -> int:
        return self.a * self.c

    def key(self) -> tuple[int, int, int, int]:
        return (self.a * self.c, self.a, self.b, self.c)


UNIT_IDEAL = IdealHNF(1, 0, 1)


@dataclass(frozen=True)
class PrimeIdeal:
    ideal: IdealHNF
    p: int
    f: int
    ramified: bool

    @property
    def norm(self) -> int:
        return self.p**self.f


# --------------------------------------------------------------------------
# lattice plumbing


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def hnf_from_gens(gens) -> IdealHNF:
    """HNF of the Z-span of the given (x, y) vectors (must have full rank)."""
    px = py = 0
    a = 0
    for x, y in gens:
        if y == 0:
            a = gcd(a, x)
            continue
        if py == 0:
            px, py = x, y
            continue
        g, s, t = _egcd(py, y)
        # (y/g)*pivot - (py/g)*v has zero y-coordinate
        a = gcd(a, (y // g) * px - (py // g) * x)
        px, py = s * px + t * x, g
    if py < 0:
        px, py = -px, -py
    a = abs(a)
    if a == 0 or py == 0:
        raise ValueError("generators do not span a full-rank lattice")
    return IdealHNF(a, px % a, py)


def basis(I: IdealHNF) -> tuple[tuple[int, int], tuple[int, int]]:
    return (I.a, 0), (I.b, I.c)


def ideal_add(I: IdealHNF, J: IdealHNF) -> IdealHNF:
    """I + J, the gcd of two ideals."""
    return hnf_from_gens(basis(I) + basis(J))


def contains(I: IdealHNF, e) -> bool:
    x, y = e
    if y % I.c:
        return False
    return (x - (y // I.c) * I.b) % I.a == 0


def is_ideal(K: ImagQuadField, a: int, b: int, c: int) -> bool:
    if a <= 0 or c <= 0 or a % c or b % c or not 0 <= b < a:
        return False
    a1, b1 = a // c, b // c
    return (b1 * b1 + K.omega_trace * b1 + K.omega_norm) % a1 == 0


def ideal_mul(K: ImagQuadField, I: IdealHNF, J: IdealHNF) -> IdealHNF:
    if I == UNIT_IDEAL:
        return J
    if J == UNIT_IDEAL:
        return I
    gens = [mul(K, u, v) for u in basis(I) for v in basis(J)]
    return hnf_from_gens(gens)


def ideal_pow(K: ImagQuadField, I: IdealHNF, k: int) -> IdealHNF:
    out = UNIT_IDEAL
    for _ in range(k):
        out = ideal_mul(K, out, I)
    return out


def principal_ideal(K: ImagQuadField, e) -> IdealHNF:
    e = FieldElement(*e)
    return hnf_from_gens([e, mul(K, e, FieldElement(0, 1))])


def ideal_conj(K: ImagQuadField, I: IdealHNF) -> IdealHNF:
    t = K.omega_trace
    return hnf_from_gens([(I.a, 0), (I.b + t * I.c, -I.c)])


def _qf(K: ImagQuadField, v) -> int:
    x, y = v
    return x * x + K.omega_trace * x * y + K.omega_norm * y * y


def _bil2(K: ImagQuadField, u, v) -> int:
    # twice the bilinear form attached to the norm
    return 2 * u[0] * v[0] + K.omega_trace * (u[0] * v[1] + u[1] * v[0]) + 2 * K.omega_norm * u[1] * v[1]


def reduced_basis(K: ImagQuadField, I: IdealHNF):
    """Lagrange-Gauss reduced basis (v1, v2) of I with N(v1) minimal."""
    v1, v2 = basis(I)
    q1, q2 = _qf(K, v1), _qf(K, v2)
    if q2 < q1:
        v1, v2, q1, q2 = v2, v1, q2, q1
    while True:
        m = (_bil2(K, v1, v2) + q1) // (2 * q1)
        if m:
            v2 = (v2[0] - m * v1[0], v2[1] - m * v1[1])
            q2 = _qf(K, v2)
        if q2 < q1:
            v1, v2, q1, q2 = v2, v1, q2, q1
        else:
            return v1, v2


def shortest_element(K: ImagQuadField, I: IdealHNF) -> FieldElement:
    v1, _ = reduced_basis(K, I)
    return FieldElement(*v1)


def shortest_elements(K: ImagQuadField, a: np.ndarray, b: np.ndarray, c: np.ndarray):
    """Vectorized reduced_basis over many HNF ideals; returns the shortest vectors (x, y)."""
    a, b, c = (np.asarray(v, dtype=np.int64) for v in (a, b, c))
    if len(a) and int(a.max()) > 2 * 10**9:
        raise OverflowError("HNF entries too large for vectorized reduction")
    t, n = K.omega_trace, K.omega_norm

    def qf(x, y):
        return x * x + t * x * y + n * y * y

    x1, y1 = a.copy(), np.zeros_like(a)
    x2, y2 = b.copy(), c.copy()
    q1, q2 = qf(x1, y1), qf(x2, y2)
    while True:
        sw = q2 < q1
        x1, x2 = np.where(sw, x2, x1), np.where(sw, x1, x2)
        y1, y2 = np.where(sw, y2, y1), np.where(sw, y1, y2)
        q1, q2 = np.where(sw, q2, q1), np.where(sw, q1, q2)
        bil = 2 * x1 * x2 + t * (x1 * y2 + x2 * y1) + 2 * n * y1 * y2
        m = (bil + q1) // (2 * q1)
        if not m.any():
            return x1, y1
        x2 = x2 - m * x1
        y2 = y2 - m * y1
        q2 = qf(x2, y2)


# --------------------------------------------------------------------------
# rational primes and splitting


def primes_upto(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13):
        if n % p == 0:
            return n == p
    k = 17
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def kronecker(D: int, m: int) -> int:
    """Kronecker symbol (D / m) for m >= 0."""
    if m == 0:
        return 1 if abs(D) == 1 else 0
    result = 1
    while m % 2 == 0:
        m //= 2
        if D % 2 == 0:
            return 0
        if D % 8 in (3, 5):
            result = -result
    # Jacobi symbol (D / m) for odd m
    a, n = D % m, m
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


@lru_cache(maxsize=None)
def kronecker_table(d_K: int) -> np.ndarray:
    """chi_{d_K}(m) for m = 0 .. |d_K| - 1; chi is periodic mod |d_K|."""
    D = abs(d_K)
    return np.array([kronecker(d_K, m) for m in range(D)], dtype=np.int64)


def sqrt_mod(a: int, p: int) -> int:
    """A square root of a modulo the odd prime p (Tonelli-Shanks)."""
    a %= p
    if a == 0:
        return 0
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def omega_roots(K: ImagQuadField, p: int) -> list[int]:
    """Distinct roots of x^2 - trace*x + norm modulo p."""
    t, n = K.omega_trace, K.omega_norm
    if p == 2:
        return [x for x in (0, 1) if (x * x - t * x + n) % 2 == 0]
    disc = K.d_K % p
    if disc == 0:
        return [t * pow(2, -1, p) % p]
    if pow(disc, (p - 1) // 2, p) != 1:
        return []
    s = sqrt_mod(disc, p)
    inv2 = pow(2, -1, p)
    return sorted({(t + s) * inv2 % p, (t - s) * inv2 % p})


def factor_rational_prime(K: ImagQuadField, p: int) -> tuple[str, list[PrimeIdeal]]:
    """Splitting of (p) in O_K: ('split' | 'inert' | 'ramified', primes above p)."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    roots = omega_roots(K, p)
    if not roots:
        return "inert", [PrimeIdeal(IdealHNF(p, 0, p), p, 2, False)]
    # omega = r mod P means P = (p, omega - r) = Z p + Z(-r + omega)
    primes = [PrimeIdeal(IdealHNF(p, (-r) % p, 1), p, 1, len(roots) == 1) for r in roots]
    primes.sort(key=lambda P: P.ideal.b)
    return ("ramified" if len(roots) == 1 else "split"), primes


@dataclass
class PrimeIdealTable:
    """All prime ideals of norm <= bound, sorted by (norm, HNF b)."""

    K: ImagQuadField
    bound: int
    p: np.ndarray  # rational prime below
    norm: np.ndarray  # N(P)
    b: np.ndarray  # HNF entry b
    c: np.ndarray  # HNF entry c (1 for degree one, p for inert)

    def __len__(self) -> int:
        return len(self.p)

    def ideal(self, i: int) -> IdealHNF:
        return IdealHNF(int(self.norm[i]) // int(self.c[i]), int(self.b[i]), int(self.c[i]))

    def prime(self, i: int) -> PrimeIdeal:
        p, c = int(self.p[i]), int(self.c[i])
        f = 2 if c > 1 else 1
        return PrimeIdeal(self.ideal(i), p, f, f == 1 and self.K.d_K % p == 0)

    def truncate(self, bound: int) -> "PrimeIdealTable":
        k = int(np.searchsorted(self.norm, bound, side="right"))
        return PrimeIdealTable(self.K, bound, self.p[:k], self.norm[:k], self.b[:k], self.c[:k])

    def index_of(self, I: IdealHNF) -> int:
        lo = int(np.searchsorted(self.norm, I.norm, side="left"))
        hi = int(np.searchsorted(self.norm, I.norm, side="right"))
        for i in range(lo, hi):
            if self.b[i] == I.b and self.c[i] == I.c:
                return i
        raise KeyError(f"{I} is not a prime ideal in the table")


_PRIME_CACHE: dict[int, PrimeIdealTable] = {}


def prime_ideal_table(K: ImagQuadField, bound: float) -> PrimeIdealTable:
    bound = int(math.floor(bound))
    if bound > MAX_ENUM:
        raise ValueError(f"bound {bound} exceeds the desk-scale cap {MAX_ENUM}")
    cached = _PRIME_CACHE.get(K.d)
    if cached is not None and cached.bound >= bound:
        return cached.truncate(bound)
    rows = []
    chi = kronecker_table(K.d_K)
    D = K.abs_disc
    for p in primes_upto(bound).tolist():
        kind = chi[p % D]
        if kind == -1:
            if p * p <= bound:
                rows.append((p * p, p, 0, p))
            continue
        for r in omega_roots(K, p):
            rows.append((p, p, (-r) % p, 1))
    rows.sort()
    arr = np.array(rows, dtype=np.int64).reshape(-1, 4)
    table = PrimeIdealTable(K, bound, arr[:, 1].copy(), arr[:, 0].copy(), arr[:, 2].copy(), arr[:, 3].copy())
    _PRIME_CACHE[K.d] = table
    return table


def elements_upto(K: ImagQuadField, u: float) -> tuple[np.ndarray, np.ndarray]:
    """All nonzero x + y*omega with 1 <= N <= u, in a fixed (y, x) order."""
    tt, nn = K.omega_trace, K.omega_norm
    # N = (x + t y/2)^2 + (n - t^2/4) y^2
    disc = nn - tt * tt / 4.0
    ymax = int(math.isqrt(int(u / disc)) + 1)
    xs, ys = [], []
    for y in range(-ymax, ymax + 1):
        r = u - disc * y * y
        if r < 0:
            continue
        c = -tt * y / 2.0
        lo, hi = math.floor(c - math.sqrt(r)) - 1, math.ceil(c + math.sqrt(r)) + 1
        x = np.arange(lo, hi + 1, dtype=np.int64)
        n = x * x + tt * x * y + nn * y * y
        ok = (n >= 1) & (n <= u)
        xs.append(x[ok])
        ys.append(np.full(int(ok.sum()), y, dtype=np.int64))
    return np.concatenate(xs), np.concatenate(ys)


def contains_arr(I: IdealHNF, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Vectorized membership of x + y*omega in the HNF lattice Z a + Z (b + c omega)."""
    ok = y % I.c == 0
    return ok & ((x - (y // I.c) * I.b) % I.a == 0)


# --------------------------------------------------------------------------
# enumeration


def enumerate_ideals_bruteforce(K: ImagQuadField, x: float) -> list[IdealHNF]:
    """Every ideal of norm <= x by scanning HNF triples; the testing oracle."""
    out = []
    X = int(math.floor(x))
    for a in range(1, X + 1):
        for c in range(1, X // a + 1):
            if a % c:
                continue
            for b in range(0, a, c):
                if is_ideal(K, a, b, c):
                    out.append(IdealHNF(a, b, c))
    out.sort(key=IdealHNF.key)
    return out


def _factorizations(table: PrimeIdealTable, X: int):
    """Yield factorizations (tuple of (prime index, exponent)) of ideals of norm <= X."""
    norms = table.norm.tolist()

    def rec(start: int, n: int, fac: tuple):
        yield n, fac
        for i in range(start, len(norms)):
            q = norms[i]
            if n * q > X:
                break
            m, e = n * q, 1
            while m <= X:
                yield from rec(i + 1, m, fac + ((i, e),))
                m *= q
                e += 1

    yield from rec(0, 1, ())


def enumerate_factored(K: ImagQuadField, x: float):
    """Ideals of norm <= x with their factorizations, sorted by (norm, HNF)."""
    X = int(math.floor(x))
    if X < 1:
        return [], None
    if X > MAX_ENUM:
        raise ValueError(f"x = {x} exceeds the desk-scale cap {MAX_ENUM}")
    table = prime_ideal_table(K, max(X, 2))
    ideals = []
    pp_cache: dict[tuple[int, int], IdealHNF] = {}
    for n, fac in _factorizations(table, X):
        I = UNIT_IDEAL
        for i, e in fac:
            P = pp_cache.get((i, e))
            if P is None:
                P = ideal_pow(K, table.ideal(i), e)
                pp_cache[(i, e)] = P
            I = ideal_mul(K, I, P)
        ideals.append((I, fac))
    ideals.sort(key=lambda r: r[0].key())
    return ideals, table


def enumerate_ideals(K: ImagQuadField, x: float) -> list[IdealHNF]:
    """All integral ideals of norm <= x, each once, sorted by (norm, HNF)."""
    ideals, _ = enumerate_factored(K, x)
    return [I for I, _ in ideals]


def ideal_norm_counts(K: ImagQuadField, x: float) -> np.ndarray:
    """counts[n] = number of ideals of norm n, for 0 <= n <= x (counts[0] = 0).

    Uses #{N a = n} = sum over m | n of chi_{d_K}(m).
    """
    X = int(math.floor(x))
    if X > MAX_ENUM:
        raise ValueError(f"x = {x} exceeds the desk-scale cap {MAX_ENUM}")
    counts = np.zeros(X + 1, dtype=np.int64)
    if X < 1:
        return counts
    chi = kronecker_table(K.d_K)
    D = len(chi)
    m = np.arange(1, X + 1)
    vals = chi[m % D]
    for mm, v in zip(m[vals != 0].tolist(), vals[vals != 0].tolist()):
        counts[mm::mm] += v
    return counts


def count_ideals(K: ImagQuadField, x: float) -> int:
    X = int(math.floor(x))
    if X < 1:
        return 0
    chi = kronecker_table(K.d_K)
    m = np.arange(1, X + 1, dtype=np.int64)
    return int(np.sum(chi[m % len(chi)] * (X // m)))


# --------------------------------------------------------------------------
# arithmetic functions


@dataclass
class ArithTable:
    """Arithmetic functions on every ideal of norm <= bound."""

    K: ImagQuadField
    bound: int
    ideals: list[IdealHNF]
    factorization: list[tuple]
    prime_norms: list[int]
    Lambda: np.ndarray
    mu: np.ndarray
    phi: list[int]
    sigma: list[int]
    Omega: np.ndarray
    ndiv: np.ndarray

    def norms(self) -> np.ndarray:
        return np.array([I.norm for I in self.ideals], dtype=np.int64)

    def index(self) -> dict[IdealHNF, int]:
        return {I: i for i, I in enumerate(self.ideals)}


def arith_table(K: ImagQuadField, x: float) -> ArithTable:
    if x < 1:
        raise ValueError("x must be >= 1")
    ideals, table = enumerate_factored(K, x)
    prime_norms = table.norm.tolist()
    n = len(ideals)
    Lam = np.zeros(n)
    mu = np.zeros(n, dtype=np.int64)
    Om = np.zeros(n, dtype=np.int64)
    nd = np.zeros(n, dtype=np.int64)
    phi, sig = [], []
    for k, (I, fac) in enumerate(ideals):
        if len(fac) == 1:
            Lam[k] = math.log(prime_norms[fac[0][0]])
        mu[k] = 0 if any(e > 1 for _, e in fac) else (-1) ** len(fac)
        Om[k] = sum(e for _, e in fac)
        dv, ph, sg = 1, 1, 1
        for i, e in fac:
            q = prime_norms[i]
            dv *= e + 1
            ph *= q ** (e - 1) * (q - 1)
            sg *= (q ** (e + 1) - 1) // (q - 1)
        nd[k] = dv
        phi.append(ph)
        sig.append(sg)
    return ArithTable(K, int(x), [I for I, _ in ideals], [f for _, f in ideals], prime_norms,
                      Lam, mu, phi, sig, Om, nd)


_PP_CACHE: dict = {}


def prime_power_ideals(K: ImagQuadField, x: float):
    """Arrays (prime index, exponent k, norm N(P)^k) over prime powers of norm <= x."""
    key = (K.d, int(math.floor(x)))
    hit = _PP_CACHE.get(key)
    if hit is None:
        if len(_PP_CACHE) > 64:
            _PP_CACHE.clear()
        hit = _PP_CACHE[key] = _prime_power_ideals(K, x)
    return hit


def _prime_power_ideals(K: ImagQuadField, x: float):
    table = prime_ideal_table(K, max(2, x))
    idx, exps, norms = [], [], []
    NP = table.norm
    k = 1
    cur = NP.astype(np.float64)
    while True:
        sel = np.flatnonzero(cur <= x)
        if len(sel) == 0:
            break
        idx.append(sel)
        exps.append(np.full(len(sel), k, dtype=np.int64))
        norms.append(NP[sel] ** k)
        k += 1
        cur = cur * NP
    if not idx:
        z = np.zeros(0, dtype=np.int64)
        return table, z, z, z
    return table, np.concatenate(idx), np.concatenate(exps), np.concatenate(norms)


def psi(K: ImagQuadField, x: float) -> float:
    """Chebyshev function sum_{N a <= x} Lambda(a)."""
    table, idx, _, _ = prime_power_ideals(K, x)
    return math.fsum(np.log(table.norm[idx].astype(np.float64)).tolist())


def mertens_sum(K: ImagQuadField, x: float) -> float:
    """sum over prime ideals with N P <= x of log N P / N P."""
    if x < 2:
        return 0.0
    table = prime_ideal_table(K, x)
    NP = table.norm.astype(np.float64)
    return math.fsum((np.log(NP) / NP).tolist())


def lambda_over_norm_sum(K: ImagQuadField, x: float) -> float:
    table, idx, _, norms = prime_power_ideals(K, x)
    return math.fsum((np.log(table.norm[idx].astype(np.float64)) / norms).tolist())


def abel_summation_check(K: ImagQuadField, x: float) -> tuple[float, float]:
    """Both sides of sum Lambda(a)/Na = psi(x)/x + int_1^x psi(u)/u^2 du.

    psi is a step function, so the integral is exact over the jumps.
    """
    table, idx, _, norms = prime_power_ideals(K, x)
    order = np.argsort(norms, kind="stable")
    n = norms[order].astype(np.float64)
    lam = np.log(table.norm[idx][order].astype(np.float64))
    lhs = math.fsum((lam / n).tolist())
    cum = np.cumsum(lam)
    # psi equals cum[i] on [n_i, n_{i+1}); last interval runs to x
    right = np.append(n[1:], x)
    integral = math.fsum((cum * (1.0 / n - 1.0 / right)).tolist())
    rhs = math.fsum([float(cum[-1]) / x if len(cum) else 0.0, integral])
    return lhs, rhs
