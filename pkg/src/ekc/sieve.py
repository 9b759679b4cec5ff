"""Selberg sieve over O_K for pairs (alpha, t*alpha + 1) of prime elements.

Sieving primes are the prime ideals P with N P <= z lying over rational primes
p >= 13 (coprime to 2310).  Squarefree ideals are handled as frozensets of
indices into the sieving-prime list, so all weights are exact Fractions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .class_groups import class_group
from .field_core import FieldElement, ImagQuadField, units
from .ideals import (
    IdealHNF,
    PrimeIdeal,
    contains,
    elements_upto,
    factor_rational_prime,
    prime_ideal_table,
    primes_upto,
)
from .lfunctions import dedekind_zeta

SMALL_PRIME_PRODUCT = 2310  # 2*3*5*7*11


@dataclass
class SieveContext:
    K: ImagQuadField
    t: FieldElement
    z: float
    primes: list[PrimeIdeal]  # sieving primes, N P <= z, p >= 13
    rho_p: list[int]  # rho(P) = 1 if P | (t) else 2
    divisors: list[frozenset]  # squarefree e | P(z) with N e <= z
    lam: dict = field(default_factory=dict)  # e -> lambda_e (Fraction)
    S_O: Fraction = Fraction(0)

    def norm_of(self, e: frozenset) -> int:
        return math.prod(self.primes[i].norm for i in e)

    def rho(self, e: frozenset) -> int:
        return math.prod(self.rho_p[i] for i in e)

    def f(self, e: frozenset) -> Fraction:
        return Fraction(self.norm_of(e), self.rho(e))

    def f1(self, e: frozenset) -> Fraction:
        # squarefree: f1 = prod (f(P) - 1)
        out = Fraction(1)
        for i in e:
            out *= Fraction(self.primes[i].norm, self.rho_p[i]) - 1
        return out

    def mu(self, e: frozenset) -> int:
        return -1 if len(e) % 2 else 1

    def S(self, e: frozenset, y: float) -> Fraction:
        """Sum of mu^2/f1 over squarefree a coprime to 2310 e with N a <= y."""
        return sum((1 / self.f1(a) for a in self.divisors if self.norm_of(a) <= y and not (a & e)),
                   Fraction(0))


def element_in(I: IdealHNF, e) -> bool:
    return contains(I, tuple(e))


def sieving_primes(K: ImagQuadField, z: float) -> list[PrimeIdeal]:
    table = prime_ideal_table(K, max(2, z))
    return [table.prime(i) for i in range(len(table)) if table.p[i] >= 13]


def _squarefree_divisors(norms: list[int], z: float) -> list[frozenset]:
    out = []

    def rec(start, n, cur):
        out.append(frozenset(cur))
        for i in range(start, len(norms)):
            if n * norms[i] <= z:
                rec(i + 1, n * norms[i], cur + [i])

    rec(0, 1, [])
    return out


def build_context(K: ImagQuadField, t, z: float) -> SieveContext:
    t = FieldElement(*t)
    if t == FieldElement(0, 0) or t in units(K):
        raise ValueError("t must be nonzero and not a unit")
    if z < 13:
        raise ValueError("z must be at least 13")
    primes = sieving_primes(K, z)
    rho_p = [1 if element_in(P.ideal, t) else 2 for P in primes]
    divs = _squarefree_divisors([P.norm for P in primes], z)
    ctx = SieveContext(K, t, z, primes, rho_p, divs)
    ctx.S_O = ctx.S(frozenset(), z)
    for e in divs:
        ctx.lam[e] = ctx.mu(e) * ctx.f(e) * ctx.S(e, z / ctx.norm_of(e)) / (ctx.f1(e) * ctx.S_O)
    return ctx


def lam(ctx: SieveContext, e: frozenset) -> Fraction:
    """lambda_e; zero off the support (N e > z)."""
    return ctx.lam.get(frozenset(e), Fraction(0))


def dual_identity_check(ctx: SieveContext, a: frozenset) -> bool:
    """sum over c | P(z), a | c of lambda_c/f(c) == mu(a)/(f1(a) S_O(z)), exactly.

    Both sides are compared for N a <= z; beyond that lambda vanishes on every
    multiple of a and the left side is 0.
    """
    a = frozenset(a)
    lhs = sum((ctx.lam[c] / ctx.f(c) for c in ctx.divisors if a <= c), Fraction(0))
    if ctx.norm_of(a) > ctx.z:
        return lhs == 0
    return lhs == ctx.mu(a) / (ctx.f1(a) * ctx.S_O)


# --------------------------------------------------------------------------
# counting over alpha


def _norm_arr(K, x, y):
    return x * x + K.omega_trace * x * y + K.omega_norm * y * y


def _shift(K, t, x, y):
    """Coordinates of t*alpha + 1."""
    tx, ty = t
    yy = ty * y
    return tx * x - K.omega_norm * yy + 1, tx * y + ty * x + K.omega_trace * yy


def _divisible(P: PrimeIdeal, x, y):
    if P.f == 2:
        return (x % P.p == 0) & (y % P.p == 0)
    b = P.ideal.b
    return (x - y * b) % P.p == 0


def is_prime_element_arr(K: ImagQuadField, x, y, sieve_bound: int | None = None) -> np.ndarray:
    """alpha is prime iff (alpha) is a prime ideal: N = p, or N = p^2 with p inert and p | alpha."""
    n = _norm_arr(K, x, y)
    top = int(n.max()) if len(n) else 2
    isp = np.zeros(top + 1, dtype=bool)
    isp[primes_upto(top)] = True
    out = isp[n]
    r = np.sqrt(n.astype(np.float64)).round().astype(np.int64)
    sq = (r * r == n) & isp[np.minimum(r, top)]
    if sq.any():
        inert = np.zeros(top + 1, dtype=bool)
        for p in np.unique(r[sq]):
            inert[p] = factor_rational_prime(K, int(p))[0] == "inert"
        out |= sq & inert[np.minimum(r, top)] & (x % np.maximum(r, 1) == 0) & (y % np.maximum(r, 1) == 0)
    return out


def direct_pair_count(K: ImagQuadField, t, u: float) -> int:
    if u > 10**6:
        raise ValueError("u must be at most 10^6")
    t = FieldElement(*t)
    if u < 1:
        return 0
    x, y = elements_upto(K, u)
    sx, sy = _shift(K, t, x, y)
    return int((is_prime_element_arr(K, x, y) & is_prime_element_arr(K, sx, sy)).sum())


def _divisor_masks(ctx: SieveContext, u: float):
    x, y = elements_upto(ctx.K, u)
    sx, sy = _shift(ctx.K, ctx.t, x, y)
    return [_divisible(P, x, y) | _divisible(P, sx, sy) for P in ctx.primes], len(x)


def sifted_count(ctx: SieveContext, u: float) -> int:
    """#{alpha : 1 <= N alpha <= u, (alpha(t alpha + 1), P(z)) = 1}."""
    masks, n = _divisor_masks(ctx, u)
    hit = np.zeros(n, dtype=bool)
    for m in masks:
        hit |= m
    return int(n - hit.sum())


def sieve_upper_bound(ctx: SieveContext, u: float) -> Fraction:
    """sum over alpha of (sum_{b | (alpha(t alpha+1), P(z))} lambda_b)^2, exactly.

    Alphas are grouped by the set of sieving primes dividing alpha(t alpha + 1);
    each group contributes its size times the squared lambda sum over that set.
    """
    masks, n = _divisor_masks(ctx, u)
    if not masks:
        return Fraction(n)
    key = np.zeros(n, dtype=np.int64) if len(masks) < 63 else None
    if key is None:
        raise ValueError("too many sieving primes for the bitmask grouping")
    for i, m in enumerate(masks):
        key |= m.astype(np.int64) << i
    vals, counts = np.unique(key, return_counts=True)
    total = Fraction(0)
    for v, c in zip(vals.tolist(), counts.tolist()):
        s = frozenset(i for i in range(len(masks)) if v >> i & 1)
        inner = sum((ctx.lam[b] for b in ctx.divisors if b <= s), Fraction(0))
        total += c * inner * inner
    return total


def sieve_quadratic_form(ctx: SieveContext, u: float) -> Fraction:
    """The same quantity as a form: sum lambda_b1 lambda_b2 #{alpha : [b1, b2] | alpha(t alpha+1)}."""
    masks, n = _divisor_masks(ctx, u)
    total = Fraction(0)
    for b1 in ctx.divisors:
        for b2 in ctx.divisors:
            m = np.ones(n, dtype=bool)
            for i in b1 | b2:
                m &= masks[i]
            total += ctx.lam[b1] * ctx.lam[b2] * int(m.sum())
    return total


def error_term_sum(ctx: SieveContext) -> float:
    """sum |lambda_b1 lambda_b2| rho([b1,b2]) / sqrt(N [b1,b2]) over the lambda support."""
    terms = []
    for b1 in ctx.divisors:
        for b2 in ctx.divisors:
            l = b1 | b2
            terms.append(abs(float(ctx.lam[b1] * ctx.lam[b2])) * ctx.rho(l) / math.sqrt(ctx.norm_of(l)))
    return math.fsum(terms)


def error_term_bound(ctx: SieveContext) -> float:
    return dedekind_zeta(class_group(ctx.K).K, 1.5) ** 16 * ctx.z


# --------------------------------------------------------------------------
# weight functions on general ideals given by factorization


def rho_general(K: ImagQuadField, t, fac) -> int:
    """2^{Omega(b_(t))} for b = prod P^e given as [(PrimeIdeal, e), ...]."""
    t = FieldElement(*t)
    return 2 ** sum(e for P, e in fac if not element_in(P.ideal, t))


def f_general(K: ImagQuadField, t, fac) -> Fraction:
    return Fraction(math.prod(P.norm**e for P, e in fac), rho_general(K, t, fac))


def f1_general(K: ImagQuadField, t, fac) -> Fraction:
    """sum over a | b of mu(a) f(b/a), by explicit divisor enumeration."""
    import itertools

    total = Fraction(0)
    for drop in itertools.product((0, 1), repeat=len(fac)):
        if any(d > e for d, (_, e) in zip(drop, fac)):
            continue
        rest = [(P, e - d) for d, (P, e) in zip(drop, fac)]
        total += (-1) ** sum(drop) * f_general(K, t, rest)
    return total
