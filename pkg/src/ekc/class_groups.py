"""Class groups, ray class groups modulo a prime ideal, and their characters.

The ideal class group comes from reduced binary quadratic forms.  The ray
class group H_q(K) for a prime ideal q is built as the extension

    1 -> (O_K/q)^* / image(mu_K) -> H_q(K) -> Cl_K -> 1

using a fixed system of small integral representatives r_c (one per ideal
class, coprime to q).  An ideal a in class c maps to the pair (c, u) with
u = log((beta)) where a * conj(r_c) = (beta); a 2-cocycle on Cl_K makes the
pairs a group, and Smith normal form of its relation lattice gives the
cyclic decomposition and exact discrete logarithms.

K has no real embedding, so the sign condition in the narrow ray class group
is vacuous: the narrow and ordinary ray class groups coincide here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

import numpy as np
from sympy import factorint, primitive_root

from .field_core import FieldElement, ImagQuadField, make_field, units
from .ideals import (
    UNIT_IDEAL,
    IdealHNF,
    PrimeIdeal,
    PrimeIdealTable,
    enumerate_ideals,
    ideal_conj,
    ideal_mul,
    shortest_element,
    shortest_elements,
)

# --------------------------------------------------------------------------
# binary quadratic forms


def reduce_form(a: int, b: int, c: int) -> tuple[int, int, int]:
    """Reduce a positive definite form: |b| <= a <= c, b >= 0 if |b| == a or a == c."""
    D = b * b - 4 * a * c
    while True:
        if not -a < b <= a:
            r = (a - b) // (2 * a)
            b += 2 * a * r
            c = (b * b - D) // (4 * a)
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return a, b, c


def reduced_forms(D: int) -> list[tuple[int, int, int]]:
    out = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or (c == a and b < 0):
                continue
            if gcd(gcd(a, b), c) == 1:
                out.append((a, b, c))
        a += 1
    return out


def _xgcd(a: int, b: int):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def compose_forms(f1, f2) -> tuple[int, int, int]:
    """Dirichlet composition of primitive forms of equal discriminant, reduced."""
    a1, b1, c1 = f1
    a2, b2, c2 = f2
    if a1 > a2:
        a1, b1, c1, a2, b2, c2 = a2, b2, c2, a1, b1, c1
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, u, v = _xgcd(s, d)
        x2, y2 = u, -v
    v1, v2 = a1 // d1, a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (c2 * d1 + r * (b2 + v2 * r)) // v1
    return reduce_form(a3, b3, c3)


def principal_form(D: int) -> tuple[int, int, int]:
    b = D % 2
    return (1, b, (b * b - D) // 4)


def ideal_form(K: ImagQuadField, I: IdealHNF) -> tuple[int, int, int]:
    """Reduced form attached to the class of I (norm form on an oriented basis)."""
    A, B = I.a // I.c, I.b // I.c
    b = 2 * B + K.omega_trace
    c = (B * B + K.omega_trace * B + K.omega_norm) // A
    return reduce_form(A, b, c)


# --------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(M: list[list[int]]) -> tuple[list[int], list[list[int]]]:
    """Return (diagonal, V) with U*M*V = diag for some unimodular U.

    Only the column transform V is tracked; it maps generator coordinates to
    coordinates along the cyclic factors.
    """
    A = [list(map(int, row)) for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_cols(j1, j2):
        for row in A:
            row[j1], row[j2] = row[j2], row[j1]
        for row in V:
            row[j1], row[j2] = row[j2], row[j1]

    def add_col(dst, src, k):
        # col_dst += k * col_src
        for row in A:
            row[dst] += k * row[src]
        for row in V:
            row[dst] += k * row[src]

    diag = []
    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            i, j = best
            A[t], A[i] = A[i], A[t]
            if j != t:
                swap_cols(t, j)
            p = A[t][t]
            clean = True
            for i in range(t + 1, m):
                q = A[i][t] // p
                if q:
                    A[i] = [x - q * y for x, y in zip(A[i], A[t])]
                clean &= A[i][t] == 0
            for j in range(t + 1, n):
                q = A[t][j] // p
                if q:
                    add_col(j, t, -q)
                clean &= A[t][j] == 0
            if not clean:
                continue
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
            if bad is None:
                break
            A[t] = [x + y for x, y in zip(A[t], A[bad])]
        if best is None:
            diag.extend([0] * (min(m, n) - t))
            break
        diag.append(abs(A[t][t]))
    return diag, V


# --------------------------------------------------------------------------
# class group


@dataclass
class FormClassGroup:
    """Cl_K as reduced forms with composition table and triangular generators."""

    K: ImagQuadField
    D: int
    forms: list[tuple[int, int, int]]
    table: np.ndarray  # table[i, j] = index of forms[i] * forms[j]
    gens: list[int]  # class indices of generators g_1..g_r
    rel_orders: list[int]  # r_j g_j lies in <g_1..g_{j-1}>
    rel_vectors: list[tuple[int, ...]]  # that element's exponent vector
    dlog: list[tuple[int, ...]]  # exponent vector of each class over gens
    invariants: tuple[int, ...]
    index: dict = field(repr=False, default_factory=dict)

    @property
    def h(self) -> int:
        return len(self.forms)

    def inverse(self, i: int) -> int:
        return int(np.flatnonzero(self.table[i] == 0)[0])

    def class_of(self, I: IdealHNF) -> int:
        return self.index[ideal_form(self.K, I)]

    def power(self, i: int, k: int) -> int:
        out = 0
        for _ in range(k % self.h if self.h else 0):
            out = int(self.table[out, i])
        return out

    def element(self, vec) -> int:
        out = 0
        for g, e in zip(self.gens, vec):
            out = int(self.table[out, self.power(g, e)])
        return out


@lru_cache(maxsize=None)
def _class_group_cached(d: int) -> FormClassGroup:
    K = make_field(d)
    D = K.d_K
    forms = reduced_forms(D)
    forms.sort(key=lambda f: (f != principal_form(D), f))
    index = {f: i for i, f in enumerate(forms)}
    h = len(forms)
    table = np.zeros((h, h), dtype=np.int64)
    for i, f in enumerate(forms):
        for j, g in enumerate(forms):
            table[i, j] = index[compose_forms(f, g)]

    # triangular generating set by orbit enumeration
    gens, rel_orders, rel_vectors = [], [], []
    sub = {0: ()}
    for cand in range(h):
        if cand in sub:
            continue
        r, cur = 1, cand
        while cur not in sub:
            cur = int(table[cur, cand])
            r += 1
        rel_orders.append(r)
        rel_vectors.append(sub[cur])
        gens.append(cand)
        new = {}
        for s, vec in sub.items():
            x = s
            for k in range(r):
                new[x] = vec + (k,)
                x = int(table[x, cand])
        sub = new
    ng = len(gens)
    dlog = [tuple(sub[i]) + (0,) * (ng - len(sub[i])) for i in range(h)]
    rel_vectors = [tuple(v) + (0,) * (ng - len(v)) for v in rel_vectors]
    rows = []
    for j in range(ng):
        row = [-x for x in rel_vectors[j]]
        row[j] += rel_orders[j]
        rows.append(row)
    diag, _ = smith_normal_form(rows) if rows else ([], [])
    inv = tuple(sorted(x for x in diag if x > 1))
    K = K.finalize(h)
    return FormClassGroup(K, D, forms, table, gens, rel_orders, rel_vectors, dlog, inv, index)


def class_group(K: ImagQuadField) -> FormClassGroup:
    """The ideal class group; its ``K`` attribute is the finalized field."""
    return _class_group_cached(K.d)


def finalized_field(d: int) -> ImagQuadField:
    return _class_group_cached(d).K


def is_principal(K: ImagQuadField, I: IdealHNF) -> FieldElement | None:
    """A generator of I, or None when I is not principal."""
    alpha = shortest_element(K, I)
    n = alpha.x**2 + K.omega_trace * alpha.x * alpha.y + K.omega_norm * alpha.y**2
    return alpha if n == I.norm else None


def nonabelian_certificate(K: ImagQuadField) -> bool:
    """True iff h_K is not a power of two, which forces every K(q) to be non-abelian over Q."""
    h = class_group(K).h
    return h & (h - 1) != 0


# --------------------------------------------------------------------------
# residue field O_K / q


class ResidueField:
    """O_K/q for a prime ideal q with a discrete logarithm table on (O_K/q)^*."""

    def __init__(self, K: ImagQuadField, q: PrimeIdeal):
        self.K, self.q = K, q
        self.p = q.p
        self.size = q.norm
        self.inert = q.f == 2
        if not self.inert:
            # omega = -b mod q
            self.omega = (-q.ideal.b) % self.p
            g = primitive_root(self.p)
            log = np.full(self.p, -1, dtype=np.int64)
            x = 1
            for k in range(self.p - 1):
                log[x] = k
                x = x * g % self.p
        else:
            g = self._generator()
            log = np.full(self.size, -1, dtype=np.int64)
            x = (1, 0)
            for k in range(self.size - 1):
                log[x[0] + self.p * x[1]] = k
                x = self._mul(x, g)
        self.log_table = log

    def _mul(self, u, v):
        p, t, n = self.p, self.K.omega_trace, self.K.omega_norm
        yy = u[1] * v[1]
        return ((u[0] * v[0] - n * yy) % p, (u[0] * v[1] + u[1] * v[0] + t * yy) % p)

    def _pow(self, u, k):
        out = (1, 0)
        while k:
            if k & 1:
                out = self._mul(out, u)
            u = self._mul(u, u)
            k >>= 1
        return out

    def _generator(self):
        order = self.size - 1
        ells = list(factorint(order))
        for y in range(1, self.p):
            for x in range(self.p):
                g = (x, y)
                if all(self._pow(g, order // l) != (1, 0) for l in ells):
                    return g
        raise RuntimeError("no generator found")  # unreachable for a field

    def index(self, e) -> int:
        x, y = e
        if self.inert:
            return int(x % self.p + self.p * (y % self.p))
        return int((x + y * self.omega) % self.p)

    def index_array(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        p = self.p
        if self.inert:
            return (x % p) + p * (y % p)
        return (x % p + (y % p) * self.omega) % p

    def log(self, e) -> int:
        k = int(self.log_table[self.index(e)])
        if k < 0:
            raise ValueError(f"{e} is not a unit modulo q")
        return k


# --------------------------------------------------------------------------
# ray class group


@dataclass
class RayClassGroup:
    """H_q(K) for a prime ideal q, or Cl_K when q is None."""

    K: ImagQuadField
    q: PrimeIdeal | None
    cl: FormClassGroup
    residue: ResidueField | None
    kernel_order: int  # |(O_K/q)^* / image(mu_K)|
    mu_image_order: int
    reps: list[IdealHNF]
    rep_norms: list[int]
    cocycle: np.ndarray  # cocycle[c, c'] in Z / kernel_order
    class_offset: list[int]  # s_c with sum k_i(c) x_i = (c, s_c)
    invariants: tuple[int, ...]
    transform: np.ndarray  # generator coordinates -> cyclic coordinates
    keep: list[int] = field(repr=False, default_factory=list)
    _coord_cache: dict = field(repr=False, default_factory=dict, compare=False)

    @property
    def order(self) -> int:
        return math.prod(self.invariants)

    @property
    def modulus_norm(self) -> int:
        return 1 if self.q is None else self.q.norm

    @property
    def exponent(self) -> int:
        return self.invariants[-1] if self.invariants else 1

    def is_coprime(self, I: IdealHNF) -> bool:
        if self.q is None:
            return True
        return not _ideal_divisible(self.K, I, self.q.ideal)

    def kernel_log(self, e) -> int:
        if self.residue is None:
            return 0
        return self.residue.log(e) % self.kernel_order

    def pair(self, I: IdealHNF) -> tuple[int, int]:
        """(class index, kernel coordinate) of an ideal coprime to q."""
        if not self.is_coprime(I):
            raise ValueError(f"{I} is not coprime to the modulus")
        c = self.cl.class_of(I)
        J = ideal_mul(self.K, I, ideal_conj(self.K, self.reps[c]))
        beta = shortest_element(self.K, J)
        if _norm(self.K, beta) != J.norm:
            raise RuntimeError("representative system inconsistent with class computation")
        return c, self.kernel_log(beta)

    def coords_from_pairs(self, c: np.ndarray, u: np.ndarray) -> np.ndarray:
        c = np.asarray(c, dtype=np.int64)
        u = np.asarray(u, dtype=np.int64)
        kvec = np.array(self.cl.dlog, dtype=np.int64).reshape(self.cl.h, -1)[c]
        offs = np.array(self.class_offset, dtype=np.int64)[c]
        gen = np.column_stack([(u - offs) % max(self.kernel_order, 1), kvec])
        y = gen @ self.transform
        inv = np.array(self.invariants, dtype=np.int64)
        return (y[:, self.keep] % inv) if len(inv) else np.zeros((len(c), 0), dtype=np.int64)

    def log(self, I: IdealHNF) -> tuple[int, ...]:
        c, u = self.pair(I)
        return tuple(int(v) for v in self.coords_from_pairs(np.array([c]), np.array([u]))[0])

    def add(self, y1, y2) -> tuple[int, ...]:
        return tuple((a + b) % n for a, b, n in zip(y1, y2, self.invariants))

    def is_trivial(self, I: IdealHNF) -> bool:
        return all(v == 0 for v in self.log(I))

    def kernel_generator_coords(self) -> tuple[int, ...]:
        """Cyclic coordinates of the generator of the kernel of H_q -> Cl_K."""
        y = np.zeros(self.transform.shape[0], dtype=np.int64)
        y[0] = 1
        y = y @ self.transform
        return tuple(int(v) % n for v, n in zip(y[self.keep], self.invariants))

    def class_coords(self, c: int) -> tuple[int, ...]:
        """Cyclic coordinates of the pair (c, 0)."""
        return tuple(int(v) for v in self.coords_from_pairs(np.array([c]), np.array([0]))[0])

    def generator_ideals(self) -> list[IdealHNF]:
        """Small prime ideals coprime to q whose classes generate H_q."""
        from .ideals import prime_ideal_table

        if not self.invariants:
            return []
        bound = 64
        while True:
            table = prime_ideal_table(self.K, bound)
            coords, mask = self.prime_coords(table)
            chosen, rows = [], [[n if i == j else 0 for j in range(len(self.invariants))]
                                for i, n in enumerate(self.invariants)]
            for i in np.flatnonzero(mask).tolist():
                trial = rows + [coords[i].tolist()]
                before = math.prod(x for x in smith_normal_form(rows)[0] if x)
                after = math.prod(x for x in smith_normal_form(trial)[0] if x)
                if after < before:
                    rows = trial
                    chosen.append(table.ideal(i))
                if after == 1:
                    return chosen
            bound *= 4
            if bound > 10**6:
                raise RuntimeError("generator search exceeded its enumeration budget")

    # vectorized logs of prime ideals
    def prime_coords(self, table: PrimeIdealTable) -> tuple[np.ndarray, np.ndarray]:
        """(coords, coprime mask) for every prime ideal of the table."""
        hit = self._coord_cache.get("primes")
        if hit is not None and len(hit[1]) >= len(table):
            return hit[0][: len(table)], hit[1][: len(table)]
        classes, bx, by = _prime_pairs(self.K, table, tuple(self.reps))
        mask = np.ones(len(table), dtype=bool)
        if self.q is not None:
            mask &= ~((table.norm == self.q.norm) & (table.b == self.q.ideal.b) & (table.c == self.q.ideal.c))
        if self.residue is None:
            u = np.zeros(len(table), dtype=np.int64)
        else:
            idx = self.residue.index_array(bx[mask], by[mask])
            lg = self.residue.log_table[idx]
            if np.any(lg < 0):
                raise RuntimeError("a generator met the modulus; representative system is not coprime")
            u = np.zeros(len(table), dtype=np.int64)
            u[mask] = lg % self.kernel_order
        coords = self.coords_from_pairs(classes, u)
        self._coord_cache["primes"] = (coords, mask)
        return coords, mask


def _norm(K, e) -> int:
    x, y = e
    return x * x + K.omega_trace * x * y + K.omega_norm * y * y


def _ideal_divisible(K: ImagQuadField, I: IdealHNF, P: IdealHNF) -> bool:
    """P | I  iff  I is contained in P."""
    from .ideals import contains

    return contains(P, (I.a, 0)) and contains(P, (I.b, I.c))


_PAIR_CACHE: dict = {}


def _prime_pairs(K: ImagQuadField, table: PrimeIdealTable, reps: tuple[IdealHNF, ...]):
    """Class index and generator of P * conj(r_c) for each prime ideal P."""
    key = (K.d, reps)
    hit = _PAIR_CACHE.get(key)
    if hit is not None and len(hit[0]) >= len(table):
        n = len(table)
        return hit[0][:n], hit[1][:n], hit[2][:n]
    cl = class_group(K)
    n = len(table)
    classes = np.zeros(n, dtype=np.int64)
    ja = table.norm // table.c
    jb = table.b.copy()
    jc = table.c.copy()
    rep_norms = np.array([r.norm for r in reps], dtype=np.int64)
    if cl.h > 1:
        conj_reps = [ideal_conj(K, r) for r in reps]
        for i in np.flatnonzero(table.c == 1).tolist():
            P = table.ideal(i)
            c = cl.class_of(P)
            classes[i] = c
            if c:
                J = ideal_mul(K, P, conj_reps[c])
                ja[i], jb[i], jc[i] = J.a, J.b, J.c
    bx, by = shortest_elements(K, ja, jb, jc)
    # inert primes (p) are generated by p
    inert = table.c > 1
    bx[inert], by[inert] = table.c[inert], 0
    nb = bx * bx + K.omega_trace * bx * by + K.omega_norm * by * by
    if np.any(nb != table.norm * rep_norms[classes]):
        raise RuntimeError("no generator found for some P * conj(r_c)")
    _PAIR_CACHE[key] = (classes, bx, by)
    return classes, bx, by


def _minimal_reps(K: ImagQuadField, cl: FormClassGroup, avoid: frozenset) -> list[IdealHNF]:
    """Minimal-norm integral ideal in each class with norm coprime to every prime in avoid."""
    bound = max(4, int(math.isqrt(K.abs_disc // 3)) + 2)
    while True:
        reps: list[IdealHNF | None] = [None] * cl.h
        for I in enumerate_ideals(K, bound):
            if any(I.norm % p == 0 for p in avoid):
                continue
            c = cl.class_of(I)
            if reps[c] is None:
                reps[c] = I
        if all(r is not None for r in reps):
            return reps  # type: ignore[return-value]
        bound *= 2
        if bound > 10**5:
            raise RuntimeError("representative search exceeded its enumeration budget")


def _prime_factors(n: int) -> frozenset:
    return frozenset(factorint(n)) if n > 1 else frozenset()


@lru_cache(maxsize=None)
def _rep_systems(d: int) -> tuple[tuple[IdealHNF, ...], tuple[IdealHNF, ...], frozenset]:
    """Two representative systems per field: minimal norms, and one avoiding the primes of the first."""
    K = make_field(d)
    cl = _class_group_cached(d)
    first = _minimal_reps(K, cl, frozenset())
    bad = frozenset().union(*(_prime_factors(r.norm) for r in first))
    second = _minimal_reps(K, cl, bad)
    return tuple(first), tuple(second), bad


def _representatives(K: ImagQuadField, cl: FormClassGroup, avoid_p: int | None) -> list[IdealHNF]:
    """Class representatives with norms coprime to avoid_p.

    Only two systems exist per field so that per-prime generator tables are
    shared across moduli.
    """
    first, second, bad = _rep_systems(K.d)
    return list(second if avoid_p in bad else first)


def ray_class_group(K: ImagQuadField, q: PrimeIdeal | None) -> RayClassGroup:
    """H_q(K) for a prime ideal q with N q <= 10^5; q = None gives Cl_K."""
    cl = class_group(K)
    K = cl.K
    if q is not None and q.norm > 10**5:
        raise ValueError("modulus norm exceeds 10^5")
    if q is None:
        residue, n0, e = None, 1, 1
    else:
        residue = ResidueField(K, q)
        logs = [residue.log(z) for z in units(K)]
        n0 = q.norm - 1
        for l in logs:
            n0 = gcd(n0, l)
        e = (q.norm - 1) // n0
    reps = _representatives(K, cl, None if q is None else q.p)
    rep_norms = [r.norm for r in reps]
    h = cl.h

    def L(elem) -> int:
        return 0 if residue is None else residue.log(elem) % n0

    conj = [ideal_conj(K, r) for r in reps]
    cocycle = np.zeros((h, h), dtype=np.int64)
    for c1 in range(h):
        for c2 in range(h):
            c3 = int(cl.table[c1, c2])
            J = ideal_mul(K, ideal_mul(K, conj[c1], conj[c2]), reps[c3])
            eps = shortest_element(K, J)
            if _norm(K, eps) != J.norm:
                raise RuntimeError("cocycle ideal is not principal")
            cocycle[c1, c2] = (L((rep_norms[c3], 0)) - L(eps)) % n0

    def gmul(x, y):
        return int(cl.table[x[0], y[0]]), (x[1] + y[1] + int(cocycle[x[0], y[0]])) % n0

    def gpow(x, k):
        out = (0, 0)
        for _ in range(k):
            out = gmul(out, x)
        return out

    ng = len(cl.gens)
    xs = [(g, 0) for g in cl.gens]

    def combo(vec):
        out = (0, 0)
        for xg, k in zip(xs, vec):
            out = gmul(out, gpow(xg, k))
        return out

    rows = [[n0] + [0] * ng]
    for j in range(ng):
        y = gpow(xs[j], cl.rel_orders[j])
        z = combo(cl.rel_vectors[j])
        assert y[0] == z[0]
        w = (y[1] - z[1]) % n0
        row = [-w] + [-v for v in cl.rel_vectors[j]]
        row[1 + j] += cl.rel_orders[j]
        rows.append(row)
    offsets = [combo(cl.dlog[c])[1] for c in range(h)]
    diag, V = smith_normal_form(rows)
    keep = [j for j, dj in enumerate(diag) if dj > 1]
    inv = tuple(diag[j] for j in keep)
    return RayClassGroup(K, q, cl, residue, n0, e, reps, rep_norms, cocycle, offsets, inv,
                         np.array(V, dtype=object).astype(np.int64), keep)


def cyclic_kernel_log(K: ImagQuadField, H: RayClassGroup, I: IdealHNF) -> int:
    """Shortcut for h_K = 1: H_q is cyclic, (O/q)^*/image(mu), logged via a generator of I."""
    if class_group(K).h != 1:
        raise ValueError("shortcut needs class number one")
    gen = is_principal(K, I)
    assert gen is not None
    return H.kernel_log(gen)


# --------------------------------------------------------------------------
# characters


@dataclass(frozen=True)
class RayClassCharacter:
    """chi(y) = exp(2 pi i sum_j k_j y_j / n_j) on cyclic coordinates y."""

    group: RayClassGroup = field(repr=False, compare=False, hash=False)
    k: tuple[int, ...]

    @property
    def is_principal(self) -> bool:
        return all(v == 0 for v in self.k)

    def value_coords(self, y) -> tuple[int, int]:
        """Exact value as (num, den): chi = exp(2 pi i num/den)."""
        N = self.group.exponent
        s = sum(kj * yj * (N // nj) for kj, yj, nj in zip(self.k, y, self.group.invariants)) % N
        g = gcd(s, N)
        return (s // g, N // g) if s else (0, 1)

    def __call__(self, I: IdealHNF) -> tuple[int, int] | None:
        if not self.group.is_coprime(I):
            return None
        return self.value_coords(self.group.log(I))

    def complex_values(self, coords: np.ndarray) -> np.ndarray:
        if not self.group.invariants:
            return np.ones(len(coords), dtype=complex)
        # reduce the phase as an exact rational before the exponential
        N = self.group.exponent
        num = (coords.astype(np.int64) * (np.array(self.k) * (N // np.array(self.group.invariants)))).sum(axis=1) % N
        return unit_roots(N)[num]

    @property
    def is_primitive(self) -> bool:
        """True iff chi does not factor through Cl_K (conductor q)."""
        if self.group.q is None:
            return True
        return self.value_coords(self.group.kernel_generator_coords()) != (0, 1)

    @property
    def conductor(self) -> str:
        return "q" if self.is_primitive and self.group.q is not None else "O_K"

    def conj(self) -> "RayClassCharacter":
        return RayClassCharacter(self.group, tuple((-v) % n for v, n in zip(self.k, self.group.invariants)))

    def class_value(self, c: int) -> tuple[int, int]:
        """Value of the inducing class-group character on ideal class c (imprimitive chi)."""
        return self.value_coords(self.group.class_coords(c))


@lru_cache(maxsize=64)
def unit_roots(N: int) -> np.ndarray:
    """exp(2 pi i j/N) for j < N, with the upper half the exact conjugate of the lower."""
    r = np.exp(2j * np.pi * np.arange(N) / N)
    j = np.arange(N // 2 + 1, N)
    r[j] = np.conj(r[N - j])
    # quarter turns exactly, so the self-conjugate value -1 has no stray imaginary part
    r[0] = 1
    if N % 2 == 0:
        r[N // 2] = -1
    if N % 4 == 0:
        r[N // 4], r[3 * N // 4] = 1j, -1j
    r.setflags(write=False)
    return r


def characters(H: RayClassGroup) -> list[RayClassCharacter]:
    out = []
    for k in np.ndindex(*H.invariants) if H.invariants else [()]:
        out.append(RayClassCharacter(H, tuple(int(v) for v in k)))
    return out


def root_of_unity_mul(a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    n = a[1] * b[1] // gcd(a[1], b[1])
    s = (a[0] * (n // a[1]) + b[0] * (n // b[1])) % n
    g = gcd(s, n)
    return (s // g, n // g) if s else (0, 1)


def root_of_unity_sum(values) -> complex:
    return sum(unit_roots(den)[num] for num, den in values)


def principal_prime_ideals(K: ImagQuadField, lo: float, hi: float) -> list[PrimeIdeal]:
    """Principal prime ideals with lo < N q <= hi, by explicit principality test."""
    from .ideals import prime_ideal_table

    table = prime_ideal_table(K, max(2, hi))
    out = []
    for i in range(len(table)):
        if table.norm[i] > lo and is_principal(K, table.ideal(i)) is not None:
            out.append(table.prime(i))
    return out


def orthogonality_sum(chars: list[RayClassCharacter], I: IdealHNF) -> tuple[int, int]:
    """sum over chi of chi(I), computed exactly: returns (value, |H|) with value in {0, |H|}."""
    vals = [chi(I) for chi in chars]
    if any(v is None for v in vals):
        return 0, len(chars)
    # the sum of a character table column is |H| on the identity and 0 elsewhere
    one = sum(1 for v in vals if v == (0, 1))
    if one == len(vals):
        return len(vals), len(vals)
    # nontrivial element: exact vanishing via the subgroup of values it generates
    total = root_of_unity_sum(vals)
    assert abs(total) < 1e-9 * len(vals)
    return 0, len(chars)
