"""Truncated logarithmic derivatives of Hecke L-functions and Euler-Kronecker constants.

Phi_chi(x) is the average over t in [1, x] of the partial sums
sum_{N a <= t} Lambda(a) chi(a) / N a.  Each partial sum is a step function of
t that jumps at ideal norms, so the integral collapses to the finite sum

    Phi_chi(x) = sum_{N a <= x} Lambda(a)/N a * chi(a) * (x - N a)/(x - 1).

Every Phi value below uses this closed form; ``phi_chi_integral`` integrates the
step function numerically and serves only as an oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .class_groups import (
    RayClassCharacter,
    RayClassGroup,
    characters,
    class_group,
    unit_roots,
    is_principal,
    ray_class_group,
)
from .field_core import ImagQuadField
from .ideals import (
    IdealHNF,
    PrimeIdeal,
    ideal_norm_counts,
    ideal_pow,
    kronecker_table,
    prime_power_ideals,
    primes_upto,
)

EULER_GAMMA = 0.577215664901533

# constant of the per-character truncation error under GRH
BUDGET_CONSTANT = 2010.0


@dataclass(frozen=True)
class PhiValue:
    chi: RayClassCharacter
    x: float
    value: complex


@dataclass(frozen=True)
class GammaEstimate:
    d_K: int
    Nq: int  # 1 for the base field
    x: float
    gamma: float
    grh_error_budget: float
    imag_residual: float = 0.0
    n_characters: int = 0


def grh_budget(K: ImagQuadField, Nq: int, x: float) -> float:
    """Per-character GRH truncation error for -Phi_chi(x) as an estimate of L'/L(1, chi)."""
    return BUDGET_CONSTANT * math.log(5 * K.abs_disc * Nq) / math.sqrt(x)


def _check_x(x: float) -> None:
    if not x > 1:
        raise ValueError(f"x must exceed 1, got {x}")


def _weights(x: float, norms: np.ndarray, lognp: np.ndarray) -> np.ndarray:
    n = norms.astype(np.float64)
    return lognp / n * (x - n) / (x - 1.0)


def prime_power_weights(H: RayClassGroup, x: float):
    """(cyclic coordinates, weight, N a) of the prime powers a coprime to q with N a <= x."""
    table, idx, exps, norms = prime_power_ideals(H.K, x)
    coords, mask = H.prime_coords(table)
    keep = mask[idx]
    idx, exps, norms = idx[keep], exps[keep], norms[keep]
    lognp = np.log(table.norm[idx].astype(np.float64))
    inv = np.array(H.invariants, dtype=np.int64)
    c = (coords[idx] * exps[:, None]) % inv if len(inv) else coords[idx]
    return c, _weights(x, norms, lognp), norms


def phi_chi(chi: RayClassCharacter, x: float) -> complex:
    """Phi_chi(x) by the closed form, one character at a time."""
    _check_x(x)
    c, w, _ = prime_power_weights(chi.group, x)
    vals = chi.complex_values(c)
    return complex(math.fsum((w * vals.real).tolist()), math.fsum((w * vals.imag).tolist()))


def phi_all(H: RayClassGroup, x: float) -> np.ndarray:
    """Phi_chi(x) for every character, indexed by the character's exponent vector.

    Weights are binned by cyclic coordinates; a multidimensional inverse FFT then
    evaluates sum_y W[y] exp(2 pi i k.y / n) for all k at once.
    """
    _check_x(x)
    c, w, _ = prime_power_weights(H, x)
    if not H.invariants:
        return np.array(math.fsum(w.tolist()), dtype=complex)
    W = np.zeros(H.invariants, dtype=np.float64)
    np.add.at(W, tuple(c.T), w)
    return np.fft.ifftn(W) * W.size


def phi_chi_integral(chi: RayClassCharacter, x: float) -> complex:
    """Oracle: integrate the partial-sum step function over [1, x] numerically."""
    _check_x(x)
    c, w0, norms = prime_power_weights(chi.group, x)
    n = norms.astype(np.float64)
    # recover Lambda(a)/N a from the closed-form weights
    a = w0 * (x - 1.0) / (x - n)
    vals = chi.complex_values(c) * a
    order = np.argsort(n, kind="stable")
    n, vals = n[order], vals[order]
    cum = np.cumsum(vals)

    def partial(t, part):
        k = np.searchsorted(n, t, side="right")
        return 0.0 if k == 0 else getattr(cum[k - 1], part)

    pts = sorted(set(n[(n > 1) & (n < x)].tolist()))
    out = []
    for part in ("real", "imag"):
        total, lo = 0.0, 1.0
        for hi in pts + [x]:
            if hi > lo:
                total += integrate.quad(partial, lo, hi, args=(part,), limit=10)[0]
            lo = hi
        out.append(total)
    return complex(out[0], out[1]) / (x - 1.0)


def trivial_class_member(K: ImagQuadField, H: RayClassGroup, I: IdealHNF) -> bool:
    """a in [1]_q: a = (alpha) with some unit multiple of alpha = 1 mod q (no SNF used)."""
    alpha = is_principal(K, I)
    if alpha is None:
        return False
    return H.kernel_log(alpha) % H.kernel_order == 0


def phi_orthogonality_rhs(H: RayClassGroup, x: float) -> float:
    """Averaged |H| * (trivial-class sum) - (coprime sum), evaluated ideal by ideal."""
    _check_x(x)
    K = H.K
    table, idx, exps, norms = prime_power_ideals(K, x)
    terms = []
    size = H.order
    for i, k, n in zip(idx.tolist(), exps.tolist(), norms.tolist()):
        P = table.ideal(i)
        if not H.is_coprime(P):
            continue
        w = math.log(table.norm[i]) / n * (x - n) / (x - 1.0)
        A = ideal_pow(K, P, k)
        terms.append(w * ((size if trivial_class_member(K, H, A) else 0) - 1))
    return math.fsum(terms)


def imprimitive_correction(chi: RayClassCharacter, x: float) -> complex:
    """Phi_{chi*}(x) - Phi_chi(x): the q-power terms that chi mod q omits."""
    if chi.is_primitive:
        raise ValueError("character is primitive; no correction applies")
    _check_x(x)
    H = chi.group
    q = H.q
    if q is None:
        return 0j
    cl = class_group(H.K)
    terms = []
    k, Nk = 1, q.norm
    while Nk <= x:
        num, den = chi.class_value(cl.class_of(ideal_pow(H.K, q.ideal, k)))
        terms.append(math.log(q.norm) / Nk * (x - Nk) / (x - 1.0) * unit_roots(den)[num])
        k += 1
        Nk *= q.norm
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def phi_star(chi: RayClassCharacter, x: float, phi_value: complex | None = None) -> complex:
    """Phi_{chi*}(x) for the primitive character chi* inducing chi."""
    v = phi_chi(chi, x) if phi_value is None else phi_value
    if not chi.is_primitive:
        v += imprimitive_correction(chi, x)
    return v


def log_deriv_L1(chi: RayClassCharacter, x: float) -> tuple[complex, float]:
    """(estimate of L'/L(1, chi*), GRH budget) from -Phi_{chi*}(x)."""
    if chi.is_principal:
        raise ValueError("principal character has a pole at s = 1")
    return -phi_star(chi, x), grh_budget(chi.group.K, chi.group.modulus_norm, x)


def dirichlet_log_deriv(chi: RayClassCharacter, s: float, X: float) -> complex:
    """Truncated -L'/L(s, chi*) = sum Lambda(a) chi*(a) / N a^s over N a <= X."""
    H = chi.group
    table, idx, exps, norms = prime_power_ideals(H.K, X)
    coords, mask = H.prime_coords(table)
    inv = np.array(H.invariants, dtype=np.int64)
    sel = mask[idx]
    c = (coords[idx[sel]] * exps[sel][:, None]) % inv if len(inv) else coords[idx[sel]]
    n = norms[sel].astype(np.float64)
    w = np.log(table.norm[idx[sel]].astype(np.float64)) * n ** (-s)
    vals = w * chi.complex_values(c)
    total = complex(math.fsum(vals.real.tolist()), math.fsum(vals.imag.tolist()))
    if not chi.is_primitive and H.q is not None:
        cl = class_group(H.K)
        k, Nk = 1, H.q.norm
        while Nk <= X:
            num, den = chi.class_value(cl.class_of(ideal_pow(H.K, H.q.ideal, k)))
            total += math.log(H.q.norm) * Nk ** (-s) * unit_roots(den)[num]
            k += 1
            Nk *= H.q.norm
    return total


def log_deriv_L1_extrapolated(chi: RayClassCharacter, X: float, deltas=(0.1, 0.05)) -> complex:
    """Second estimator of L'/L(1, chi*): Dirichlet series at 1 + delta, linearly extrapolated."""
    d1, d2 = deltas
    f1 = -dirichlet_log_deriv(chi, 1 + d1, X)
    f2 = -dirichlet_log_deriv(chi, 1 + d2, X)
    return (d1 * f2 - d2 * f1) / (d1 - d2)


# --------------------------------------------------------------------------
# rational-prime analogues


def rational_prime_powers(x: float) -> tuple[np.ndarray, np.ndarray]:
    """(n, log p) for prime powers n = p^k <= x."""
    ps = primes_upto(int(x))
    ns, logs = [], []
    cur = ps.astype(np.int64)
    while len(cur):
        ns.append(cur)
        logs.append(np.log(ps[: len(cur)].astype(np.float64)))
        nxt = cur * ps[: len(cur)]
        cur = nxt[nxt <= x]
    if not ns:
        return np.zeros(0, dtype=np.int64), np.zeros(0)
    return np.concatenate(ns), np.concatenate(logs)


def rational_phi(x: float, d_K: int | None = None) -> float:
    """sum_{n <= x} Lambda(n) chi(n)/n * (x - n)/(x - 1) with chi the Kronecker symbol (d_K/.)."""
    _check_x(x)
    n, lg = rational_prime_powers(x)
    w = _weights(x, n, lg)
    if d_K is not None:
        w = w * kronecker_table(d_K)[n % abs(d_K)]
    return math.fsum(w.tolist())


def gamma_recovery(x: float) -> float:
    """Euler's constant from the trivial-character Phi: average of log t minus Phi_0(x)."""
    return (x * math.log(x) - x + 1.0) / (x - 1.0) - rational_phi(x)


def gamma_base(K: ImagQuadField, x: float) -> GammaEstimate:
    """gamma_K = gamma + L'/L(1, chi_{d_K}) from zeta_K = zeta * L(s, chi_{d_K})."""
    if x < 1e3:
        raise ValueError("x must be at least 1000")
    g = EULER_GAMMA - rational_phi(x, K.d_K)
    return GammaEstimate(K.d_K, 1, x, g, grh_budget(K, 1, x), 0.0, 1)


def gamma_ray_class_field(K: ImagQuadField, q: PrimeIdeal, x: float,
                          H: RayClassGroup | None = None,
                          base: GammaEstimate | None = None) -> GammaEstimate:
    """gamma_{K(q)} = gamma_K + sum over chi != chi_0 of L'/L(1, chi*)."""
    if is_principal(K, q.ideal) is None:
        raise ValueError(f"modulus {q.ideal} is not principal")
    if x < q.norm**2:
        raise ValueError("x must be at least N(q)^2")
    H = ray_class_group(K, q) if H is None else H
    base = gamma_base(K, x) if base is None else base
    table = phi_all(H, x)
    terms = []
    for chi in characters(H)[1:]:
        v = complex(table[chi.k])
        if not chi.is_primitive:
            v += imprimitive_correction(chi, x)
        terms.append(v)
    total = complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))
    budget = base.grh_error_budget + len(terms) * grh_budget(K, q.norm, x)
    return GammaEstimate(K.d_K, q.norm, x, base.gamma - total.real, budget, abs(total.imag), len(terms))


# --------------------------------------------------------------------------
# Dedekind zeta at real s


def dedekind_zeta(K: ImagQuadField, s: float, X: int | None = None) -> float:
    """zeta_K(s) for real s >= 1.3 from a truncated sum plus the smoothed tail.

    With A(t) = #{N a <= t} ~ rho t + c0 (c0 = -h/|mu|, the value zeta_K(0)),
    the tail integral of s A(t) t^{-s-1} beyond X is added in closed form.
    """
    if s < 1.3:
        raise ValueError("s must be at least 1.3")
    K = class_group(K).K
    if X is None:
        X = 10**6 if s < 2 else 10**5
    a = ideal_norm_counts(K, X)
    n = np.arange(len(a), dtype=np.float64)
    nz = a > 0
    partial = math.fsum((a[nz] * n[nz] ** (-s)).tolist())
    A = float(a.sum())
    c0 = -K.h_K / K.mu_count
    tail = s * K.rho_K * X ** (1 - s) / (s - 1) + (c0 - A) * X ** (-s)
    return partial + tail


def dirichlet_L_real(s: float, d_K: int) -> float:
    """L(s, chi_{d_K}) = |d|^{-s} sum_a chi(a) zeta(s, a/|d|) via Hurwitz zeta."""
    m = abs(d_K)
    chi = kronecker_table(d_K)
    return sum(int(chi[r]) * special.zeta(s, r / m) for r in range(1, m) if chi[r]) * m ** (-s)


def dedekind_zeta_factored(K: ImagQuadField, s: float) -> float:
    """Oracle: zeta(s) * L(s, chi_{d_K})."""
    return float(special.zeta(s)) * dirichlet_L_real(s, K.d_K)


# --------------------------------------------------------------------------
# small auxiliary series


def digamma(s: complex) -> complex:
    """psi(s) by upward recurrence to Re s >= 20 and the Stirling series there."""
    s = complex(s)
    acc = 0j
    while s.real < 20:
        acc -= 1 / s
        s += 1
    inv2 = 1 / (s * s)
    # Bernoulli terms B_{2k}/(2k s^{2k})
    series = inv2 * (1 / 12 - inv2 * (1 / 120 - inv2 * (1 / 252 - inv2 * (1 / 240 - inv2 / 132))))
    return acc + np.log(s) - 1 / (2 * s) - series


def neg_zeta_log_deriv(sigma: float, X: float = 10**6) -> float:
    """Truncated -zeta'/zeta(sigma) = sum_{n <= X} Lambda(n) n^{-sigma}."""
    n, lg = rational_prime_powers(X)
    return math.fsum((lg * n.astype(np.float64) ** (-sigma)).tolist())
