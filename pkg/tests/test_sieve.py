import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ekc.field_core import make_field, norm, units
from ekc.ideals import elements_upto, factor_rational_prime, prime_ideal_table
from ekc.sieve import (
    build_context,
    direct_pair_count,
    dual_identity_check,
    error_term_bound,
    error_term_sum,
    f1_general,
    f_general,
    is_prime_element_arr,
    lam,
    rho_general,
    sieve_quadratic_form,
    sieve_upper_bound,
    sieving_primes,
    sifted_count,
)

GAUSS = make_field(-1)


def prime_above(K, p):
    return factor_rational_prime(K, p)[1][0]


def test_weight_examples():
    P = prime_above(GAUSS, 2)
    assert rho_general(GAUSS, (3, 0), [(P, 1)]) == 2
    assert f_general(GAUSS, (3, 0), [(P, 1)]) == 1
    assert rho_general(GAUSS, (1, 1), [(P, 1)]) == 1
    assert f_general(GAUSS, (1, 1), [(P, 1)]) == 2


@pytest.mark.parametrize("t", [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)])
def test_rejects_units_and_zero(t):
    with pytest.raises(ValueError):
        build_context(GAUSS, t, 20)


def test_rejects_small_level():
    with pytest.raises(ValueError):
        build_context(GAUSS, (3, 0), 12)


def test_sieving_primes_skip_small():
    ps = sieving_primes(GAUSS, 50)
    assert all(P.p >= 13 for P in ps)
    assert sorted(P.norm for P in ps) == [13, 13, 17, 17, 29, 29, 37, 37, 41, 41]


@pytest.mark.parametrize("z", [13, 20, 30, 50])
def test_lambda_and_dual_identity(z):
    ctx = build_context(GAUSS, (3, 0), z)
    assert lam(ctx, frozenset()) == 1
    assert all(isinstance(v, Fraction) for v in ctx.lam.values())
    for a in ctx.divisors:
        assert dual_identity_check(ctx, a)
        assert ctx.norm_of(a) <= z
    # off the support lambda is zero
    big = frozenset(range(len(ctx.primes)))
    if ctx.norm_of(big) > z:
        assert lam(ctx, big) == 0
        assert dual_identity_check(ctx, big)


@pytest.mark.parametrize("d,t", [(-2, (5, 1)), (-3, (2, 0)), (-5, (1, 2)), (-23, (3, 1))])
def test_dual_identity_other_fields(d, t):
    ctx = build_context(make_field(d), t, 50)
    assert lam(ctx, frozenset()) == 1
    assert all(dual_identity_check(ctx, a) for a in ctx.divisors)


def test_shift_dividing_prime_has_rho_one():
    # 13 = (3+2i)(3-2i); t = 3 + 2i is divisible by one of them
    ctx = build_context(GAUSS, (3, 2), 20)
    assert sorted(ctx.rho_p) == [1, 2, 2, 2]


def test_dominance_and_quadratic_form():
    ctx = build_context(GAUSS, (3, 0), 13)
    u = 2000
    ub = sieve_upper_bound(ctx, u)
    assert ub == sieve_quadratic_form(ctx, u)
    sifted = sifted_count(ctx, u)
    assert ub >= sifted
    pairs = direct_pair_count(GAUSS, (3, 0), u)
    assert ub >= pairs - 4 * len(units(GAUSS)) * ctx.z


@pytest.mark.parametrize("z", [13, 30, 50])
def test_error_term_bound(z):
    ctx = build_context(GAUSS, (3, 0), z)
    assert error_term_sum(ctx) <= error_term_bound(ctx)


def test_pointwise_majorization():
    ctx = build_context(GAUSS, (3, 0), 50)
    n = len(ctx.primes)
    for r in range(n + 1):
        for s in itertools.combinations(range(n), r):
            s = frozenset(s)
            inner = sum((ctx.lam[b] for b in ctx.divisors if b <= s), Fraction(0))
            assert inner * inner >= (1 if not s else 0)
            if not s:
                assert inner == 1


def brute_pairs(K, t, u):
    def is_prime_elem(x, y):
        n = norm(K, (x, y))
        if n < 2:
            return False
        kind, ps = factor_rational_prime(K, n) if _isprime(n) else (None, [])
        if kind in ("split", "ramified"):
            return True
        r = int(round(n ** 0.5))
        return r * r == n and _isprime(r) and factor_rational_prime(K, r)[0] == "inert"

    count = 0
    xs, ys = elements_upto(K, u)
    for x, y in zip(xs.tolist(), ys.tolist()):
        sx = t[0] * x - K.omega_norm * t[1] * y + 1
        sy = t[0] * y + t[1] * x + K.omega_trace * t[1] * y
        if is_prime_elem(x, y) and is_prime_elem(sx, sy):
            count += 1
    return count


def _isprime(n):
    return n >= 2 and all(n % p for p in range(2, int(n ** 0.5) + 1))


@pytest.mark.parametrize("d,t", [(-1, (3, 0)), (-1, (1, 1)), (-3, (2, 0)), (-2, (1, 1)), (-7, (3, 1))])
def test_direct_pair_count_against_brute_force(d, t):
    K = make_field(d)
    assert direct_pair_count(K, t, 300) == brute_pairs(K, t, 300)


def test_direct_pair_count_small():
    assert direct_pair_count(GAUSS, (3, 0), 2) == brute_pairs(GAUSS, (3, 0), 2)
    assert direct_pair_count(GAUSS, (3, 0), 0.5) == 0
    with pytest.raises(ValueError):
        direct_pair_count(GAUSS, (3, 0), 2e6)


def test_prime_element_detection():
    K = GAUSS
    x = np.array([1, 3, 2, 1, 5, 7])
    y = np.array([1, 0, 1, 2, 0, 0])
    # 1+i, 3 (inert), 2+i, 1+2i are prime; 5 splits; 7 inert
    assert is_prime_element_arr(K, x, y).tolist() == [True, True, True, True, False, True]


def prime_powers(K):
    table = prime_ideal_table(K, 60)
    return [table.prime(i) for i in range(len(table))]


@pytest.mark.parametrize("d", [-1, -5])
@given(data=st.data())
@settings(max_examples=60, deadline=None)
def test_weights_multiplicative(d, data):
    K = make_field(d)
    ps = prime_powers(K)
    idx = data.draw(st.lists(st.integers(0, len(ps) - 1), min_size=2, max_size=4, unique=True))
    exps = data.draw(st.lists(st.integers(1, 3), min_size=len(idx), max_size=len(idx)))
    t = data.draw(st.sampled_from([(3, 0), (1, 1), (2, 1), (5, 0)]))
    fac = [(ps[i], e) for i, e in zip(idx, exps)]
    # distinct primes in the table are coprime
    a, b = fac[:1], fac[1:]
    assert rho_general(K, t, fac) == rho_general(K, t, a) * rho_general(K, t, b)
    assert f_general(K, t, fac) == f_general(K, t, a) * f_general(K, t, b)
    assert f1_general(K, t, fac) == f1_general(K, t, a) * f1_general(K, t, b)


def test_context_f1_matches_convolution():
    ctx = build_context(GAUSS, (3, 2), 50)
    for e in ctx.divisors:
        fac = [(ctx.primes[i], 1) for i in e]
        assert ctx.f1(e) == f1_general(GAUSS, ctx.t, fac)
        assert ctx.f(e) == f_general(GAUSS, ctx.t, fac)
        assert ctx.rho(e) == rho_general(GAUSS, ctx.t, fac)
