import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ekc.field_core import make_field, norm
from ekc.ideals import (
    UNIT_IDEAL,
    IdealHNF,
    abel_summation_check,
    arith_table,
    contains,
    contains_arr,
    count_ideals,
    elements_upto,
    enumerate_ideals,
    enumerate_ideals_bruteforce,
    factor_rational_prime,
    ideal_add,
    ideal_conj,
    ideal_mul,
    ideal_norm_counts,
    ideal_pow,
    is_ideal,
    kronecker,
    lambda_over_norm_sum,
    mertens_sum,
    prime_ideal_table,
    principal_ideal,
    psi,
    shortest_element,
    shortest_elements,
)
from conftest import FIELD_MATRIX


def test_small_enumeration_gaussian():
    K = make_field(-1)
    assert [I.norm for I in enumerate_ideals(K, 10)] == [1, 2, 4, 5, 5, 8, 9, 10, 10]


def test_small_enumeration_sqrt_minus_5():
    # 2 ramifies and 3 splits in Q(sqrt(-5)): norms 1, 2, 3, 3, 4
    K = make_field(-5)
    got = [I.norm for I in enumerate_ideals(K, 4)]
    assert got == [I.norm for I in enumerate_ideals_bruteforce(K, 4)]
    assert got == [1, 2, 3, 3, 4]


@pytest.mark.parametrize("d", FIELD_MATRIX)
def test_enumeration_matches_bruteforce(d):
    K = make_field(d)
    assert enumerate_ideals(K, 200) == enumerate_ideals_bruteforce(K, 200)


@pytest.mark.parametrize("d", FIELD_MATRIX)
def test_counts_agree(d):
    K = make_field(d)
    X = 3000
    counts = ideal_norm_counts(K, X)
    ideals = enumerate_ideals(K, X)
    assert int(counts.sum()) == len(ideals) == count_ideals(K, X)
    direct = np.bincount([I.norm for I in ideals], minlength=X + 1)
    assert np.array_equal(direct, counts)


def test_hnf_validity():
    K = make_field(-5)
    assert is_ideal(K, 2, 1, 1)
    assert not is_ideal(K, 2, 0, 1)
    assert is_ideal(K, 3, 1, 1) and is_ideal(K, 3, 2, 1)


@pytest.mark.parametrize("d", FIELD_MATRIX)
def test_ideal_multiplication_norms(d):
    K = make_field(d)
    ideals = enumerate_ideals(K, 30)
    for I in ideals:
        assert ideal_mul(K, I, UNIT_IDEAL) == I
        for J in ideals[:12]:
            P = ideal_mul(K, I, J)
            assert P.norm == I.norm * J.norm
            assert P == ideal_mul(K, J, I)
        # I * conj(I) = (N I)
        assert ideal_mul(K, I, ideal_conj(K, I)) == principal_ideal(K, (I.norm, 0))


@pytest.mark.parametrize("d", FIELD_MATRIX)
@given(x=st.integers(-60, 60), y=st.integers(-60, 60))
@settings(max_examples=60, deadline=None)
def test_principal_ideal_norm(d, x, y):
    K = make_field(d)
    if x == 0 and y == 0:
        return
    I = principal_ideal(K, (x, y))
    assert I.norm == norm(K, (x, y))
    assert contains(I, (x, y))


@pytest.mark.parametrize("d", FIELD_MATRIX)
def test_shortest_element_norm(d):
    K = make_field(d)
    ideals = enumerate_ideals(K, 100)
    for I in ideals:
        e = shortest_element(K, I)
        assert contains(I, e)
        assert norm(K, e) >= I.norm
    a = np.array([I.a for I in ideals])
    b = np.array([I.b for I in ideals])
    c = np.array([I.c for I in ideals])
    xs, ys = shortest_elements(K, a, b, c)
    for I, x, y in zip(ideals, xs, ys):
        assert norm(K, (int(x), int(y))) == norm(K, shortest_element(K, I))


def test_factor_rational_prime():
    K = make_field(-1)
    assert factor_rational_prime(K, 2)[0] == "ramified"
    assert factor_rational_prime(K, 3)[0] == "inert"
    kind, ps = factor_rational_prime(K, 5)
    assert kind == "split" and len(ps) == 2
    assert ideal_mul(K, ps[0].ideal, ps[1].ideal) == principal_ideal(K, (5, 0))


@pytest.mark.parametrize("d", FIELD_MATRIX)
def test_prime_table_products(d):
    K = make_field(d)
    table = prime_ideal_table(K, 400)
    for p in {int(v) for v in table.p}:
        kind, ps = factor_rational_prime(K, p)
        prod = UNIT_IDEAL
        for P in ps:
            prod = ideal_mul(K, prod, ideal_pow(K, P.ideal, 2 if kind == "ramified" else 1))
        assert prod == principal_ideal(K, (p, 0))


def test_kronecker_values():
    assert [kronecker(-4, n) for n in range(1, 8)] == [1, 0, -1, 0, 1, 0, -1]
    assert kronecker(-20, 3) == 1
    assert kronecker(-23, 2) == 1
    assert kronecker(-3, 2) == -1


def test_arith_table_functions():
    K = make_field(-1)
    T = arith_table(K, 50)
    idx = T.index()
    one = idx[UNIT_IDEAL]
    assert T.mu[one] == 1 and T.phi[one] == 1 and T.sigma[one] == 1
    P = factor_rational_prime(K, 5)[1][0].ideal
    i = idx[P]
    assert T.mu[i] == -1 and T.phi[i] == 4 and T.sigma[i] == 6
    assert math.isclose(T.Lambda[i], math.log(5))
    i2 = idx[ideal_pow(K, P, 2)]
    assert T.mu[i2] == 0 and math.isclose(T.Lambda[i2], math.log(5))


def test_psi_and_mertens():
    K = make_field(-1)
    assert psi(K, 1.5) == 0
    # 2 ramified, 5 split: Lambda mass log2 (norm 2, 4) + 2 log5
    assert math.isclose(psi(K, 5), 2 * math.log(2) + 2 * math.log(5))
    assert math.isclose(mertens_sum(K, 5), math.log(2) / 2 + 2 * math.log(5) / 5)


@pytest.mark.parametrize("d", [-1, -5, -23])
def test_abel_summation(d):
    K = make_field(d)
    lhs, rhs = abel_summation_check(K, 5000)
    assert math.isclose(lhs, rhs, rel_tol=1e-12)
    assert math.isclose(lhs, lambda_over_norm_sum(K, 5000), rel_tol=1e-12)


@pytest.mark.parametrize("d", FIELD_MATRIX)
def test_elements_upto_and_membership(d):
    K = make_field(d)
    x, y = elements_upto(K, 60)
    n = x * x + K.omega_trace * x * y + K.omega_norm * y * y
    assert (n >= 1).all() and (n <= 60).all()
    # ideal count from elements: each principal ideal has |mu| generators
    brute = sum(1 for a in range(-20, 21) for b in range(-20, 21) if 1 <= norm(K, (a, b)) <= 60)
    assert len(x) == brute
    I = enumerate_ideals(K, 12)[-1]
    got = contains_arr(I, x, y)
    assert all(bool(g) == contains(I, (int(a), int(b))) for g, a, b in zip(got, x, y))


def test_table_cap():
    with pytest.raises(ValueError):
        prime_ideal_table(make_field(-1), 2 * 10**7)


def test_ideal_key_order():
    K = make_field(-5)
    ideals = enumerate_ideals(K, 50)
    assert ideals == sorted(ideals, key=IdealHNF.key)


@pytest.mark.parametrize("d", [-1, -5, -23])
def test_ideal_add_is_gcd(d):
    K = make_field(d)
    ideals = enumerate_ideals(K, 40)
    for I in ideals:
        assert ideal_add(I, I) == I
        assert ideal_add(I, UNIT_IDEAL) == UNIT_IDEAL
        for J in ideals[:10]:
            G = ideal_add(I, J)
            assert contains(G, (I.a, 0)) and contains(G, (J.b, J.c))
            assert I.norm % G.norm == 0 and J.norm % G.norm == 0
