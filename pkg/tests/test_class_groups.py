import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ekc.checks import ray_group_size_report
from ekc.class_groups import (
    characters,
    class_group,
    compose_forms,
    cyclic_kernel_log,
    finalized_field,
    ideal_form,
    is_principal,
    nonabelian_certificate,
    orthogonality_sum,
    principal_form,
    principal_prime_ideals,
    ray_class_group,
    reduce_form,
    reduced_forms,
    root_of_unity_mul,
    smith_normal_form,
)
from ekc.field_core import make_field, norm
from ekc.ideals import enumerate_ideals, ideal_mul, prime_ideal_table
from conftest import FIELD_MATRIX


def primes_of_norm(K, n):
    table = prime_ideal_table(K, n)
    return [table.prime(i) for i in range(len(table)) if table.norm[i] == n]


def coprime_ideals(H, x):
    return [I for I in enumerate_ideals(H.K, x) if H.is_coprime(I)]


@pytest.mark.parametrize("d,h,inv", [
    (-1, 1, ()), (-3, 1, ()), (-5, 2, (2,)), (-23, 3, (3,)), (-14, 4, (4,)),
    (-21, 4, (2, 2)), (-65, 8, (2, 4)), (-15, 2, (2,)), (-163, 1, ()),
])
def test_class_numbers(d, h, inv):
    cl = class_group(make_field(d))
    assert cl.h == h
    assert cl.invariants == inv


@given(a=st.integers(1, 50), b=st.integers(-50, 50), c=st.integers(1, 50))
def test_reduce_form_preserves_discriminant(a, b, c):
    D = b * b - 4 * a * c
    if D >= 0:
        return
    A, B, C = reduce_form(a, b, c)
    assert B * B - 4 * A * C == D
    assert abs(B) <= A <= C
    if abs(B) == A or A == C:
        assert B >= 0


@pytest.mark.parametrize("d", FIELD_MATRIX + [-14, -21, -65])
def test_form_group_axioms(d):
    cl = class_group(make_field(d))
    D = cl.D
    assert cl.forms[0] == principal_form(D)
    assert set(cl.forms) == set(reduced_forms(D))
    T = cl.table
    h = cl.h
    assert all(sorted(T[i]) == list(range(h)) for i in range(h))
    assert np.array_equal(T, T.T)
    for i in range(h):
        for j in range(h):
            for k in range(h):
                assert T[T[i, j], k] == T[i, T[j, k]]
    for i in range(h):
        assert cl.element(cl.dlog[i]) == i
        assert compose_forms(cl.forms[i], cl.forms[cl.inverse(i)]) == principal_form(D)


@pytest.mark.parametrize("d", FIELD_MATRIX + [-14, -21, -65])
def test_ideal_class_homomorphism(d):
    K = make_field(d)
    cl = class_group(K)
    ideals = enumerate_ideals(K, 60)
    for I in ideals:
        for J in ideals[:15]:
            assert cl.class_of(ideal_mul(K, I, J)) == cl.table[cl.class_of(I), cl.class_of(J)]
        # trivial class iff principal
        assert (cl.class_of(I) == 0) == (is_principal(K, I) is not None)


def test_sqrt_minus_5_prime_above_2_not_principal():
    K = make_field(-5)
    (P,) = primes_of_norm(K, 2)
    assert is_principal(K, P.ideal) is None
    assert is_principal(K, ideal_mul(K, P.ideal, P.ideal)) is not None


@given(st.lists(st.lists(st.integers(-30, 30), min_size=3, max_size=3), min_size=1, max_size=4))
@settings(max_examples=150, deadline=None)
def test_smith_normal_form(M):
    diag, V = smith_normal_form(M)
    nz = [x for x in diag if x]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert all(x == 0 for x in diag[len(nz):])
    Vm = np.array(V, dtype=object)
    det = round(float(np.linalg.det(np.array(V, dtype=float))))
    assert abs(det) == 1
    MV = np.array(M, dtype=object).dot(Vm)
    # M V = U^-1 diag: column j is a multiple of diag[j]
    for j, dj in enumerate(diag):
        col = MV[:, j]
        assert all((v % dj == 0) if dj else v == 0 for v in col)
    if len(M) == 3:
        detM = round(float(np.linalg.det(np.array(M, dtype=float))))
        assert math.prod(diag) == abs(detM)


def test_gaussian_ray_examples():
    K = make_field(-1)
    (q,) = primes_of_norm(K, 5)[:1]
    assert ray_class_group(K, q).order == 1
    q3 = primes_of_norm(K, 9)[0]
    H = ray_class_group(K, q3)
    assert H.order == 2
    (P2,) = primes_of_norm(K, 2)
    chi = characters(H)[1]
    assert chi(P2.ideal) == (1, 2)
    assert chi.is_primitive and chi.conductor == "q"
    assert characters(H)[0].conductor == "O_K"
    assert chi(q3.ideal) is None


def ray_cases(max_norm=60):
    out = []
    for d in FIELD_MATRIX + [-14, -21]:
        K = finalized_field(d)
        table = prime_ideal_table(K, max_norm)
        for i in range(len(table)):
            out.append((d, table.prime(i)))
    return out


RAY_CASES = ray_cases()


@pytest.mark.parametrize("d,q", RAY_CASES, ids=[f"{d}-{q.ideal}" for d, q in RAY_CASES])
def test_ray_group_size_and_exact_sequence(d, q):
    H = ray_class_group(finalized_field(d), q)
    rep = ray_group_size_report(H)
    assert rep["size_lower"] and rep["size_upper"] and rep["exact_sequence"]
    assert math.prod(H.invariants) == H.order
    assert all(b % a == 0 for a, b in zip(H.invariants, H.invariants[1:]))


@pytest.mark.parametrize("d,Nq", [(-1, 9), (-1, 13), (-3, 7), (-5, 7), (-23, 13), (-14, 3), (-21, 17)])
def test_log_homomorphism_random_pairs(d, Nq):
    K = finalized_field(d)
    q = primes_of_norm(K, Nq)[0]
    H = ray_class_group(K, q)
    ideals = coprime_ideals(H, 400)
    rng = random.Random(d * 1000 + Nq)
    for _ in range(1000):
        I, J = rng.choice(ideals), rng.choice(ideals)
        assert H.log(ideal_mul(K, I, J)) == H.add(H.log(I), H.log(J))


@pytest.mark.parametrize("d,Nq", [(-1, 13), (-5, 7), (-23, 13), (-21, 5)])
def test_log_surjective_and_kernel(d, Nq):
    K = finalized_field(d)
    q = primes_of_norm(K, Nq)[0]
    H = ray_class_group(K, q)
    seen = {H.log(I) for I in coprime_ideals(H, 4000)}
    assert len(seen) == H.order
    # principal ideals (alpha) with alpha = 1 mod q are trivial
    for I in coprime_ideals(H, 500):
        g = is_principal(K, I)
        if g is not None and H.kernel_log(g) == 0:
            assert H.is_trivial(I)
    # generator ideals generate
    gens = H.generator_ideals()
    sub = {tuple(0 for _ in H.invariants)}
    frontier = list(sub)
    while frontier:
        y = frontier.pop()
        for G in gens:
            z = H.add(y, H.log(G))
            if z not in sub:
                sub.add(z)
                frontier.append(z)
    assert len(sub) == H.order


@pytest.mark.parametrize("d,Nq", [(-1, 9), (-1, 13), (-1, 29), (-3, 7), (-3, 4), (-7, 11), (-2, 3)])
def test_cyclic_shortcut_matches_generic(d, Nq):
    K = finalized_field(d)
    q = primes_of_norm(K, Nq)[0]
    H = ray_class_group(K, q)
    assert len(H.invariants) <= 1
    gen = H.kernel_generator_coords()
    for I in coprime_ideals(H, 300):
        u = cyclic_kernel_log(K, H, I)
        expect = tuple((u * g) % n for g, n in zip(gen, H.invariants))
        assert H.log(I) == expect


def test_shortcut_rejects_nontrivial_class_group():
    K = finalized_field(-5)
    H = ray_class_group(K, primes_of_norm(K, 7)[0])
    with pytest.raises(ValueError):
        cyclic_kernel_log(K, H, enumerate_ideals(K, 3)[1])


@pytest.mark.parametrize("d,Nq", [(-1, 13), (-5, 3), (-23, 2), (-21, 5), (-15, 2)])
def test_character_orthogonality(d, Nq):
    K = finalized_field(d)
    q = primes_of_norm(K, Nq)[0]
    H = ray_class_group(K, q)
    chars = characters(H)
    assert len(chars) == H.order
    assert chars[0].is_principal
    ideals = coprime_ideals(H, 200)
    # column relation: sum_chi chi(I) is |H| iff I is trivial in H_q
    for I in ideals:
        val, n = orthogonality_sum(chars, I)
        assert val == (n if H.is_trivial(I) else 0)
    # row relation over the group elements, realized by representative ideals
    reps = {}
    for I in coprime_ideals(H, 4000):
        reps.setdefault(H.log(I), I)
        if len(reps) == H.order:
            break
    assert len(reps) == H.order
    for chi in chars:
        s = sum(np.exp(2j * np.pi * a / b) for a, b in (chi(I) for I in reps.values()))
        assert abs(s - (H.order if chi.is_principal else 0)) < 1e-9


@pytest.mark.parametrize("d,Nq", [(-5, 3), (-23, 2), (-21, 5), (-1, 9)])
def test_primitivity_and_class_values(d, Nq):
    K = finalized_field(d)
    q = primes_of_norm(K, Nq)[0]
    H = ray_class_group(K, q)
    cl = class_group(K)
    chars = characters(H)
    imprim = [chi for chi in chars if not chi.is_primitive]
    # imprimitive characters are exactly those trivial on the kernel: one per class-group character
    assert len(imprim) == cl.h
    for chi in imprim:
        for I in coprime_ideals(H, 150):
            assert chi(I) == chi.class_value(cl.class_of(I))
        for c1 in range(cl.h):
            for c2 in range(cl.h):
                assert root_of_unity_mul(chi.class_value(c1), chi.class_value(c2)) == \
                    chi.class_value(int(cl.table[c1, c2]))
    for chi in chars:
        assert chi.conj().conj() == chi
        for I in coprime_ideals(H, 60):
            a = chi(I)
            assert root_of_unity_mul(a, chi.conj()(I)) == (0, 1)


def test_class_group_as_ray_group():
    K = finalized_field(-65)
    H = ray_class_group(K, None)
    assert H.order == 8 and H.invariants == (2, 4)
    assert all(chi.is_primitive for chi in characters(H))


def test_nonabelian_certificate():
    assert nonabelian_certificate(make_field(-23))
    assert not nonabelian_certificate(make_field(-5))
    assert not nonabelian_certificate(make_field(-1))


def test_principal_primes():
    K = finalized_field(-5)
    got = principal_prime_ideals(K, 0, 50)
    for P in got:
        assert is_principal(K, P.ideal) is not None
    norms = sorted(P.norm for P in got)
    # 29 = 3^2 + 5*2^2 and 41 = 6^2 + 5 split into principal primes; 2, 3, 7 do not
    assert 29 in norms and 41 in norms
    assert not {2, 3, 7} & set(norms)
    assert all(norm(K, is_principal(K, P.ideal)) == P.norm for P in got)


def test_modulus_norm_cap():
    K = finalized_field(-1)
    big = primes_of_norm(K, 100109)
    assert big
    with pytest.raises(ValueError):
        ray_class_group(K, big[0])
