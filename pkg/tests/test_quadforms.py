import itertools
import random
from math import gcd

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from grmchain.field import build_field, legendre, rank_mod_p
from grmchain.quadforms import (CyclotomicInt, ExpSumValue, R_from_S, Rprime_from_Sprime,
                                classify_single_sum, direct_sum_oracle, form_values, gauss_sum,
                                gauss_value, linear_vector, phase_values, quad_eval,
                                rank_and_disc, rank_and_disc_batch, reachable_phases,
                                scaled_sum_oracle, shifted_sum, symmetric_matrix)


def all_vectors(p, m):
    return np.array(list(itertools.product(range(p), repeat=m)), dtype=np.int64)


def brute_matrix_sum(H, A, p):
    """sum over F_p^m of zeta^{XHX^T + AX^T} as a cyclotomic integer."""
    X = all_vectors(p, H.shape[0])
    vals = (quad_eval(H, X, p) + X @ A) % p
    return CyclotomicInt.from_histogram(p, np.bincount(vals, minlength=p))


def random_sym(rng, p, m, rank=None):
    if rank is None:
        M = rng.integers(0, p, size=(m, m))
        return (M + M.T) % p
    D = np.diag([rng.integers(1, p) for _ in range(rank)] + [0] * (m - rank))
    while True:
        P = rng.integers(0, p, size=(m, m))
        if rank_mod_p(P, p) == m:
            return (P @ D @ P.T) % p


# ---------------------------------------------------------------------------
# cyclotomic integers


def test_cyclotomic_int_arithmetic():
    for p in (3, 5, 7):
        one = CyclotomicInt.integer(p, 1)
        z = CyclotomicInt.zeta(p, 1)
        acc = CyclotomicInt.integer(p, 0)
        for k in range(p):
            acc = acc + CyclotomicInt.zeta(p, k)
        assert acc == CyclotomicInt.integer(p, 0)
        g = CyclotomicInt.gauss(p)
        assert (g * g).as_integer() == legendre(-1, p) * p
        assert z.galois(0) == one
        assert (z * z.galois(p - 1)) == one


# ---------------------------------------------------------------------------
# symmetric matrices


@pytest.mark.parametrize("p,m", [(3, 3), (3, 4), (3, 5), (5, 3), (5, 4)])
def test_symmetric_matrix_represents_form(p, m):
    ctx = build_field(p, m)
    rng = random.Random(7)
    xs = np.array(rng.sample(range(ctx.q), min(80, ctx.q)), dtype=np.int64)
    for _ in range(10):
        coeffs = {i: rng.randrange(ctx.q) for i in range(m // 2 + 1) if rng.random() < 0.7}
        H = symmetric_matrix(ctx, coeffs)
        assert np.array_equal(H, H.T)
        assert np.array_equal(quad_eval(H, ctx.coords[xs], p), form_values(ctx, coeffs, xs))


def test_zero_and_degenerate_top_matrices():
    ctx = build_field(3, 4)
    assert not symmetric_matrix(ctx, {}).any()
    assert not symmetric_matrix(ctx, {0: 0, 1: 0}).any()
    # alpha^{p^2} + alpha = 0 kills the L2 form
    killed = [a for a in range(1, ctx.q) if ctx.add(ctx.power(a, 9), a) == 0]
    assert len(killed) == 8
    for a in killed:
        assert not symmetric_matrix(ctx, {2: a}).any()


def test_linear_vector():
    ctx = build_field(3, 4)
    X = ctx.coords
    for g in (1, 5, 40):
        A = linear_vector(ctx, g)
        assert np.array_equal((X @ A) % 3, form_values(ctx, {}, np.arange(ctx.q), g))


# ---------------------------------------------------------------------------
# rank and discriminant


def test_rank_disc_examples():
    assert rank_and_disc(np.zeros((3, 3), dtype=int), 3) == (0, 1)
    assert rank_and_disc(np.eye(2, dtype=int), 3) == (2, 1)
    assert rank_and_disc(np.diag([1, 2]), 3) == (2, -1)


@settings(max_examples=200)
@given(st.sampled_from([3, 5, 7]), st.integers(1, 6), st.integers(0, 2**32))
def test_rank_matches_elimination_and_det(p, m, seed):
    rng = np.random.default_rng(seed)
    H = random_sym(rng, p, m)
    r, eta = rank_and_disc(H, p)
    assert r == rank_mod_p(H, p)
    if r == m:
        det = int(sympy.Matrix(H.tolist()).det()) % p
        assert eta == legendre(det, p)


@settings(max_examples=150)
@given(st.sampled_from([3, 5]), st.integers(1, 4), st.integers(0, 2**32))
def test_gauss_sum_matches_brute(p, m, seed):
    rng = np.random.default_rng(seed)
    H = random_sym(rng, p, m, rank=int(rng.integers(0, m + 1)))
    assert gauss_sum(H, p).to_cyclotomic(p) == brute_matrix_sum(H, np.zeros(m, dtype=np.int64), p)


@settings(max_examples=150)
@given(st.sampled_from([3, 5]), st.integers(1, 4), st.integers(0, 2**32))
def test_shifted_sum_matches_brute(p, m, seed):
    rng = np.random.default_rng(seed)
    H = random_sym(rng, p, m, rank=int(rng.integers(0, m + 1)))
    A = rng.integers(0, p, size=m)
    assert shifted_sum(H, A, p).to_cyclotomic(p) == brute_matrix_sum(H, A, p)


def test_shifted_sum_cases():
    p = 3
    H = np.diag([1, 1, 2])
    assert shifted_sum(H, np.zeros(3, dtype=int), p) == gauss_sum(H, p).with_phase(0, p)
    assert shifted_sum(np.zeros((2, 2), dtype=int), np.array([1, 0]), p).zero
    # invertible H: always solvable, c = -(1/4) A H^{-1} A^T
    Hinv = np.array(sympy.Matrix(H.tolist()).inv_mod(p).tolist(), dtype=np.int64)
    for A in all_vectors(p, 3):
        s = shifted_sum(H, A, p)
        assert not s.zero
        assert s.phase == (-pow(4, -1, p) * int(A @ Hinv @ A)) % p


def test_batch_equals_single():
    rng = np.random.default_rng(0)
    Hs = np.stack([random_sym(rng, 5, 5) for _ in range(200)])
    r, e = rank_and_disc_batch(Hs, 5)
    assert [(int(a), int(b)) for a, b in zip(r, e)] == [rank_and_disc(H, 5) for H in Hs]


def test_scaling_keeps_rank():
    ctx = build_field(3, 5)
    rng = random.Random(4)
    for _ in range(50):
        coeffs = {i: rng.randrange(ctx.q) for i in range(3)}
        r, eta = rank_and_disc(symmetric_matrix(ctx, coeffs), 3)
        for a in (1, 2):
            r2, eta2 = rank_and_disc(symmetric_matrix(ctx, {i: ctx.scale(a, v) for i, v in coeffs.items()}), 3)
            assert r2 == r
            assert eta2 == eta * legendre(a, 3) ** r


# ---------------------------------------------------------------------------
# field-level sums against the oracle


@pytest.mark.parametrize("p,m", [(3, 3), (3, 4), (3, 5), (5, 3)])
def test_shifted_sum_equals_field_oracle(p, m):
    ctx = build_field(p, m)
    rng = random.Random(p + 10 * m)
    for _ in range(150):
        coeffs = {i: rng.randrange(ctx.q) for i in range(m // 2 + 1) if rng.random() < 0.6}
        g, b = rng.randrange(ctx.q), rng.randrange(p)
        H = symmetric_matrix(ctx, coeffs)
        s = shifted_sum(H, linear_vector(ctx, g), p)
        want = direct_sum_oracle(ctx, coeffs, g, b)
        assert s.to_cyclotomic(p) * CyclotomicInt.zeta(p, b) == want
        # sum over scalar multiples
        assert CyclotomicInt.integer(p, Rprime_from_Sprime(s, b, p)) == scaled_sum_oracle(ctx, coeffs, g, b)
        if g == 0 and b == 0:
            s0 = gauss_sum(H, p)
            assert CyclotomicInt.integer(p, R_from_S(s0, p)) == scaled_sum_oracle(ctx, coeffs)


def test_direct_oracle_zero_input():
    ctx = build_field(3, 4)
    assert direct_sum_oracle(ctx, {}) == CyclotomicInt.integer(3, 81)


@pytest.mark.parametrize("p,m", [(3, 4), (3, 5), (5, 3), (3, 6), (5, 4), (7, 3)])
def test_classify_single_sum_every_alpha(p, m):
    ctx = build_field(p, m)
    for j in range(m // 2 + 1):
        for a in range(1, ctx.q):
            assert classify_single_sum(ctx, a, j).to_cyclotomic(p) == direct_sum_oracle(ctx, {j: a}), (j, a)


def test_classify_single_sum_values_34():
    ctx = build_field(3, 4)
    v1 = {classify_single_sum(ctx, a, 1).to_cyclotomic(3).as_integer() for a in range(1, 81)}
    assert v1 == {-27, 9}
    v2 = {classify_single_sum(ctx, a, 2).to_cyclotomic(3).as_integer() for a in range(1, 81)}
    assert v2 == {81, -9}
    with pytest.raises(ValueError):
        classify_single_sum(ctx, 0, 1)


def test_odd_m_single_sum_carries_surd():
    ctx = build_field(3, 5)
    for a in range(1, ctx.q):
        v = classify_single_sum(ctx, a, 0)
        assert v.surd and v.to_cyclotomic(3).as_integer() is None


def test_R_values():
    p = 3
    assert R_from_S(ExpSumValue(False, 1, None, False, 2), p) == 2 * 9
    assert R_from_S(ExpSumValue(False, -1, None, False, 2), p) == -2 * 9
    assert R_from_S(ExpSumValue(False, 1, None, True, 2), p) == 0
    with pytest.raises(ValueError):
        R_from_S(ExpSumValue(False, 1, 1, False, 2), p)
    s = ExpSumValue(False, 1, 2, False, 3)
    assert Rprime_from_Sprime(s, 1, p) == 2 * 27
    assert Rprime_from_Sprime(s, 0, p) == -27
    t = ExpSumValue(False, -1, 1, True, 1)
    assert Rprime_from_Sprime(t, 2, p) == 0
    assert Rprime_from_Sprime(t, 0, p) == -legendre(-1, p) * 9
    assert Rprime_from_Sprime(ExpSumValue.Zero(), 1, p) == 0


# ---------------------------------------------------------------------------
# reachable phases


def brute_phases(H, p):
    m = H.shape[0]
    out = set()
    for A in all_vectors(p, m):
        s = shifted_sum(H, A, p)
        if not s.zero:
            out.add(s.phase)
    return out


@settings(max_examples=100)
@given(st.sampled_from([3, 5, 7]), st.integers(1, 4), st.integers(0, 2**32))
def test_reachable_phases_matches_brute(p, m, seed):
    rng = np.random.default_rng(seed)
    H = random_sym(rng, p, m, rank=int(rng.integers(0, m + 1)))
    got = reachable_phases(H, p)
    assert got == brute_phases(H, p)
    r, eta = rank_and_disc(H, p)
    assert got == phase_values(r, eta, p)


def test_reachable_phase_examples():
    assert reachable_phases(np.zeros((2, 2), dtype=int), 3) == {0}
    assert reachable_phases(np.diag([1, 0]), 3) == {0, 2}
    assert reachable_phases(np.diag([1, 1]), 5) == set(range(5))


@pytest.mark.parametrize("p,m", [(3, 2), (3, 3), (3, 4), (3, 5), (5, 2), (5, 3), (7, 2)])
def test_two_square_forms_cover_field(p, m):
    """Every element is alpha x^2 + beta y^2 for nonzero alpha, beta.
    Surjectivity only depends on beta/alpha, so alpha = 1."""
    ctx = build_field(p, m)
    sq = sorted({ctx.power(x, 2) for x in range(ctx.q)})
    S = ctx.coords[np.array(sq)]
    w = np.array([p**k for k in range(m)])
    for lam in range(1, ctx.q):
        T = ctx.coords[np.array([ctx.mul(lam, s) for s in sq])]
        sums = ((S[:, None, :] + T[None, :, :]) % p) @ w
        assert len(np.unique(sums)) == ctx.q


# ---------------------------------------------------------------------------
# single-label ranks


@pytest.mark.parametrize("p,m", [(3, 4), (3, 5), (5, 3), (3, 6)])
def test_single_label_rank_dichotomy(p, m):
    ctx = build_field(p, m)
    for i in range(m // 2 + 1):
        Hs = np.stack([symmetric_matrix(ctx, {i: a}) for a in range(1, ctx.q)])
        ranks = set(rank_and_disc_batch(Hs, p)[0].tolist())
        assert ranks <= {m, m - gcd(2 * i, m)}
