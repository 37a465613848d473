from math import factorial

import pytest

from grmchain.cyclotomic import (T0, T1, L, all_cosets, chain_stats_general, chain_stats_grm2, coset,
                                 coset_size_counts, format_labels, grm2_labels,
                                 grm2_zero_degree_counts, label_dimension, parse_label, parse_labels)
from grmchain.code import grm_dimension


def test_label_order_and_tokens():
    assert T0 < T1 < L(0) < L(1) < L(5)
    assert [x.token for x in grm2_labels(4)] == ["T0", "T1", "L0", "L1", "L2"]
    assert parse_label("L12") == L(12)
    assert format_labels(parse_labels("L2,T0,T1")) == "T0,T1,L2"
    for bad in ("T2", "L", "x", "L-1"):
        with pytest.raises(ValueError):
            parse_label(bad)


def test_label_exponents():
    assert L(0).exponent(3) == 2
    assert L(2).exponent(3) == 10
    assert T1.exponent(3) == 1


def test_coset_examples():
    assert coset(3, 4, 0).size == 1
    assert coset(3, 4, 10).size == 2
    assert coset(3, 5, 4).size == 5
    assert coset(3, 4, 10).rep == 10


@pytest.mark.parametrize("p,m", [(3, 3), (3, 4), (3, 5), (5, 3), (7, 2)])
def test_cosets_partition_and_divide_m(p, m):
    n = p**m - 1
    cs = all_cosets(p, m)
    members = sorted(x for c in cs for x in c.members)
    assert members == list(range(n))
    for c in cs:
        assert m % c.size == 0
        assert {x * p % n for x in c.members} == set(c.members)
        assert c.rep == min(c.members)


@pytest.mark.parametrize("p,m", [(3, 3), (3, 4), (3, 5), (5, 4), (7, 3)])
def test_coset_size_counts_match_enumeration(p, m):
    from collections import Counter
    enum = Counter(c.size for c in all_cosets(p, m))
    assert coset_size_counts(p**m - 1, p) == dict(sorted(enum.items()))


def test_label_dimension_examples():
    assert label_dimension(T0, 3, 4) == 1
    assert label_dimension(L(2), 3, 4) == 2
    assert label_dimension(T1, 3, 5) == 5


@pytest.mark.parametrize("m", range(3, 13))
def test_total_dimension_is_grm_dimension(m):
    for p in (3, 5):
        assert sum(label_dimension(x, p, m) for x in grm2_labels(m)) == grm_dimension(2, m, p)


def test_chain_stats_examples():
    for (p, m), want in {(3, 4): (5, 120, 6, 20), (3, 5): (5, 120, 24, 5), (3, 6): (6, 720, 24, 30)}.items():
        s = chain_stats_grm2(p, m)
        assert (s.lam, s.num_chains, s.mu, s.num_classes) == want


@pytest.mark.parametrize("m", range(3, 40))
def test_chain_stats_invariants(m):
    s = chain_stats_grm2(3, m)
    assert s.lam == m // 2 + 3
    assert s.num_chains == factorial(s.lam)
    assert s.mu * s.num_classes == s.num_chains


@pytest.mark.parametrize("p", [3, 5, 7])
@pytest.mark.parametrize("m", range(3, 13))
def test_general_agrees_with_grm2(p, m):
    n = p**m - 1
    assert chain_stats_general(n, p, grm2_zero_degree_counts(p, m)) == chain_stats_grm2(p, m)


def test_general_at_m60_without_field():
    p, m = 3, 60
    s = chain_stats_general(p**m - 1, p, grm2_zero_degree_counts(p, m))
    assert s.lam == m // 2 + 3
    assert s == chain_stats_grm2(p, m)


def test_general_degenerate_and_errors():
    s = chain_stats_general(1, 3, {})
    assert s.lam == 1
    with pytest.raises(ValueError):
        chain_stats_general(9, 3, {})
    with pytest.raises(ValueError):
        chain_stats_general(8, 3, {1: 5})
