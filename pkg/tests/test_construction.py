from collections import Counter

import numpy as np
import pytest

from gfqc.application.services.construction import (
    b_reduce,
    build_code,
    checks_for_rate,
    code_for_bits,
    construct_peg_us_ldpc,
    construct_random_us_ldpc,
    symbols_for_bits,
)
from gfqc.application.services.rank_solver import gf_rank
from gfqc.domain.errors import ConfigurationError, ConstructionError, FieldDomainError
from gfqc.domain.models.code import DegreeProfile, SparseCode

from oracles import enumerate_codewords


def _assert_us_ldpc(code: SparseCode, rate: float):
    assert np.all(code.var_degrees == 2)
    assert code.n_edges == 2 * code.n_sym
    assert code.check_degrees.sum() == code.var_degrees.sum() == code.n_edges
    assert np.all(code.edge_coef >= 1) and np.all(code.edge_coef < code.q)
    target = 2.0 / (1.0 - rate)
    degrees = set(code.check_degrees.tolist())
    assert len(degrees) <= 2
    assert all(abs(d - target) < 1.5 for d in degrees)


def _shared_check_pairs(code: SparseCode) -> int:
    """Number of variable pairs attached to the same two checks (4-cycles)."""
    _, var_checks = code.adjacency
    pairs = Counter(tuple(sorted(fs)) for fs in var_checks if len(fs) == 2)
    return sum(c - 1 for c in pairs.values() if c > 1)


@pytest.mark.parametrize("construct", [construct_peg_us_ldpc, construct_random_us_ldpc])
def test_us_ldpc_profile(construct):
    code = construct(267, 0.33, 6, 7)
    _assert_us_ldpc(code, 0.33)
    assert code.m_sym == checks_for_rate(267, 0.33)
    assert code.profile().is_ultra_sparse
    assert abs(code.profile().mean_check_degree - 2 * 267 / code.m_sym) < 1e-9


def test_rate_half_gives_single_check_degree():
    code = construct_peg_us_ldpc(200, 0.5, 4, 1)
    assert code.degree_histogram() == {4: 100}


def test_benchmark_code_has_average_degree_three():
    code = code_for_bits(1600, 0.33, 6, 7)
    assert code.n_sym == 267
    assert abs(code.check_degrees.mean() - 3.0) < 0.05


@pytest.mark.parametrize("construct", [construct_peg_us_ldpc, construct_random_us_ldpc])
def test_same_seed_same_code(construct):
    a = construct(120, 0.4, 3, 11)
    b = construct(120, 0.4, 3, 11)
    c = construct(120, 0.4, 3, 12)
    assert a.same_graph(b)
    assert not a.same_graph(c)


@pytest.mark.parametrize("n_sym,rate", [(100, 0.5), (150, 0.33), (240, 0.6)])
def test_peg_has_no_four_cycles(n_sym, rate):
    code = construct_peg_us_ldpc(n_sym, rate, 2, 5)
    assert _shared_check_pairs(code) == 0


def test_random_construction_has_no_parallel_edges():
    code = construct_random_us_ldpc(300, 0.5, 2, 9)
    _, var_checks = code.adjacency
    assert all(len(set(fs)) == 2 for fs in var_checks)


def test_invalid_rates():
    with pytest.raises(ConfigurationError):
        construct_peg_us_ldpc(100, 1.2, 2, 0)
    with pytest.raises(ConfigurationError):
        construct_peg_us_ldpc(100, 0.0, 2, 0)
    with pytest.raises(ConstructionError):
        checks_for_rate(2, 0.9)
    with pytest.raises(ConfigurationError):
        construct_peg_us_ldpc(100, 0.5, 9, 0)


def test_symbols_for_bits():
    assert symbols_for_bits(1600, 6) == 267
    assert symbols_for_bits(12, 4) == 3
    with pytest.raises(ConfigurationError):
        symbols_for_bits(0, 2)


def test_b_reduce_zero_is_identity():
    code = construct_peg_us_ldpc(60, 0.5, 2, 1)
    assert b_reduce(code, 0, 1) is code


def test_b_reduce_removes_checks():
    code = construct_peg_us_ldpc(267, 0.33, 6, 7)
    reduced = b_reduce(code, 5, 7)
    assert reduced.m_sym == code.m_sym - 5
    assert reduced.b == 5
    assert reduced.m_base == code.m_sym
    assert np.all(reduced.var_degrees <= 2)
    assert code.n_edges - reduced.n_edges >= 2 * 5
    assert reduced.rate > code.rate
    assert abs((reduced.rate - code.rate) - 5 / code.n_sym) < 1e-12


def test_b_reduce_out_of_range():
    code = construct_peg_us_ldpc(20, 0.5, 2, 1)
    with pytest.raises(ConstructionError):
        b_reduce(code, code.m_sym, 1)


def test_build_code_regenerates():
    a = build_code(80, 40, 3, 4, b=3, construction="random")
    b = code_for_bits(240, 0.5, 3, 4, b=3, construction="random")
    assert a.same_graph(b)
    assert a.construction == "random"
    with pytest.raises(ConfigurationError):
        build_code(80, 40, 3, 4, construction="external")


def test_one_reduction_multiplies_codewords_by_q():
    checked = 0
    for seed in range(30):
        code = construct_peg_us_ldpc(8, 0.5, 2, seed)
        if gf_rank(code) != code.m_sym:
            # a full-row dependency survives the removal of any single check
            continue
        reduced = b_reduce(code, 1, seed)
        before = len(enumerate_codewords(code))
        after = len(enumerate_codewords(reduced))
        assert after == code.q * before
        assert before == code.q ** (code.n_sym - gf_rank(code))
        checked += 1
    assert checked >= 5


def test_from_checks_validation():
    with pytest.raises(FieldDomainError):
        SparseCode.from_checks(2, [[(0, 0), (1, 1)]], p=2)
    with pytest.raises(ConfigurationError):
        SparseCode.from_checks(2, [[(0, 1), (5, 1)]], p=2)
    with pytest.raises(ConfigurationError):
        SparseCode.from_checks(2, [[(0, 1), (0, 2)]], p=2)


def test_degree_profile():
    profile = DegreeProfile.us_ldpc(267, 179)
    assert profile.is_ultra_sparse
    assert sum(f for _, f in profile.rho) == pytest.approx(1.0)
    with pytest.raises(ConfigurationError):
        DegreeProfile(lam=((2, 0.5),), rho=((3, 1.0),))
