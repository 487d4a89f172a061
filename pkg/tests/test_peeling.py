import numpy as np
import pytest

from gfqc.application.services.construction import (
    b_reduce,
    construct_peg_us_ldpc,
    construct_random_us_ldpc,
)
from gfqc.application.services.peeling import leaf_removal, residual_core
from gfqc.domain.models.code import SparseCode


def _assert_consistent(code: SparseCode, order):
    seen_checks = set()
    removed_vars = set()
    for step in order.steps:
        assert step.check not in seen_checks
        assert step.pivot not in removed_vars
        assert not removed_vars.intersection(step.free)
        members, _ = code.check_neighbors(step.check)
        assert step.pivot in members.tolist()
        assert set(step.free) <= set(members.tolist())
        seen_checks.add(step.check)
        removed_vars.add(step.pivot)
        removed_vars.update(step.free)
    assert len(order.info_set) == code.n_sym - order.n_peeled
    assert order.core_size == code.m_sym - order.n_peeled
    assert np.all(np.diff(order.info_set) > 0)


def test_unreduced_code_has_complete_core():
    code = construct_peg_us_ldpc(120, 0.5, 2, 3)
    order = leaf_removal(code)
    assert order.steps == ()
    assert order.core_size == code.m_sym
    assert len(order.info_set) == code.n_sym


def test_single_check_with_two_leaves():
    code = SparseCode.from_checks(2, [[(0, 1), (1, 1)]], p=1)
    order = leaf_removal(code)
    assert len(order.steps) == 1
    assert len(order.steps[0].free) == 1
    assert order.is_empty_core
    assert order.info_set.tolist() == list(order.steps[0].free)


@pytest.mark.parametrize("b", [1, 2, 5])
def test_reduced_peg_codes_have_empty_cores(b):
    empty = 0
    seeds = range(20)
    for seed in seeds:
        code = b_reduce(construct_peg_us_ldpc(200, 0.5, 2, seed), b, seed)
        order = leaf_removal(code)
        _assert_consistent(code, order)
        if order.is_empty_core:
            empty += 1
            assert len(order.info_set) == code.n_sym - code.m_sym
            isolated = np.nonzero(code.var_degrees == 0)[0].tolist()
            assert sorted(order.free_union() + isolated) == order.info_set.tolist()
    assert empty >= 0.95 * len(seeds)


def test_core_size_does_not_depend_on_order():
    for seed in range(5):
        code = b_reduce(construct_random_us_ldpc(150, 0.4, 2, seed), 1, seed)
        sizes = {leaf_removal(code, order_seed=s).core_size for s in (None, 1, 2)}
        assert len(sizes) == 1


def test_partial_core_and_idempotence():
    # checks 0 and 1 share variables 0, 1, 2; variable 3 hangs off check 2
    code = SparseCode.from_checks(
        4,
        [
            [(0, 1), (1, 2), (2, 3)],
            [(0, 2), (1, 1), (2, 1)],
            [(2, 1), (3, 1)],
        ],
        p=2,
    )
    order = leaf_removal(code)
    assert [(s.check, s.pivot, s.free) for s in order.steps] == [(2, 3, ())]
    assert order.core_checks == (0, 1)
    assert order.info_set.tolist() == [0, 1, 2]

    core = residual_core(code, order)
    assert core.m_sym == 2
    assert core.var_degrees.tolist() == [2, 2, 2, 0]
    assert leaf_removal(core).steps == ()


def test_isolated_variables_join_the_information_set():
    code = SparseCode.from_checks(4, [[(0, 1), (1, 1)]], p=1)
    order = leaf_removal(code)
    assert order.is_empty_core
    assert order.steps[0].pivot == 0
    assert order.info_set.tolist() == [1, 2, 3]
