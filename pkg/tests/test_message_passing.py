import numpy as np
import pytest

from gfqc.application.services.codec import build_prior
from gfqc.application.services.message_passing import (
    MessagePassingEngine,
    check_update,
    is_codeword,
    normalize_rows,
    run_bp_fixed_point,
    run_rbp,
    syndrome,
    update_marginal,
    var_update_bp,
    var_update_rbp,
)
from gfqc.domain.errors import DimensionMismatchError, EncodeFailure
from gfqc.domain.models.code import SparseCode
from gfqc.domain.models.messages import (
    BpParams,
    ConstantGamma,
    GeometricGamma,
    MessageState,
    Prior,
    ProductStrategy,
    RbpParams,
    Schedule,
)
from gfqc.infrastructure.diagnostics import MemoryDiagnostics
from gfqc.infrastructure.services.field import field_tables

from oracles import direct_check_messages, exact_marginals, random_tree_code


def _uniform_prior(n_sym: int, q: int) -> Prior:
    return Prior(np.full((n_sym, q), 1.0 / q), 0.0, np.zeros(n_sym, dtype=np.int64))


def _random_prior(rng, n_sym: int, q: int) -> Prior:
    vectors = rng.random((n_sym, q)) + 0.05
    vectors /= vectors.sum(axis=1, keepdims=True)
    return Prior(vectors, 1.0, np.zeros(n_sym, dtype=np.int64))


def _single_check(coefs, p):
    return SparseCode.from_checks(len(coefs), [list(enumerate(coefs))], p)


@pytest.mark.parametrize("strategy", list(ProductStrategy))
def test_check_update_matches_enumeration(rng, strategy):
    cases = [(d, p) for d in (2, 3, 4) for p in (1, 2, 3)] * 12 + [(3, 4)] * 8 + [(4, 4)] * 3
    for d, p in cases:
        tables = field_tables(p)
        coefs = [int(h) for h in rng.integers(1, tables.q, size=d)]
        code = _single_check(coefs, p)
        state = MessageState.initial(code, _uniform_prior(d, tables.q))
        incoming = normalize_rows(rng.random((d, tables.q)))
        state.var_to_check[:] = incoming
        out = check_update(0, state, code, tables, strategy)
        expected = direct_check_messages(incoming, coefs, tables)
        assert np.allclose(out, expected, rtol=0, atol=1e-10)
        assert np.array_equal(state.check_to_var, out)


def test_degree_two_check_passes_deltas_through(gf16):
    code = _single_check([1, 1], 4)
    state = MessageState.initial(code, _uniform_prior(2, 16))
    state.var_to_check[:] = 0.0
    state.var_to_check[0, 9] = 1.0
    state.var_to_check[1, 5] = 1.0
    out = check_update(0, state, code, gf16)
    assert np.argmax(out[0]) == 5 and np.isclose(out[0, 5], 1.0)
    assert np.argmax(out[1]) == 9 and np.isclose(out[1, 9], 1.0)


@pytest.mark.parametrize("strategy", list(ProductStrategy))
def test_uniform_in_uniform_out(gf16, strategy):
    code = _single_check([3, 7, 11], 4)
    state = MessageState.initial(code, _uniform_prior(3, 16))
    out = check_update(0, state, code, gf16, strategy)
    assert np.allclose(out, 1.0 / 16)
    assert state.counters.annihilations == 0


def test_degree_one_variable_sends_its_prior(rng):
    code = SparseCode.from_checks(2, [[(0, 1), (1, 2)]], p=2)
    prior = _random_prior(rng, 2, 4)
    state = MessageState.initial(code, prior)
    assert np.allclose(var_update_bp(0, 0, state, code, prior), prior.vectors[0])


def test_degree_two_variable_multiplies_the_other_check(rng):
    code = SparseCode.from_checks(3, [[(0, 1), (1, 1)], [(0, 1), (2, 1)]], p=2)
    prior = _random_prior(rng, 3, 4)
    state = MessageState.initial(code, prior)
    other = normalize_rows(rng.random(4))
    state.c2v_padded[code.edge_index(0, 1)] = other
    msg = var_update_bp(0, 0, state, code, prior)
    expected = prior.vectors[0] * other
    assert np.allclose(msg, expected / expected.sum())
    assert np.array_equal(state.var_to_check[code.edge_index(0, 0)], msg)


def test_uniform_everything_stays_uniform():
    code = SparseCode.from_checks(3, [[(0, 1), (1, 1)], [(0, 1), (2, 1)]], p=2)
    prior = _uniform_prior(3, 4)
    state = MessageState.initial(code, prior)
    assert np.allclose(var_update_bp(0, 1, state, code, prior), 0.25)


def test_reinforced_update(rng):
    code = SparseCode.from_checks(3, [[(0, 1), (1, 1)], [(0, 1), (2, 1)]], p=2)
    prior = _random_prior(rng, 3, 4)
    state = MessageState.initial(code, prior)
    state.marginals[0] = normalize_rows(rng.random(4))
    other = normalize_rows(rng.random(4))
    state.c2v_padded[code.edge_index(0, 1)] = other

    plain = var_update_bp(0, 0, state.copy(), code, prior)
    assert np.allclose(var_update_rbp(0, 0, state.copy(), code, prior, 0.0), plain)

    msg = var_update_rbp(0, 0, state, code, prior, 0.7)
    expected = state.marginals[0] ** 0.7 * prior.vectors[0] * other
    assert np.allclose(msg, expected / expected.sum())


def test_gamma_schedules():
    assert GeometricGamma(1.0, 0.3)(0) == 0.0
    constant = GeometricGamma(0.92, 1.0)
    assert constant(1) == pytest.approx(0.08)
    assert constant(250) == pytest.approx(0.08)
    assert GeometricGamma(0.5, 0.5)(2) == pytest.approx(0.875)
    assert ConstantGamma(0.3)(17) == 0.3
    assert RbpParams(gamma0=0.9, gamma1=0.99).gamma_schedule()(1) == pytest.approx(1 - 0.891)


def test_lone_variable_polarizes_to_prior_argmax():
    code = SparseCode.from_checks(1, [], p=2)
    vectors = np.array([[0.2, 0.35, 0.3, 0.15]])
    prior = Prior(vectors, 1.0, np.array([1]))
    engine = MessagePassingEngine(code, prior)
    for k in range(1, 6):
        engine.sweep(gamma=1.0)
        expected = vectors[0] ** (k + 1)
        assert np.allclose(engine.state.marginals[0], expected / expected.sum())
    for _ in range(200):
        engine.sweep(gamma=1.0)
    assert engine.state.marginals[0, 1] > 1 - 1e-9


def test_collapsed_marginal_is_floored():
    code = SparseCode.from_checks(3, [[(0, 1), (1, 1)], [(0, 1), (2, 1)]], p=1)
    prior = _uniform_prior(3, 2)
    state = MessageState.initial(code, prior)
    state.c2v_padded[code.edge_index(0, 0)] = [1.0, 0.0]
    state.c2v_padded[code.edge_index(0, 1)] = [0.0, 1.0]
    g = update_marginal(0, state, code, prior, 0.0)
    assert np.allclose(g, [0.5, 0.5])
    assert state.counters.floors == 1


def test_engine_rejects_mismatched_prior(small_code):
    code, _ = small_code
    with pytest.raises(DimensionMismatchError):
        MessagePassingEngine(code, _uniform_prior(code.n_sym + 1, code.q))
    with pytest.raises(DimensionMismatchError):
        MessagePassingEngine(code, _uniform_prior(code.n_sym, code.q), field_tables(3))


@pytest.mark.parametrize("schedule", list(Schedule))
def test_messages_stay_normalized(small_code, rng, schedule):
    code, _ = small_code
    prior = build_prior(rng.integers(0, code.q, code.n_sym), 1.5, code.p)
    engine = MessagePassingEngine(code, prior)
    for _ in range(6):
        engine.sweep(gamma=0.1, rng=rng, schedule=schedule)
        st = engine.state
        assert np.allclose(st.var_to_check.sum(axis=1), 1.0, atol=1e-9)
        assert np.allclose(st.check_to_var.sum(axis=1), 1.0, atol=1e-9)
        assert np.allclose(st.marginals.sum(axis=1), 1.0, atol=1e-9)
    assert st.iteration == 6
    assert 0.0 <= engine.mean_entropy() <= np.log(code.q)


def test_satisfying_delta_state_is_a_fixed_point(small_code, random_codeword, rng):
    code, order = small_code
    word = random_codeword(code, order, rng)
    prior = build_prior(rng.integers(0, code.q, code.n_sym), 1.0, code.p)
    engine = MessagePassingEngine(code, prior)
    deltas = np.eye(code.q)[word]
    engine.state.marginals = deltas.copy()
    engine.state.var_to_check[:] = deltas[code.edge_var]
    engine.state.c2v_padded[:-1] = deltas[code.edge_var]

    delta = engine.sweep(gamma=0.5, rng=rng)
    assert delta < 1e-12
    assert np.allclose(engine.state.marginals, deltas)
    assert np.array_equal(engine.hard_decision(), word)
    assert engine.unsatisfied_checks(word) == 0


def test_syndrome(small_code, random_codeword, rng):
    code, order = small_code
    word = random_codeword(code, order, rng)
    assert is_codeword(code, word)
    bad = word.copy()
    bad[code.edge_var[0]] ^= 1
    assert syndrome(code, bad).any()


def test_rbp_keeps_a_codeword_source(small_code, random_codeword, rng):
    code, order = small_code
    word = random_codeword(code, order, rng)
    prior = build_prior(word, 3.0, code.p)
    result = run_rbp(code, prior, RbpParams())
    assert np.array_equal(result.codeword, word)
    assert result.iterations <= 2
    assert result.trials == 1


def test_rbp_reaches_a_codeword(small_code, rng):
    code, _ = small_code
    prior = build_prior(rng.integers(0, code.q, code.n_sym), 1.5, code.p)
    sink = MemoryDiagnostics()
    result = run_rbp(
        code, prior, RbpParams(gamma0=0.9, gamma1=0.99, schedule_seed=3), diagnostics=sink
    )
    assert is_codeword(code, result.codeword)
    assert len(sink.rows) == result.iterations
    assert sink.rows[0].trial == 1 and sink.rows[0].sweep == 1
    assert sink.rows[-1].unsat_checks == 0
    assert sink.rows[0].gamma == pytest.approx(1 - 0.9 * 0.99)


def test_rbp_is_deterministic(small_code, rng):
    code, _ = small_code
    prior = build_prior(rng.integers(0, code.q, code.n_sym), 1.5, code.p)
    params = RbpParams(gamma0=0.9, gamma1=0.99, schedule_seed=11)
    a = run_rbp(code, prior, params)
    b = run_rbp(code, prior, params)
    assert np.array_equal(a.codeword, b.codeword)
    assert (a.iterations, a.trials) == (b.iterations, b.trials)


def test_rbp_exhaustion_raises(small_code, rng):
    code, _ = small_code
    prior = build_prior(rng.integers(0, code.q, code.n_sym), 1.5, code.p)
    with pytest.raises(EncodeFailure) as info:
        run_rbp(code, prior, RbpParams(ell_max=1, t_max=3))
    assert info.value.trials == 3
    assert info.value.iterations == 3


def test_bp_uniform_prior_is_a_fixed_point(small_code):
    code, _ = small_code
    result = run_bp_fixed_point(code, _uniform_prior(code.n_sym, code.q), BpParams())
    assert result.converged
    assert result.iterations == 1
    assert np.allclose(result.state.marginals, 1.0 / code.q)


@pytest.mark.parametrize("schedule", list(Schedule))
def test_bp_is_exact_on_trees(rng, schedule):
    for trial in range(25):
        p = 1 + trial % 2
        code = random_tree_code(rng, int(rng.integers(2, 8)), p)
        prior = _random_prior(rng, code.n_sym, code.q)
        params = BpParams(damping=0.0, epsilon=1e-13, ell_max=100, schedule=schedule)
        result = run_bp_fixed_point(code, prior, params)
        assert result.converged
        assert np.allclose(result.state.marginals, exact_marginals(code, prior.vectors), atol=1e-8)


def test_bp_reports_oscillation():
    code = SparseCode.from_checks(2, [[(0, 1), (1, 1)], [(0, 1), (1, 1)]], p=1)
    prior = Prior(np.array([[0.9, 0.1], [0.1, 0.9]]), 1.0, np.array([0, 1]))
    params = BpParams(damping=0.0, ell_max=50, schedule=Schedule.FLOODING)
    result = run_bp_fixed_point(code, prior, params)
    assert not result.converged
    assert result.iterations == 50
    assert result.max_delta == pytest.approx(0.4)
