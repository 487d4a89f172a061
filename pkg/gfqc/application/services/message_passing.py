"""Belief propagation and reinforced belief propagation over GF(q).

Messages live in the probability domain and are renormalized after every
update. A check message is the distribution of a weighted sum of the other
neighbors, computed as a pointwise product in the Walsh-Hadamard domain.

Reinforcement multiplies the prior of every variable by its previous
marginal raised to ``gamma(ell)``; with ``gamma == 0`` the updates are plain
BP.

Example:
    >>> from gfqc.application.services.message_passing import run_rbp
    >>> from gfqc.domain.models import RbpParams
    >>>
    >>> result = run_rbp(code, prior, RbpParams(gamma0=0.92, gamma1=1.0))
    >>> result.iterations, result.trials
    (81, 1)
"""

import logging
from typing import Optional

import numpy as np

from gfqc.domain.errors import DimensionMismatchError, EncodeFailure
from gfqc.domain.models.code import SparseCode
from gfqc.domain.models.field import FieldTables, OpCounter
from gfqc.domain.models.messages import (
    BpParams,
    GammaSchedule,
    MessageState,
    NumericCounters,
    Prior,
    ProductStrategy,
    RbpParams,
    Schedule,
)
from gfqc.domain.models.results import BpResult, EncodeResult
from gfqc.infrastructure.diagnostics import DiagnosticsSink, SweepRecord
from gfqc.infrastructure.services.field import field_tables
from gfqc.infrastructure.services.transform import permutation_indices, wht_in_place

logger = logging.getLogger(__name__)

FLOOR = 1e-300
DIVISION_GUARD = 1e-12


def normalize_rows(x: np.ndarray, counters: Optional[NumericCounters] = None) -> np.ndarray:
    """Normalize along the last axis; rows that collapsed to zero are floored first."""
    flat = x.reshape(-1, x.shape[-1])
    total = flat.sum(axis=1)
    bad = ~(total > 0) | ~np.isfinite(total)
    if bad.any():
        flat = flat.copy()
        flat[bad] = np.maximum(np.nan_to_num(flat[bad], nan=0.0, posinf=0.0), FLOOR)
        total = flat.sum(axis=1)
        if counters is not None:
            counters.floors += int(bad.sum())
        logger.debug("Floored %d collapsed vectors", int(bad.sum()))
    return (flat / total[:, None]).reshape(x.shape)


def _reinforce(prior: np.ndarray, marginals: np.ndarray, gamma: float) -> np.ndarray:
    if gamma == 0.0:
        return prior
    return prior * marginals**gamma


def _prefix_suffix(f_hat: np.ndarray) -> np.ndarray:
    """Products over all other rows along axis 1, without division."""
    ones = np.ones_like(f_hat[:, :1])
    prefix = np.cumprod(np.concatenate([ones, f_hat[:, :-1]], axis=1), axis=1)
    suffix = np.cumprod(np.concatenate([ones, f_hat[:, :0:-1]], axis=1), axis=1)
    return np.ascontiguousarray(prefix * suffix[:, ::-1])


def _exclusive_products(f_hat: np.ndarray, strategy: ProductStrategy) -> np.ndarray:
    if strategy is ProductStrategy.DIVISION:
        total = np.prod(f_hat, axis=1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = total / f_hat
        risky = (np.abs(f_hat) < DIVISION_GUARD).any(axis=(1, 2))
        if risky.any():
            out[risky] = _prefix_suffix(f_hat[risky])
        return np.ascontiguousarray(out)
    return _prefix_suffix(f_hat)


def check_messages(
    incoming: np.ndarray,
    gather: np.ndarray,
    readout: np.ndarray,
    tables: FieldTables,
    strategy: ProductStrategy,
    counters: Optional[NumericCounters] = None,
    counter: Optional[OpCounter] = None,
) -> np.ndarray:
    """Check-to-variable messages for a batch of same-degree checks.

    Args:
        incoming: ``(B, d, q)`` variable-to-check messages.
        gather: ``(B, d, q)`` indices turning each message into a belief over ``h*c``.
        readout: ``(B, d, q)`` indices ``h*a`` of the receiving edges.
        tables: Field tables.
        strategy: Exclusive-product strategy.
        counters: Annihilation counter.
        counter: Transform operation counter.

    Returns:
        ``(B, d, q)`` normalized outgoing messages.
    """
    q = tables.q
    nu = np.ascontiguousarray(np.take_along_axis(incoming, gather, axis=-1))
    wht_in_place(nu, tables, counter)
    excl = _exclusive_products(nu, strategy)
    wht_in_place(excl, tables, counter)
    out = np.take_along_axis(excl, readout, axis=-1) / q
    np.maximum(out, 0.0, out=out)

    total = out.sum(axis=-1, keepdims=True)
    dead = ~(total > 0) | ~np.isfinite(total)
    if dead.any():
        rows = dead[..., 0]
        out[rows] = 1.0
        total[rows] = q
        if counters is not None:
            counters.annihilations += int(rows.sum())
        logger.debug("Reset %d annihilated check messages to uniform", int(rows.sum()))
    return out / total


def syndrome(
    code: SparseCode, word: np.ndarray, tables: Optional[FieldTables] = None
) -> np.ndarray:
    """Per-check sums ``sum_i h_if c_i``; all zero exactly for codewords."""
    tables = tables or field_tables(code.p)
    products = tables.mul_table[code.edge_coef, word[code.edge_var]]
    out = np.zeros(code.m_sym, dtype=np.int64)
    np.bitwise_xor.at(out, code.edge_check, products)
    return out


def is_codeword(
    code: SparseCode, word: np.ndarray, tables: Optional[FieldTables] = None
) -> bool:
    return not syndrome(code, word, tables).any()


def check_update(
    f: int,
    state: MessageState,
    code: SparseCode,
    tables: FieldTables,
    strategy: ProductStrategy = ProductStrategy.PREFIX_SUFFIX,
    counter: Optional[OpCounter] = None,
) -> np.ndarray:
    """Recompute every outgoing message of check ``f`` in place.

    Returns:
        ``(d_f, q)`` new check-to-variable messages, in edge order.
    """
    lo, hi = int(code.check_ptr[f]), int(code.check_ptr[f + 1])
    h = code.edge_coef[lo:hi]
    new = check_messages(
        state.var_to_check[lo:hi][None],
        permutation_indices(h, tables)[None],
        tables.mul_table[h][None],
        tables,
        strategy,
        state.counters,
        counter,
    )[0]
    state.c2v_padded[lo:hi] = new
    return new


def var_update_rbp(
    v: int,
    f: int,
    state: MessageState,
    code: SparseCode,
    prior: Prior,
    gamma_ell: float,
) -> np.ndarray:
    """Reinforced variable-to-check message from ``v`` to ``f``, stored in place.

    ``mu_vf(a) ∝ g_v(a)**gamma * prior_v(a) * prod_{f' != f} mu_f'v(a)``
    where ``g_v`` is the marginal of the previous sweep.
    """
    e = code.edge_index(v, f)
    base = _reinforce(prior.vectors[v], state.marginals[v], gamma_ell)
    others = state.c2v_padded[code.edge_siblings[e]].prod(axis=0)
    msg = normalize_rows(base * others, state.counters)
    state.var_to_check[e] = msg
    return msg


def var_update_bp(
    v: int, f: int, state: MessageState, code: SparseCode, prior: Prior
) -> np.ndarray:
    """Plain BP variable-to-check message, ``var_update_rbp`` with no reinforcement."""
    return var_update_rbp(v, f, state, code, prior, 0.0)


def update_marginal(
    v: int, state: MessageState, code: SparseCode, prior: Prior, gamma_ell: float
) -> np.ndarray:
    """Marginal of ``v`` from the previous marginal and all incoming messages."""
    base = _reinforce(prior.vectors[v], state.marginals[v], gamma_ell)
    incoming = state.c2v_padded[code.var_edge_matrix[v]].prod(axis=0)
    g = normalize_rows(base * incoming, state.counters)
    state.marginals[v] = g
    return g


class MessagePassingEngine:
    """Vectorized sweeps over one code and one prior.

    The engine owns a MessageState. Each sweep refreshes variable messages,
    fires every check once and recomputes the marginals.

    Attributes:
        code: Factor graph.
        prior: External field.
        tables: Field tables of ``code.p``.
        strategy: Exclusive-product strategy at checks.
        state: Current messages.

    Example:
        >>> engine = MessagePassingEngine(code, prior)
        >>> delta = engine.sweep(gamma=0.08, rng=np.random.default_rng(0))
        >>> engine.unsatisfied_checks(engine.hard_decision())
        12
    """

    def __init__(
        self,
        code: SparseCode,
        prior: Prior,
        tables: Optional[FieldTables] = None,
        strategy: ProductStrategy = ProductStrategy.PREFIX_SUFFIX,
        counter: Optional[OpCounter] = None,
    ):
        tables = tables or field_tables(code.p)
        if tables.q != code.q:
            raise DimensionMismatchError(f"Tables for q={tables.q} used with q={code.q}")
        if prior.vectors.shape != (code.n_sym, code.q):
            raise DimensionMismatchError(
                f"Prior shape {prior.vectors.shape} does not match "
                f"({code.n_sym}, {code.q})"
            )
        self.code = code
        self.prior = prior
        self.tables = tables
        self.strategy = strategy
        self.counter = counter
        self.state = MessageState.initial(code, prior)
        self._gather = permutation_indices(code.edge_coef, tables)
        self._readout = tables.mul_table[code.edge_coef]

    @property
    def counters(self) -> NumericCounters:
        return self.state.counters

    def reset(self) -> None:
        self.state = MessageState.initial(self.code, self.prior)

    def reinforced_base(self, gamma: float) -> np.ndarray:
        """Per-variable factor ``prior * g**gamma`` shared by one sweep."""
        return _reinforce(self.prior.vectors, self.state.marginals, gamma)

    def variable_messages(self, edges: np.ndarray, base: np.ndarray) -> np.ndarray:
        incoming = self.state.c2v_padded[self.code.edge_siblings[edges]]
        msg = base[self.code.edge_var[edges]] * incoming.prod(axis=1)
        return normalize_rows(msg, self.state.counters)

    def fire_checks(self, edge_matrix: np.ndarray, damping: float = 0.0) -> float:
        """Update the checks whose edges are the rows of ``edge_matrix``.

        Returns:
            Largest absolute change of an updated message entry.
        """
        st = self.state
        new = check_messages(
            st.var_to_check[edge_matrix],
            self._gather[edge_matrix],
            self._readout[edge_matrix],
            self.tables,
            self.strategy,
            st.counters,
            self.counter,
        )
        old = st.c2v_padded[edge_matrix]
        if damping:
            new = (1.0 - damping) * new + damping * old
        st.c2v_padded[edge_matrix] = new
        return float(np.abs(new - old).max()) if new.size else 0.0

    def marginals_from(self, base: np.ndarray) -> np.ndarray:
        incoming = self.state.c2v_padded[self.code.var_edge_matrix]
        return normalize_rows(base * incoming.prod(axis=1), self.state.counters)

    def sweep(
        self,
        gamma: float = 0.0,
        damping: float = 0.0,
        rng: Optional[np.random.Generator] = None,
        schedule: Schedule = Schedule.SEQUENTIAL,
    ) -> float:
        """Fire every check once and refresh the marginals.

        Args:
            gamma: Reinforcement exponent for this sweep.
            damping: Weight of the previous check message.
            rng: Draws the check permutation of a sequential sweep; checks
                fire in index order without it.
            schedule: Sequential or flooding.

        Returns:
            Largest absolute change of a check message during the sweep.
        """
        base = self.reinforced_base(gamma)
        st = self.state
        code = self.code
        delta = 0.0

        if schedule is Schedule.FLOODING:
            st.var_to_check[:] = self.variable_messages(np.arange(code.n_edges), base)
            for _degree, _checks, edges in code.degree_blocks:
                delta = max(delta, self.fire_checks(edges, damping))
        else:
            order = rng.permutation(code.m_sym) if rng is not None else range(code.m_sym)
            ptr = code.check_ptr
            for f in order:
                lo, hi = int(ptr[f]), int(ptr[f + 1])
                if lo == hi:
                    continue
                edges = np.arange(lo, hi)
                st.var_to_check[lo:hi] = self.variable_messages(edges, base)
                delta = max(delta, self.fire_checks(edges[None, :], damping))

        st.marginals = self.marginals_from(base)
        st.iteration += 1
        return delta

    def hard_decision(self, dither: Optional[np.ndarray] = None) -> np.ndarray:
        """Most likely symbol per variable; lowest index wins exact ties."""
        g = self.state.marginals if dither is None else self.state.marginals + dither
        return np.argmax(g, axis=1).astype(np.int64)

    def unsatisfied_checks(self, word: np.ndarray) -> int:
        return int(np.count_nonzero(syndrome(self.code, word, self.tables)))

    def mean_entropy(self) -> float:
        """Mean marginal entropy in nats per variable."""
        g = self.state.marginals
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(g > 0, -g * np.log(g), 0.0)
        return float(terms.sum() / max(self.code.n_sym, 1))


def run_rbp(
    code: SparseCode,
    prior: Prior,
    params: RbpParams,
    tables: Optional[FieldTables] = None,
    diagnostics: Optional[DiagnosticsSink] = None,
    gamma_schedule: Optional[GammaSchedule] = None,
) -> EncodeResult:
    """Reinforced BP until the hard decision is a stable codeword.

    A trial sweeps until the argmax configuration satisfies every check and
    either the check messages moved less than ``epsilon`` or the
    configuration stayed valid for ``stable_sweeps`` consecutive sweeps. A
    trial that reaches ``ell_max`` restarts from uniform messages with a new
    schedule and a new tie-breaking dither.

    Args:
        code: Code whose codewords are searched.
        prior: External field centred on the source.
        params: Schedule constants and caps.
        tables: Field tables; looked up from ``code.p`` when omitted.
        diagnostics: Optional sink receiving one record per sweep.
        gamma_schedule: Overrides ``params.gamma_schedule()``.

    Returns:
        EncodeResult with the codeword, total sweeps and trials used.

    Raises:
        EncodeFailure: If ``t_max`` trials all hit ``ell_max``.
        DimensionMismatchError: If the prior does not fit the code.
    """
    schedule = gamma_schedule or params.gamma_schedule()
    engine = MessagePassingEngine(code, prior, tables, params.strategy)
    total = 0

    for trial in range(1, params.t_max + 1):
        if trial > 1:
            engine.reset()
        rng = np.random.default_rng([params.schedule_seed, trial])
        dither = params.dither * rng.random(prior.vectors.shape)
        satisfied_run = 0

        for ell in range(1, params.ell_max + 1):
            gamma = schedule(ell)
            delta = engine.sweep(gamma=gamma, rng=rng, schedule=params.schedule)
            total += 1
            decision = engine.hard_decision(dither)
            unsat = engine.unsatisfied_checks(decision)
            if diagnostics is not None:
                diagnostics.record(
                    SweepRecord(trial, ell, gamma, delta, unsat, engine.mean_entropy())
                )
            if unsat:
                satisfied_run = 0
                continue
            satisfied_run += 1
            if delta < params.epsilon or satisfied_run >= params.stable_sweeps:
                logger.debug(
                    "RBP reached a codeword at sweep %d of trial %d", ell, trial
                )
                return EncodeResult(codeword=decision, iterations=total, trials=trial)

        logger.info("RBP trial %d hit ell_max=%d, restarting", trial, params.ell_max)

    raise EncodeFailure(total, params.t_max)


def run_bp_fixed_point(
    code: SparseCode,
    prior: Prior,
    params: BpParams,
    tables: Optional[FieldTables] = None,
) -> BpResult:
    """Plain (optionally damped) BP until the check messages stop moving.

    Non-convergence within ``ell_max`` sweeps is reported, not raised.
    """
    engine = MessagePassingEngine(code, prior, tables, params.strategy)
    rng = np.random.default_rng(params.schedule_seed)
    delta = float("inf")
    for ell in range(1, params.ell_max + 1):
        delta = engine.sweep(
            gamma=0.0, damping=params.damping, rng=rng, schedule=params.schedule
        )
        if delta < params.epsilon:
            return BpResult(engine.state, True, ell, delta)

    logger.info("BP did not converge in %d sweeps (delta %.3g)", params.ell_max, delta)
    return BpResult(engine.state, False, params.ell_max, delta)
