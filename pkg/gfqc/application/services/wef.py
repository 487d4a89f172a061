"""Weight-enumerator estimates from BP fixed points.

A prior ``exp(-L d_H(c, y))`` restricted to codewords tilts the uniform
codebook toward a reference word ``y``. At a BP fixed point the average
distance to ``y`` and the Bethe entropy of the tilted measure give one point
``(D, s(D))`` of the weight-enumerator curve: about ``2^(n s)`` codewords lie
at normalized distance D.
"""

import logging
import math
from typing import Dict, List, Optional, Sequence

import numpy as np

from gfqc.application.services.codec import build_prior
from gfqc.application.services.construction import code_for_bits
from gfqc.application.services.message_passing import (
    check_messages,
    normalize_rows,
    run_bp_fixed_point,
)
from gfqc.application.services.rate_distortion import rd_bound_inv
from gfqc.domain.errors import ConfigurationError
from gfqc.domain.models.code import SparseCode
from gfqc.domain.models.field import FieldTables
from gfqc.domain.models.messages import BpParams, MessageState, Prior, ProductStrategy
from gfqc.domain.models.results import EntropyEstimate, WefPoint
from gfqc.infrastructure.services.field import field_tables
from gfqc.infrastructure.services.transform import permutation_indices, wht_in_place

logger = logging.getLogger(__name__)

FIXED_POINT_TOLERANCE = 1e-6


def avg_distance(state: MessageState, source: np.ndarray, p: int) -> float:
    """Prior-weighted distance ``sum_v sum_a g_v(a) popcount(a XOR y_v)`` per bit."""
    tables = field_tables(p)
    source = np.asarray(source, dtype=np.int64)
    distance = tables.popcount[source[:, None] ^ np.arange(tables.q)[None, :]]
    n_bits = len(source) * p
    return float((state.marginals * distance).sum() / n_bits)


def _xlogy(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.where(x > 0, x * np.log(np.maximum(y, 1e-300)), 0.0)


def bethe_entropy(
    state: MessageState,
    code: SparseCode,
    prior: Prior,
    tables: Optional[FieldTables] = None,
) -> EntropyEstimate:
    """Bethe entropy of the prior-tilted codeword measure, in nats.

    ``S = sum_f S_f + sum_v (1 - d_v) H(b_v)`` with the prior folded into the
    variable beliefs ``b_v ∝ prior_v * prod_f mu_fv``. Each factor term is
    ``S_f = ln Z_f - sum_v sum_a b_fv(a) ln mu_vf(a)`` where ``Z_f`` is the
    weighted parity-satisfying mass, read from the transform domain without
    enumerating configurations.

    Variable-to-check messages are recomputed from the stored check messages
    so the factor beliefs are consistent. The estimate is flagged approximate
    when a factor belief marginal differs from ``b_v`` by more than 1e-6,
    which happens away from a fixed point.
    """
    tables = tables or field_tables(code.p)
    q = tables.q
    c2v = state.c2v_padded

    beliefs = normalize_rows(prior.vectors * c2v[code.var_edge_matrix].prod(axis=1))
    var_entropy = -_xlogy(beliefs, beliefs).sum(axis=1)
    total = float(((1 - code.var_degrees) * var_entropy).sum())

    v2c = normalize_rows(
        prior.vectors[code.edge_var] * c2v[code.edge_siblings].prod(axis=1)
    )
    gather = permutation_indices(code.edge_coef, tables)
    readout = tables.mul_table[code.edge_coef]
    mismatch = 0.0

    for _degree, _checks, edges in code.degree_blocks:
        incoming = v2c[edges]
        nu = np.ascontiguousarray(np.take_along_axis(incoming, gather[edges], axis=-1))
        wht_in_place(nu, tables)
        z = nu.prod(axis=1).sum(axis=-1) / q
        fresh = check_messages(
            incoming, gather[edges], readout[edges], tables, ProductStrategy.PREFIX_SUFFIX
        )
        factor_marg = normalize_rows(incoming * fresh)
        gap = np.abs(factor_marg - beliefs[code.edge_var[edges]]).max()
        mismatch = max(mismatch, float(gap))
        s_f = np.log(np.maximum(z, 1e-300)) - _xlogy(factor_marg, incoming).sum(axis=(1, 2))
        total += float(s_f.sum())

    approximate = mismatch > FIXED_POINT_TOLERANCE
    if approximate:
        logger.debug("Bethe entropy away from a fixed point (mismatch %.2e)", mismatch)
    return EntropyEstimate(nats=total, approximate=approximate)


def wef_sweep(
    code: SparseCode,
    strengths: Sequence[float],
    source: np.ndarray,
    params: Optional[BpParams] = None,
    tables: Optional[FieldTables] = None,
) -> List[WefPoint]:
    """One weight-enumerator point per prior strength.

    Args:
        code: Code under study.
        strengths: Ascending prior strengths L.
        source: Reference word y as symbols.
        params: BP parameters (damped by default).
        tables: Field tables.

    Returns:
        WefPoints in the order of ``strengths``; ``converged`` is False for
        points whose BP run or entropy is not at a fixed point.

    Raises:
        ConfigurationError: If ``strengths`` is not sorted ascending.
    """
    params = params or BpParams()
    tables = tables or field_tables(code.p)
    if any(b < a for a, b in zip(strengths, strengths[1:])):
        raise ConfigurationError("Prior strengths must be sorted ascending")

    n_bits = code.n_sym * code.p
    points = []
    for strength in strengths:
        prior = build_prior(source, strength, code.p, tables)
        result = run_bp_fixed_point(code, prior, params, tables)
        d = avg_distance(result.state, source, code.p)
        estimate = bethe_entropy(result.state, code, prior, tables)
        density = estimate.nats / (n_bits * math.log(2))
        point = WefPoint(
            strength=float(strength),
            avg_distance=d,
            entropy_density=density,
            converged=result.converged and not estimate.approximate,
            iterations=result.iterations,
            bound_rate=rd_bound_inv(min(max(d, 0.0), 0.5)),
        )
        logger.info(
            "L=%.3f D=%.4f s=%.4f converged=%s", strength, d, density, point.converged
        )
        points.append(point)
    return points


def wef_curve(points: Sequence[WefPoint]) -> List[WefPoint]:
    """Converged points only; the others are reported but not plotted."""
    return [pt for pt in points if pt.converged]


def q_sweep(
    n_bits: int,
    rate: float,
    p_list: Sequence[int],
    strengths: Sequence[float],
    seed: int,
    b: int = 0,
    params: Optional[BpParams] = None,
    construction: str = "random",
) -> Dict[int, List[WefPoint]]:
    """Weight-enumerator curves for several field orders at a fixed bit length.

    Each curve uses its own code and a fresh Bernoulli(1/2) reference word
    drawn from ``(seed, p)``.
    """
    curves = {}
    for p in p_list:
        code = code_for_bits(n_bits, rate, p, seed, b, construction)
        rng = np.random.default_rng([seed, p])
        source = rng.integers(0, 1 << p, size=code.n_sym)
        points = wef_sweep(code, strengths, source, params)
        curves[p] = [
            WefPoint(
                strength=pt.strength,
                avg_distance=pt.avg_distance,
                entropy_density=pt.entropy_density,
                converged=pt.converged,
                iterations=pt.iterations,
                bound_rate=pt.bound_rate,
                extra={"p": p, "q": 1 << p, "rate": code.rate},
            )
            for pt in points
        ]
    return curves
