"""Construction and reduction of ultra-sparse GF(q) LDPC codes.

Every variable node has degree two; check degrees take the one or two
integer values bracketing ``2 / (1 - R)``. Graphs are built either by
progressive edge growth (PEG) or by random socket matching, labelled with
i.i.d. uniform nonzero coefficients, and optionally b-reduced.

Example:
    >>> from gfqc.application.services.construction import (
    ...     construct_peg_us_ldpc, b_reduce
    ... )
    >>>
    >>> code = construct_peg_us_ldpc(n_sym=267, rate_target=0.33, p=6, seed=7)
    >>> reduced = b_reduce(code, b=5, seed=7)
    >>> reduced.m_sym
    174
"""

import logging
from collections import defaultdict
from typing import Dict, List, Set, Tuple

import numpy as np

from gfqc.domain.errors import ConfigurationError, ConstructionError
from gfqc.domain.models.code import SparseCode, check_degree_targets
from gfqc.infrastructure.services.field import field_tables

logger = logging.getLogger(__name__)

# Separate RNG streams derived from one construction seed.
_STRUCTURE_STREAM = 0
_COEFFICIENT_STREAM = 1
_REDUCTION_STREAM = 2

_MAX_REPAIR_ATTEMPTS = 200


def checks_for_rate(n_sym: int, rate_target: float) -> int:
    """Number of checks ``round(n_sym (1 - R))`` for a target rate.

    Raises:
        ConfigurationError: If the rate is outside (0, 1).
        ConstructionError: If the profile is infeasible.
    """
    if not 0.0 < rate_target < 1.0:
        raise ConfigurationError(f"Rate must lie in (0, 1), got {rate_target}")
    m_sym = int(round(n_sym * (1.0 - rate_target)))
    if m_sym < 2:
        raise ConstructionError(
            f"n_sym={n_sym} at rate {rate_target} leaves m_sym={m_sym} < 2 checks"
        )
    if m_sym > n_sym:
        raise ConstructionError(f"Infeasible profile: m_sym={m_sym} > n_sym={n_sym}")
    return m_sym


def symbols_for_bits(n_bits: int, p: int) -> int:
    """Variables needed to carry ``n_bits`` binary digits (last symbol padded)."""
    if n_bits <= 0:
        raise ConfigurationError("n_bits must be positive")
    return -(-n_bits // p)


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng([seed, stream])


def _assemble(
    n_sym: int,
    m_sym: int,
    p: int,
    seed: int,
    edges: List[Tuple[int, int]],
    construction: str,
) -> SparseCode:
    """Sort edges by check and draw the coefficients."""
    q = 1 << p
    arr = np.array(sorted((f, v) for v, f in edges), dtype=np.int64).reshape(-1, 2)
    coefs = _rng(seed, _COEFFICIENT_STREAM).integers(1, q, size=len(arr))
    return SparseCode(
        n_sym=n_sym,
        m_sym=m_sym,
        p=p,
        seed=seed,
        b=0,
        edge_check=arr[:, 0].copy(),
        edge_var=arr[:, 1].copy(),
        edge_coef=coefs.astype(np.int64),
        construction=construction,
    )


def _check_depths(
    v: int, var_checks: List[List[int]], check_vars: List[List[int]], m_sym: int
) -> np.ndarray:
    """BFS depth of every check from variable ``v``; unreachable checks get ``m_sym``."""
    depth = [-1] * m_sym
    seen_vars = {v}
    frontier = list(var_checks[v])
    for f in frontier:
        depth[f] = 0
    level = 0
    while frontier:
        next_vars = []
        for f in frontier:
            for u in check_vars[f]:
                if u not in seen_vars:
                    seen_vars.add(u)
                    next_vars.append(u)
        level += 1
        frontier = []
        for u in next_vars:
            for g in var_checks[u]:
                if depth[g] < 0:
                    depth[g] = level
                    frontier.append(g)
    out = np.array(depth, dtype=np.int64)
    out[out < 0] = m_sym
    return out


def _pick(mask: np.ndarray, depth: np.ndarray, load: np.ndarray, rng) -> int:
    """Deepest candidate, then lowest load, ties uniformly at random."""
    cand = np.nonzero(mask)[0]
    deepest = depth[cand].max()
    cand = cand[depth[cand] == deepest]
    lightest = load[cand].min()
    cand = cand[load[cand] == lightest]
    return int(cand[rng.integers(len(cand))])


def _peg_edges(n_sym: int, targets: List[int], rng) -> List[Tuple[int, int]]:
    m_sym = len(targets)
    var_checks: List[List[int]] = [[] for _ in range(n_sym)]
    check_vars: List[List[int]] = [[] for _ in range(m_sym)]
    degree = np.zeros(m_sym, dtype=np.int64)
    remaining = np.array(targets, dtype=np.int64)
    overflow = 0

    for v in range(n_sym):
        for k in range(2):
            if k == 0:
                # First edges go where the most capacity is left, so the last
                # variables never face a single non-full check.
                depth = np.full(m_sym, m_sym, dtype=np.int64)
                load = -remaining
            else:
                depth = _check_depths(v, var_checks, check_vars, m_sym)
                load = degree
            free = np.ones(m_sym, dtype=bool)
            free[var_checks[v]] = False
            mask = free & (remaining > 0)
            if not mask.any():
                # Capacity exhausted everywhere except already-adjacent checks.
                mask = free
                overflow += 1
            f = _pick(mask, depth, load, rng)
            var_checks[v].append(f)
            check_vars[f].append(v)
            degree[f] += 1
            remaining[f] -= 1

    if overflow:
        logger.warning("PEG placed %d edges beyond the target check degrees", overflow)
    _break_four_cycles(var_checks, check_vars, rng)
    return [(v, f) for v in range(n_sym) for f in var_checks[v]]


def _break_four_cycles(
    var_checks: List[List[int]], check_vars: List[List[int]], rng
) -> int:
    """Remove 4-cycles with degree-preserving edge swaps.

    A 4-cycle in a degree-2 graph is two variables sharing both checks. The
    second variable trades one of its edges with a random edge elsewhere
    whenever the trade creates no parallel edge and no new 4-cycle.

    Returns:
        Number of 4-cycles left (zero unless the attempt budget ran out).
    """
    pairs: Dict[Tuple[int, int], Set[int]] = defaultdict(set)
    for v, checks in enumerate(var_checks):
        if len(checks) == 2:
            pairs[tuple(sorted(checks))].add(v)

    def offending() -> List[Tuple[Tuple[int, int], int]]:
        return [
            (pair, sorted(members)[1])
            for pair, members in sorted(pairs.items())
            if len(members) > 1
        ]

    n_sym = len(var_checks)
    swaps = 0
    for _ in range(_MAX_REPAIR_ATTEMPTS):
        bad = offending()
        if not bad:
            break
        for (a, g), w in bad:
            if len(pairs[(a, g)]) < 2 or w not in pairs[(a, g)]:
                continue
            for _attempt in range(50):
                x = int(rng.integers(n_sym))
                if x == w or len(var_checks[x]) != 2:
                    continue
                h = var_checks[x][int(rng.integers(2))]
                k = var_checks[x][0] if var_checks[x][1] == h else var_checks[x][1]
                if h in (a, g) or k == g:
                    continue
                new_w = tuple(sorted((a, h)))
                new_x = tuple(sorted((k, g)))
                if pairs.get(new_w) or pairs.get(new_x) or new_w == new_x:
                    continue
                old_x = tuple(sorted((k, h)))
                pairs[(a, g)].discard(w)
                pairs[old_x].discard(x)
                pairs[new_w].add(w)
                pairs[new_x].add(x)
                var_checks[w] = [a, h]
                var_checks[x] = [k, g]
                check_vars[g].remove(w)
                check_vars[g].append(x)
                check_vars[h].remove(x)
                check_vars[h].append(w)
                swaps += 1
                break

    left = len(offending())
    if swaps:
        logger.debug("Removed 4-cycles with %d edge swaps", swaps)
    if left:
        logger.warning("%d 4-cycles remain after repair", left)
    return left


def build_peg_code(n_sym: int, m_sym: int, p: int, seed: int) -> SparseCode:
    """PEG US-LDPC code with exactly ``m_sym`` checks.

    Raises:
        ConstructionError: If ``m_sym`` is not in [2, n_sym].
    """
    field_tables(p)
    if not 2 <= m_sym <= n_sym:
        raise ConstructionError(f"Infeasible profile: m_sym={m_sym}, n_sym={n_sym}")
    targets = check_degree_targets(n_sym, m_sym)
    edges = _peg_edges(n_sym, targets, _rng(seed, _STRUCTURE_STREAM))
    code = _assemble(n_sym, m_sym, p, seed, edges, "peg")
    logger.info(
        "Built PEG code n_sym=%d m_sym=%d p=%d seed=%d degrees=%s",
        n_sym, m_sym, p, seed, code.degree_histogram(),
    )
    return code


def construct_peg_us_ldpc(n_sym: int, rate_target: float, p: int, seed: int) -> SparseCode:
    """PEG-constructed US-LDPC code at a target rate.

    Each variable gets two edges in turn; the second one goes to the check
    farthest from the variable in the current graph (unreachable checks
    first), preferring the lowest current degree, ties broken by the seeded
    RNG. Check capacities enforce the two-valued degree split.

    Args:
        n_sym: Number of variables.
        rate_target: Design rate in (0, 1).
        p: Field extension degree.
        seed: Construction seed; the same arguments always give the same code.

    Returns:
        An unreduced SparseCode.

    Raises:
        ConfigurationError: On an invalid rate or field degree.
        ConstructionError: If the profile is infeasible.
    """
    return build_peg_code(n_sym, checks_for_rate(n_sym, rate_target), p, seed)


def build_random_code(n_sym: int, m_sym: int, p: int, seed: int) -> SparseCode:
    """US-LDPC code from a random matching of edge sockets.

    Raises:
        ConstructionError: If ``m_sym`` is not in [2, n_sym].
    """
    field_tables(p)
    if not 2 <= m_sym <= n_sym:
        raise ConstructionError(f"Infeasible profile: m_sym={m_sym}, n_sym={n_sym}")
    rng = _rng(seed, _STRUCTURE_STREAM)
    targets = check_degree_targets(n_sym, m_sym)
    check_sockets = np.repeat(np.arange(m_sym), targets)
    rng.shuffle(check_sockets)
    pairs = check_sockets.reshape(n_sym, 2)

    # Resolve parallel edges by swapping a socket with a random other variable.
    for _ in range(100 * n_sym):
        bad = np.nonzero(pairs[:, 0] == pairs[:, 1])[0]
        if len(bad) == 0:
            break
        v = int(bad[0])
        u = int(rng.integers(n_sym))
        j = int(rng.integers(2))
        if pairs[u, j] != pairs[v, 1] and pairs[u, 1 - j] != pairs[v, 1]:
            pairs[v, 1], pairs[u, j] = pairs[u, j], pairs[v, 1]
    else:
        raise ConstructionError("Could not remove parallel edges from the random graph")

    edges = [(v, int(f)) for v in range(n_sym) for f in pairs[v]]
    code = _assemble(n_sym, m_sym, p, seed, edges, "random")
    logger.info("Built random code n_sym=%d m_sym=%d p=%d seed=%d", n_sym, m_sym, p, seed)
    return code


def construct_random_us_ldpc(n_sym: int, rate_target: float, p: int, seed: int) -> SparseCode:
    """Random-ensemble US-LDPC code at a target rate."""
    return build_random_code(n_sym, checks_for_rate(n_sym, rate_target), p, seed)


def b_reduce(code: SparseCode, b: int, seed: int) -> SparseCode:
    """Remove ``b`` checks chosen uniformly at random without replacement.

    Args:
        code: Code to reduce.
        b: Number of checks to remove, ``0 <= b < m_sym``.
        seed: Seed of the removal draw.

    Returns:
        The reduced code; ``code`` itself when ``b == 0``.

    Raises:
        ConstructionError: If ``b`` is out of range.
    """
    if b == 0:
        return code
    if not 0 <= b < code.m_sym:
        raise ConstructionError(f"Cannot remove b={b} checks from m_sym={code.m_sym}")

    removed = _rng(seed, _REDUCTION_STREAM).choice(code.m_sym, size=b, replace=False)
    keep = np.ones(code.m_sym, dtype=bool)
    keep[removed] = False
    renumber = np.cumsum(keep) - 1
    mask = keep[code.edge_check]

    reduced = SparseCode(
        n_sym=code.n_sym,
        m_sym=code.m_sym - b,
        p=code.p,
        seed=code.seed,
        b=code.b + b,
        edge_check=renumber[code.edge_check[mask]].astype(np.int64),
        edge_var=code.edge_var[mask].copy(),
        edge_coef=code.edge_coef[mask].copy(),
        construction=code.construction,
    )
    logger.info(
        "Removed checks %s; rate %.4f -> %.4f",
        sorted(removed.tolist()), code.rate, reduced.rate,
    )
    return reduced


def build_code(
    n_sym: int,
    m_base: int,
    p: int,
    seed: int,
    b: int = 0,
    construction: str = "peg",
) -> SparseCode:
    """Regenerate a code from its construction tuple.

    The reduction draws from the same seed as the construction, which is
    what stream headers and code-file headers record.
    """
    if construction == "peg":
        base = build_peg_code(n_sym, m_base, p, seed)
    elif construction == "random":
        base = build_random_code(n_sym, m_base, p, seed)
    else:
        raise ConfigurationError(f"Cannot regenerate a {construction!r} code from a seed")
    return b_reduce(base, b, seed)


def code_for_bits(
    n_bits: int,
    rate: float,
    p: int,
    seed: int,
    b: int = 0,
    construction: str = "peg",
) -> SparseCode:
    """Code sized in binary digits, as the experiments and the CLI describe it."""
    n_sym = symbols_for_bits(n_bits, p)
    return build_code(n_sym, checks_for_rate(n_sym, rate), p, seed, b, construction)
