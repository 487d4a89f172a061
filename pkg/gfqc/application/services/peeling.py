"""Leaf removal (peeling) over a code's factor graph.

A variable attached to a single remaining check is a leaf: once every other
variable of that check is known, the leaf is fixed by the check. Removing
leaves together with their checks upper-triangularizes the parity-check
matrix; the variables that are never solved from a check form the
information set.
"""

import logging
from collections import deque
from typing import List, Optional

import numpy as np

from gfqc.domain.models.code import PeelOrder, PeelStep, SparseCode

logger = logging.getLogger(__name__)


def leaf_removal(code: SparseCode, order_seed: Optional[int] = None) -> PeelOrder:
    """Run leaf removal until no leaf remains.

    Each step pops a leaf ``v``, removes its check ``f`` and every other leaf
    still attached to ``f``; those become free symbols of the step. Neighbors
    of ``f`` that keep other checks lose one degree and may become leaves.

    Args:
        code: Code to peel. Disconnected graphs are fine.
        order_seed: Optional seed shuffling the order leaves are visited in.
            The residual core does not depend on it.

    Returns:
        PeelOrder with the steps, the sorted information set (every variable
        that is not a pivot) and the residual core.

    Example:
        >>> code = SparseCode.from_checks(2, [[(0, 1), (1, 1)]], p=1)
        >>> order = leaf_removal(code)
        >>> order.steps[0].free, order.core_size
        ((1,), 0)
    """
    check_vars, var_checks = code.adjacency
    var_deg = [len(fs) for fs in var_checks]
    check_alive = [True] * code.m_sym
    var_alive = [True] * code.n_sym

    initial = [v for v in range(code.n_sym) if var_deg[v] == 1]
    if order_seed is not None:
        rng = np.random.default_rng(order_seed)
        initial = [initial[i] for i in rng.permutation(len(initial))]
    queue = deque(initial)

    steps: List[PeelStep] = []
    while queue:
        v = queue.popleft()
        if not var_alive[v] or var_deg[v] != 1:
            continue
        f = next(g for g in var_checks[v] if check_alive[g])
        check_alive[f] = False

        free = []
        for u in check_vars[f]:
            if u == v or not var_alive[u]:
                continue
            var_deg[u] -= 1
            if var_deg[u] == 0:
                var_alive[u] = False
                free.append(u)
            elif var_deg[u] == 1:
                queue.append(u)
        var_deg[v] = 0
        var_alive[v] = False
        steps.append(PeelStep(check=f, pivot=v, free=tuple(sorted(free))))

    core_checks = tuple(f for f in range(code.m_sym) if check_alive[f])
    pivots = {s.pivot for s in steps}
    info_set = np.array(
        [v for v in range(code.n_sym) if v not in pivots], dtype=np.int64
    )

    logger.debug(
        "Leaf removal peeled %d of %d checks, core %d, info set %d",
        len(steps), code.m_sym, len(core_checks), len(info_set),
    )
    return PeelOrder(
        steps=tuple(steps),
        info_set=info_set,
        core_size=len(core_checks),
        core_checks=core_checks,
    )


def residual_core(code: SparseCode, order: PeelOrder) -> SparseCode:
    """Sub-code made of the core checks, with checks renumbered.

    Variables keep their indices; those outside the core end up isolated.
    """
    keep = np.zeros(code.m_sym, dtype=bool)
    keep[list(order.core_checks)] = True
    renumber = np.cumsum(keep) - 1
    mask = keep[code.edge_check]
    return SparseCode(
        n_sym=code.n_sym,
        m_sym=order.core_size,
        p=code.p,
        seed=code.seed,
        b=code.b,
        edge_check=renumber[code.edge_check[mask]].astype(np.int64),
        edge_var=code.edge_var[mask].copy(),
        edge_coef=code.edge_coef[mask].copy(),
        construction="external",
    )
