"""Code structure models.

Defines the degree profile of an ultra-sparse ensemble, the GF(q) factor
graph of a (possibly b-reduced) code, and the leaf-removal elimination order
that drives information-symbol extraction and back-substitution decoding.
"""

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Sequence, Tuple

import numpy as np

from gfqc.domain.errors import ConfigurationError, FieldDomainError

CONSTRUCTIONS = ("peg", "random", "external")


@dataclass(frozen=True)
class DegreeProfile:
    """Edge-perspective degree distributions of a code ensemble.

    Attributes:
        lam: ``(degree, edge_fraction)`` pairs for variable nodes.
        rho: ``(degree, edge_fraction)`` pairs for check nodes.

    Note:
        - An ultra-sparse (US-LDPC) profile has ``lam == ((2, 1.0),)``
        - ``rho`` carries at most two distinct degrees for US-LDPC codes
    """

    lam: Tuple[Tuple[int, float], ...]
    rho: Tuple[Tuple[int, float], ...]

    def __post_init__(self) -> None:
        for name, dist in (("lambda", self.lam), ("rho", self.rho)):
            total = sum(frac for _, frac in dist)
            if abs(total - 1.0) > 1e-9:
                raise ConfigurationError(f"{name} fractions sum to {total}, expected 1")

    @classmethod
    def us_ldpc(cls, n_sym: int, m_sym: int) -> "DegreeProfile":
        """Profile of a US-LDPC code with ``n_sym`` variables and ``m_sym`` checks.

        Check degrees are the floor and ceil of ``2 n_sym / m_sym`` with counts
        chosen so the edge count is exactly ``2 n_sym``.
        """
        degrees = check_degree_targets(n_sym, m_sym)
        n_edges = 2 * n_sym
        counts = Counter(degrees)
        rho = tuple(
            (deg, deg * count / n_edges) for deg, count in sorted(counts.items())
        )
        return cls(lam=((2, 1.0),), rho=rho)

    @property
    def is_ultra_sparse(self) -> bool:
        return self.lam == ((2, 1.0),) and len(self.rho) <= 2

    @property
    def mean_check_degree(self) -> float:
        return 1.0 / sum(frac / deg for deg, frac in self.rho)


def check_degree_targets(n_sym: int, m_sym: int) -> List[int]:
    """Per-check target degrees for a degree-2 variable ensemble.

    The higher degree comes first so the list is deterministic.
    """
    if m_sym <= 0:
        raise ConfigurationError("m_sym must be positive")
    n_edges = 2 * n_sym
    low = n_edges // m_sym
    n_high = n_edges - low * m_sym
    return [low + 1] * n_high + [low] * (m_sym - n_high)


@dataclass(frozen=True, eq=False)
class SparseCode:
    """GF(q) factor graph of a linear code.

    Edges are stored in three parallel arrays sorted by check, then by
    variable, so the edges of check ``f`` are the contiguous slice
    ``check_ptr[f]:check_ptr[f + 1]``.

    Attributes:
        n_sym: Number of variable nodes (symbols).
        m_sym: Number of check nodes still present.
        p: Field extension degree.
        seed: Construction seed.
        b: Number of checks removed by b-reduction.
        edge_check: Check index of every edge.
        edge_var: Variable index of every edge.
        edge_coef: Nonzero GF(q) label h_ij of every edge.
        construction: How the graph was built (``peg``, ``random`` or ``external``).

    Note:
        - Instances are immutable and can be shared across threads
        - ``(n_sym, m_sym + b, p, seed, b, construction)`` reproduces a generated code
    """

    n_sym: int
    m_sym: int
    p: int
    seed: int
    b: int
    edge_check: np.ndarray
    edge_var: np.ndarray
    edge_coef: np.ndarray
    construction: str = "external"

    def __post_init__(self) -> None:
        if self.construction not in CONSTRUCTIONS:
            raise ConfigurationError(f"Unknown construction {self.construction!r}")
        if not (len(self.edge_check) == len(self.edge_var) == len(self.edge_coef)):
            raise ConfigurationError("Edge arrays must have equal length")
        q = 1 << self.p
        if len(self.edge_coef) and (
            self.edge_coef.min() <= 0 or self.edge_coef.max() >= q
        ):
            raise FieldDomainError("Edge coefficients must be nonzero symbols of GF(q)")
        if len(self.edge_var) and (
            self.edge_var.min() < 0 or self.edge_var.max() >= self.n_sym
        ):
            raise ConfigurationError("Edge references a variable outside the code")
        if len(self.edge_check) and (
            self.edge_check.min() < 0 or self.edge_check.max() >= self.m_sym
        ):
            raise ConfigurationError("Edge references a check outside the code")
        order = np.lexsort((self.edge_var, self.edge_check))
        if not np.array_equal(order, np.arange(len(order))):
            raise ConfigurationError("Edges must be sorted by check, then variable")
        keys = self.edge_check.astype(np.int64) * self.n_sym + self.edge_var
        if len(np.unique(keys)) != len(keys):
            raise ConfigurationError("Parallel edges between a check and a variable")

    @classmethod
    def from_checks(
        cls,
        n_sym: int,
        checks: Sequence[Sequence[Tuple[int, int]]],
        p: int,
        seed: int = 0,
        b: int = 0,
        construction: str = "external",
    ) -> "SparseCode":
        """Build a code from per-check ``(variable, coefficient)`` lists.

        Example:
            >>> code = SparseCode.from_checks(3, [[(0, 1), (1, 1)], [(1, 2), (2, 3)]], p=2)
            >>> code.n_edges
            4
        """
        rows = [
            (f, v, h)
            for f, members in enumerate(checks)
            for v, h in sorted(members)
        ]
        arr = np.array(rows, dtype=np.int64).reshape(-1, 3)
        return cls(
            n_sym=n_sym,
            m_sym=len(checks),
            p=p,
            seed=seed,
            b=b,
            edge_check=arr[:, 0].copy(),
            edge_var=arr[:, 1].copy(),
            edge_coef=arr[:, 2].copy(),
            construction=construction,
        )

    @property
    def q(self) -> int:
        return 1 << self.p

    @property
    def n_edges(self) -> int:
        return len(self.edge_var)

    @property
    def n_bits(self) -> int:
        return self.n_sym * self.p

    @property
    def m_base(self) -> int:
        """Check count before b-reduction."""
        return self.m_sym + self.b

    @property
    def rate(self) -> float:
        """Design rate ``(n_sym - m_sym) / n_sym`` in symbols and in bits."""
        return (self.n_sym - self.m_sym) / self.n_sym

    @cached_property
    def check_ptr(self) -> np.ndarray:
        counts = np.bincount(self.edge_check, minlength=self.m_sym)
        return np.concatenate(([0], np.cumsum(counts))).astype(np.int64)

    @cached_property
    def check_degrees(self) -> np.ndarray:
        return np.diff(self.check_ptr)

    @cached_property
    def var_degrees(self) -> np.ndarray:
        return np.bincount(self.edge_var, minlength=self.n_sym).astype(np.int64)

    @cached_property
    def var_edge_matrix(self) -> np.ndarray:
        """Edges of every variable, padded with the sentinel index ``n_edges``."""
        width = int(self.var_degrees.max()) if self.n_sym and self.n_edges else 0
        mat = np.full((self.n_sym, width), self.n_edges, dtype=np.int64)
        fill = np.zeros(self.n_sym, dtype=np.int64)
        for e, v in enumerate(self.edge_var.tolist()):
            mat[v, fill[v]] = e
            fill[v] += 1
        return mat

    @cached_property
    def edge_siblings(self) -> np.ndarray:
        """For every edge, the other edges of its variable (sentinel padded)."""
        mat = self.var_edge_matrix
        width = max(mat.shape[1] - 1, 0)
        sib = np.full((self.n_edges, width), self.n_edges, dtype=np.int64)
        for v in range(self.n_sym):
            row = mat[v][mat[v] < self.n_edges]
            for i, e in enumerate(row):
                others = np.delete(row, i)
                sib[e, : len(others)] = others
        return sib

    @cached_property
    def degree_blocks(self) -> List[Tuple[int, np.ndarray, np.ndarray]]:
        """Checks grouped by degree as ``(degree, check_ids, edge_matrix)``."""
        blocks = []
        degrees = self.check_degrees
        for deg in sorted(set(degrees.tolist())):
            if deg == 0:
                continue
            checks = np.nonzero(degrees == deg)[0]
            edges = self.check_ptr[checks][:, None] + np.arange(deg)[None, :]
            blocks.append((deg, checks, edges))
        return blocks

    @cached_property
    def adjacency(self) -> Tuple[List[List[int]], List[List[int]]]:
        """Plain-list adjacency ``(check_vars, var_checks)`` for graph walks."""
        check_vars: List[List[int]] = [[] for _ in range(self.m_sym)]
        var_checks: List[List[int]] = [[] for _ in range(self.n_sym)]
        for f, v in zip(self.edge_check.tolist(), self.edge_var.tolist()):
            check_vars[f].append(v)
            var_checks[v].append(f)
        return check_vars, var_checks

    def check_neighbors(self, f: int) -> Tuple[np.ndarray, np.ndarray]:
        """Variables and coefficients of check ``f``."""
        lo, hi = self.check_ptr[f], self.check_ptr[f + 1]
        return self.edge_var[lo:hi], self.edge_coef[lo:hi]

    def edge_index(self, v: int, f: int) -> int:
        """Index of the edge joining variable ``v`` and check ``f``.

        Raises:
            ConfigurationError: If no such edge exists.
        """
        lo, hi = self.check_ptr[f], self.check_ptr[f + 1]
        hits = np.nonzero(self.edge_var[lo:hi] == v)[0]
        if len(hits) == 0:
            raise ConfigurationError(f"Variable {v} is not attached to check {f}")
        return int(lo + hits[0])

    def degree_histogram(self) -> Dict[int, int]:
        return dict(sorted(Counter(self.check_degrees.tolist()).items()))

    def profile(self) -> DegreeProfile:
        """Empirical edge-perspective profile of this graph."""
        n_edges = max(self.n_edges, 1)
        var_counts = Counter(self.var_degrees.tolist())
        lam = tuple(
            (d, d * c / n_edges) for d, c in sorted(var_counts.items()) if d > 0
        )
        rho = tuple(
            (d, d * c / n_edges) for d, c in self.degree_histogram().items() if d > 0
        )
        return DegreeProfile(lam=lam, rho=rho)

    def identity(self) -> Tuple[int, int, int, int, int]:
        """``(p, n_sym, m_sym, b, seed)`` as recorded in stream headers."""
        return (self.p, self.n_sym, self.m_sym, self.b, self.seed)

    def same_graph(self, other: "SparseCode") -> bool:
        return (
            self.identity() == other.identity()
            and np.array_equal(self.edge_check, other.edge_check)
            and np.array_equal(self.edge_var, other.edge_var)
            and np.array_equal(self.edge_coef, other.edge_coef)
        )


@dataclass(frozen=True)
class PeelStep:
    """One leaf-removal step.

    Attributes:
        check: Removed check f_t.
        pivot: Leaf variable v_t solved from f_t during decoding.
        free: Other leaves F_t on f_t; they become information symbols.
    """

    check: int
    pivot: int
    free: Tuple[int, ...]


@dataclass(frozen=True, eq=False)
class PeelOrder:
    """Leaf-removal elimination structure of a code.

    Attributes:
        steps: Steps in removal order.
        info_set: Sorted indices of the information symbols.
        core_size: Number of checks left in the core.
        core_checks: Indices of the core checks.

    Note:
        - ``info_set`` holds every variable that is not a pivot: the union of
          the free sets, variables isolated by reduction, and core variables
        - Decoding replays ``steps`` in reverse
    """

    steps: Tuple[PeelStep, ...]
    info_set: np.ndarray
    core_size: int
    core_checks: Tuple[int, ...] = ()

    @property
    def n_peeled(self) -> int:
        return len(self.steps)

    @property
    def is_empty_core(self) -> bool:
        return self.core_size == 0

    def free_union(self) -> List[int]:
        return sorted(v for step in self.steps for v in step.free)

    def pivots(self) -> np.ndarray:
        return np.array([s.pivot for s in self.steps], dtype=np.int64)
