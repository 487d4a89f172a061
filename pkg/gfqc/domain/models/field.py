"""Finite-field data types.

Holds the lookup tables of GF(2^p) and the operation counter used to check
the cost of the group transform.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


@dataclass(frozen=True, eq=False)
class FieldTables:
    """GF(2^p) arithmetic context.

    Attributes:
        p: Extension degree, q = 2^p.
        primitive_poly: Bitmask of the degree-p primitive polynomial.
        exp_table: ``exp_table[i] = x^i`` reduced mod the polynomial, q-1 entries.
        log_table: Discrete logs indexed by symbol; ``log_table[0]`` is -1
            because zero has no logarithm.

    Example:
        >>> tables = build_field_tables(2)
        >>> int(tables.mul_table[2, 2])
        3
    """

    p: int
    primitive_poly: int
    exp_table: np.ndarray
    log_table: np.ndarray

    @property
    def q(self) -> int:
        return 1 << self.p

    @cached_property
    def mul_table(self) -> np.ndarray:
        """Full q x q multiplication table."""
        q = self.q
        logs = self.log_table
        a = np.arange(q)
        summed = (logs[a][:, None] + logs[a][None, :]) % (q - 1)
        table = self.exp_table[summed]
        table[0, :] = 0
        table[:, 0] = 0
        return table.astype(np.int64)

    @cached_property
    def inv_table(self) -> np.ndarray:
        """Multiplicative inverses; entry 0 is 0 and must never be used."""
        q = self.q
        inv = np.zeros(q, dtype=np.int64)
        nz = np.arange(1, q)
        inv[nz] = self.exp_table[(-self.log_table[nz]) % (q - 1)]
        return inv

    @cached_property
    def popcount(self) -> np.ndarray:
        """Number of set bits of every symbol's p-bit pattern."""
        return np.array([bin(a).count("1") for a in range(self.q)], dtype=np.int64)


@dataclass
class OpCounter:
    """Counts butterfly operations performed by the Walsh-Hadamard transform."""

    butterflies: int = 0
    transforms: int = field(default=0)

    def reset(self) -> None:
        self.butterflies = 0
        self.transforms = 0
