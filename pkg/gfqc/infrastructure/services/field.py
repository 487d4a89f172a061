"""GF(2^p) table construction and scalar arithmetic.

Tables are built once per extension degree from a fixed primitive
polynomial and cached for the process lifetime.

Example:
    >>> from gfqc.infrastructure.services.field import field_tables, gf_mul, gf_inv
    >>>
    >>> gf4 = field_tables(2)
    >>> gf_mul(2, 2, gf4)
    3
    >>> gf_inv(2, gf4)
    3
"""

from functools import lru_cache

import numpy as np

from gfqc.domain.errors import ConfigurationError, FieldDomainError
from gfqc.domain.models.field import FieldTables

# Primitive polynomial bitmask per extension degree. Recorded in code files and
# stream headers, so these must never change.
PRIMITIVE_POLYNOMIALS = {
    1: 0x3,  # x + 1
    2: 0x7,  # x^2 + x + 1
    3: 0xB,  # x^3 + x + 1
    4: 0x13,  # x^4 + x + 1
    5: 0x25,  # x^5 + x^2 + 1
    6: 0x43,  # x^6 + x + 1
    7: 0x83,  # x^7 + x + 1
    8: 0x11D,  # x^8 + x^4 + x^3 + x^2 + 1
}


def build_field_tables(p: int) -> FieldTables:
    """Build exp/log tables for GF(2^p).

    Args:
        p: Extension degree, 1 <= p <= 8.

    Returns:
        FieldTables for the fixed primitive polynomial of degree p.

    Raises:
        ConfigurationError: If p is unsupported or the polynomial does not
            generate the full multiplicative group.

    Example:
        >>> tables = build_field_tables(6)
        >>> len(set(tables.exp_table.tolist()))
        63
    """
    if p not in PRIMITIVE_POLYNOMIALS:
        raise ConfigurationError(f"Unsupported extension degree p={p} (expected 1..8)")

    poly = PRIMITIVE_POLYNOMIALS[p]
    q = 1 << p
    exp_table = np.zeros(q - 1, dtype=np.int64)
    log_table = np.full(q, -1, dtype=np.int64)

    x = 1
    for i in range(q - 1):
        exp_table[i] = x
        log_table[x] = i
        x <<= 1
        if x & q:
            x ^= poly

    if sorted(exp_table.tolist()) != list(range(1, q)):
        raise ConfigurationError(f"Polynomial {poly:#x} is not primitive for p={p}")

    return FieldTables(p=p, primitive_poly=poly, exp_table=exp_table, log_table=log_table)


@lru_cache(maxsize=None)
def field_tables(p: int) -> FieldTables:
    """Cached ``build_field_tables``; tables are read-only once built."""
    return build_field_tables(p)


def gf_add(a: int, b: int) -> int:
    """Field addition, XOR of the bit patterns in characteristic 2."""
    return a ^ b


def gf_mul(a: int, b: int, tables: FieldTables) -> int:
    """Field multiplication through the log/exp tables."""
    if a == 0 or b == 0:
        return 0
    logs = tables.log_table
    return int(tables.exp_table[(logs[a] + logs[b]) % (tables.q - 1)])


def gf_inv(a: int, tables: FieldTables) -> int:
    """Multiplicative inverse.

    Raises:
        FieldDomainError: If ``a`` is zero.
    """
    if a == 0:
        raise FieldDomainError("Zero has no multiplicative inverse")
    return int(tables.exp_table[(-tables.log_table[a]) % (tables.q - 1)])


def poly_mul_mod(a: int, b: int, poly: int, p: int) -> int:
    """Carry-less product of two p-bit patterns reduced mod ``poly``.

    Independent of the tables; used to cross-check them.
    """
    result = 0
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if a & (1 << p):
            a ^= poly
    return result
