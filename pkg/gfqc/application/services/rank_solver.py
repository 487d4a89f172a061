"""Gaussian elimination over GF(q).

Dense O(n^3) reference solver used to validate the linear-time decoder and
to count codewords on small codes.
"""

from typing import Mapping, Optional, Tuple

import numpy as np

from gfqc.domain.errors import ConfigurationError
from gfqc.domain.models.code import SparseCode
from gfqc.domain.models.field import FieldTables
from gfqc.infrastructure.services.field import field_tables


def parity_check_matrix(code: SparseCode) -> np.ndarray:
    """Dense ``(m_sym, n_sym)`` matrix H with ``H[f, v] = h_vf``."""
    h = np.zeros((code.m_sym, code.n_sym), dtype=np.int64)
    h[code.edge_check, code.edge_var] = code.edge_coef
    return h


def _row_reduce(
    mat: np.ndarray, rhs: np.ndarray, tables: FieldTables
) -> Tuple[np.ndarray, np.ndarray, list]:
    """Reduced row echelon form of ``[mat | rhs]``; returns pivot columns."""
    mat = mat.copy()
    rhs = rhs.copy()
    mul, inv = tables.mul_table, tables.inv_table
    n_rows, n_cols = mat.shape
    pivots = []
    row = 0
    for col in range(n_cols):
        if row == n_rows:
            break
        hits = np.nonzero(mat[row:, col])[0]
        if len(hits) == 0:
            continue
        r = row + int(hits[0])
        if r != row:
            mat[[row, r]] = mat[[r, row]]
            rhs[[row, r]] = rhs[[r, row]]
        scale = inv[mat[row, col]]
        mat[row] = mul[scale, mat[row]]
        rhs[row] = mul[scale, rhs[row]]
        for other in np.nonzero(mat[:, col])[0]:
            if other == row:
                continue
            factor = mat[other, col]
            mat[other] ^= mul[factor, mat[row]]
            rhs[other] ^= mul[factor, rhs[row]]
        pivots.append(col)
        row += 1
    return mat, rhs, pivots


def gf_rank(code: SparseCode, tables: Optional[FieldTables] = None) -> int:
    """Rank of the parity-check matrix over GF(q).

    The code has ``q ** (n_sym - rank)`` codewords.
    """
    tables = tables or field_tables(code.p)
    h = parity_check_matrix(code)
    _, _, pivots = _row_reduce(h, np.zeros(code.m_sym, dtype=np.int64), tables)
    return len(pivots)


def generic_rank_solver(
    code: SparseCode,
    fixed: Mapping[int, int],
    tables: Optional[FieldTables] = None,
) -> Optional[np.ndarray]:
    """Complete a partial assignment into a codeword.

    Args:
        code: Code whose checks must hold.
        fixed: Variable index to symbol for the fixed variables.
        tables: Field tables; looked up from ``code.p`` when omitted.

    Returns:
        A codeword agreeing with ``fixed`` (unconstrained unknowns set to 0),
        or None if no such codeword exists.

    Raises:
        ConfigurationError: If a fixed index or symbol is out of range.
    """
    tables = tables or field_tables(code.p)
    mul = tables.mul_table
    for v, a in fixed.items():
        if not 0 <= v < code.n_sym or not 0 <= a < code.q:
            raise ConfigurationError(f"Invalid fixed assignment {v} -> {a}")

    h = parity_check_matrix(code)
    known = np.zeros(code.n_sym, dtype=bool)
    word = np.zeros(code.n_sym, dtype=np.int64)
    for v, a in fixed.items():
        known[v] = True
        word[v] = a

    # sum over unknowns = sum over fixed (characteristic 2)
    rhs = np.zeros(code.m_sym, dtype=np.int64)
    for v in np.nonzero(known)[0]:
        rhs ^= mul[h[:, v], word[v]]

    unknown = np.nonzero(~known)[0]
    mat, rhs, pivots = _row_reduce(h[:, unknown], rhs, tables)

    if np.any(rhs[len(pivots):] != 0):
        return None
    for r, col in enumerate(pivots):
        word[unknown[col]] = rhs[r]
    return word
