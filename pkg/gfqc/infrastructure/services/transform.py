"""Group Fourier transform over the additive group of GF(2^p).

The Walsh-Hadamard transform diagonalizes convolution over (Z/2)^p, which
is what a parity check computes: the distribution of a sum of independent
field symbols is the XOR-convolution of their distributions.
"""

from typing import Optional

import numpy as np

from gfqc.domain.errors import DimensionMismatchError, FieldDomainError
from gfqc.domain.models.field import FieldTables, OpCounter


def wht_in_place(
    v: np.ndarray,
    tables: Optional[FieldTables] = None,
    counter: Optional[OpCounter] = None,
) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along the last axis, in place.

    Computes ``out[s] = sum_a (-1)^popcount(s & a) v[a]`` for every leading
    index with p butterfly stages of q operations each. Applying it twice
    multiplies by q.

    Args:
        v: C-contiguous float array whose last axis has length q.
        tables: Optional field; when given, the last axis must equal its q.
        counter: Optional counter receiving the butterfly count.

    Returns:
        ``v`` itself, transformed.

    Raises:
        DimensionMismatchError: If the length is not a power of two, does not
            match ``tables``, or ``v`` is not contiguous.
    """
    n = v.shape[-1]
    if n == 0 or n & (n - 1):
        raise DimensionMismatchError(f"Transform length {n} is not a power of two")
    if tables is not None and n != tables.q:
        raise DimensionMismatchError(f"Transform length {n} does not match q={tables.q}")
    if not v.flags.c_contiguous:
        raise DimensionMismatchError("wht_in_place needs a C-contiguous buffer")

    lead = v.shape[:-1]
    h = 1
    while h < n:
        view = v.reshape(*lead, n // (2 * h), 2, h)
        upper = view[..., 0, :].copy()
        lower = view[..., 1, :]
        view[..., 0, :] += lower
        view[..., 1, :] = upper - lower
        h *= 2

    if counter is not None:
        batch = int(np.prod(lead)) if lead else 1
        counter.butterflies += batch * n * (n.bit_length() - 1)
        counter.transforms += batch
    return v


def permutation_indices(h: np.ndarray, tables: FieldTables) -> np.ndarray:
    """Gather indices turning a belief over c into a belief over h*c.

    ``out = take_along_axis(v, permutation_indices(h), -1)`` satisfies
    ``out[h*a] = v[a]``.
    """
    return tables.mul_table[tables.inv_table[h]]


def permute_by_coefficient(v: np.ndarray, h: int, tables: FieldTables) -> np.ndarray:
    """Belief over ``h*c`` from a belief ``v`` over ``c``.

    Raises:
        FieldDomainError: If ``h`` is zero.

    Example:
        >>> gf4 = field_tables(2)
        >>> permute_by_coefficient(np.array([.1, .2, .3, .4]), 2, gf4)
        array([0.1, 0.4, 0.2, 0.3])
    """
    if h == 0:
        raise FieldDomainError("Cannot permute by the zero coefficient")
    if v.shape[-1] != tables.q:
        raise DimensionMismatchError(f"Vector length {v.shape[-1]} does not match q={tables.q}")
    out = np.empty_like(v)
    out[..., tables.mul_table[h]] = v
    return out


def xor_convolve(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``w[s] = sum_a u[a] v[s XOR a]`` through the transform."""
    fu = wht_in_place(np.array(u, dtype=float, copy=True))
    fv = wht_in_place(np.array(v, dtype=float, copy=True))
    prod = np.ascontiguousarray(fu * fv)
    return wht_in_place(prod) / u.shape[-1]


def xor_convolve_direct(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """O(q^2) reference convolution."""
    q = u.shape[-1]
    idx = np.bitwise_xor.outer(np.arange(q), np.arange(q))
    return (u[None, :] * v[idx]).sum(axis=1)
