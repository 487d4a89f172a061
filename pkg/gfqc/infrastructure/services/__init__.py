"""Calculation kernels.

Modules:
    field: GF(2^p) tables and scalar arithmetic
    transform: Walsh-Hadamard transform and coefficient permutations
"""

from gfqc.infrastructure.services.field import (
    build_field_tables,
    field_tables,
    gf_add,
    gf_inv,
    gf_mul,
)
from gfqc.infrastructure.services.transform import (
    permute_by_coefficient,
    wht_in_place,
    xor_convolve,
)

__all__ = [
    "build_field_tables",
    "field_tables",
    "gf_add",
    "gf_inv",
    "gf_mul",
    "permute_by_coefficient",
    "wht_in_place",
    "xor_convolve",
]
