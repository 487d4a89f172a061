"""Application services.

Modules:
    construction: PEG and random US-LDPC construction, b-reduction
    peeling: Leaf removal and information-set extraction
    rank_solver: Gaussian-elimination oracle over GF(q)
    message_passing: BP and reinforced BP engines
    codec: Lossy encode and back-substitution decode
    rate_distortion: Binary rate-distortion bound
    wef: Weight-enumerator estimation from BP fixed points
    experiments: Parameter sweeps over many encoded samples
"""

from gfqc.application.services.construction import (
    b_reduce,
    build_code,
    construct_peg_us_ldpc,
    construct_random_us_ldpc,
)
from gfqc.application.services.peeling import leaf_removal
from gfqc.application.services.message_passing import (
    MessagePassingEngine,
    run_bp_fixed_point,
    run_rbp,
)
from gfqc.application.services.codec import CodecParams, decode, encode

__all__ = [
    "b_reduce",
    "build_code",
    "construct_peg_us_ldpc",
    "construct_random_us_ldpc",
    "leaf_removal",
    "MessagePassingEngine",
    "run_bp_fixed_point",
    "run_rbp",
    "CodecParams",
    "decode",
    "encode",
]
