"""Lossy compression of binary blocks with a b-reduced GF(q) code.

Encoding groups the source bits into p-bit symbols, runs reinforced BP with
a prior centred on the source, and keeps the information symbols of the
codeword found. Decoding fixes the information symbols and replays leaf
removal backwards, solving one variable per check in linear time.

Example:
    >>> from gfqc.application.services.codec import CodecParams, encode, decode
    >>>
    >>> report = encode(SourceBlock(bits), code, CodecParams(strength=1.5))
    >>> restored = decode(report.block, code)
    >>> distortion(bits, restored.bits) == report.distortion
    True
"""

import logging
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from gfqc.application.services.construction import build_code, code_for_bits
from gfqc.application.services.message_passing import is_codeword, run_rbp
from gfqc.application.services.peeling import leaf_removal
from gfqc.config import Settings
from gfqc.domain.errors import (
    ConfigurationError,
    CorruptStreamError,
    DimensionMismatchError,
    EncodeFailure,
    HeaderMismatchError,
)
from gfqc.domain.models.block import (
    FLAG_EMBEDDED,
    FLAG_FALLBACK,
    FLAG_RANDOM_CONSTRUCTION,
    STREAM_VERSION,
    CompressedBlock,
    ReconstructedBlock,
    SourceBlock,
    StreamHeader,
)
from gfqc.domain.models.code import PeelOrder, SparseCode
from gfqc.domain.models.field import FieldTables
from gfqc.domain.models.messages import Prior, RbpParams
from gfqc.domain.models.results import EncodeReport
from gfqc.infrastructure.diagnostics import DiagnosticsSink
from gfqc.infrastructure.repositories.code_file import format_code, parse_code
from gfqc.infrastructure.services.field import field_tables

logger = logging.getLogger(__name__)


class CodecParams(BaseModel):
    """Encoder parameters.

    Attributes:
        strength: Prior strength L.
        rbp: Reinforced BP parameters.
        embed_code: Carry the code file in the stream even for generated codes.
    """

    strength: float = Field(default=1.5, ge=0.0)
    rbp: RbpParams = Field(default_factory=RbpParams)
    embed_code: bool = False

    @classmethod
    def from_settings(cls, settings: Settings, schedule_seed: int = 0) -> "CodecParams":
        return cls(
            strength=settings.strength,
            rbp=RbpParams(
                gamma0=settings.gamma0,
                gamma1=settings.gamma1,
                ell_max=settings.ell_max,
                t_max=settings.t_max,
                epsilon=settings.epsilon,
                schedule_seed=schedule_seed,
            ),
        )


def bits_to_symbols(bits: np.ndarray, p: int) -> Tuple[np.ndarray, int]:
    """Group bits into p-bit symbols, first bit most significant.

    Returns:
        ``(symbols, pad_bits)``; the source is zero-padded to a multiple of p.

    Example:
        >>> bits_to_symbols(np.array([0, 1, 1, 1]), 2)
        (array([1, 3]), 0)
    """
    bits = np.asarray(bits, dtype=np.int64)
    pad = (-len(bits)) % p
    padded = np.concatenate([bits, np.zeros(pad, dtype=np.int64)])
    weights = 1 << np.arange(p - 1, -1, -1)
    return padded.reshape(-1, p) @ weights, pad


def symbols_to_bits(symbols: np.ndarray, p: int) -> np.ndarray:
    """Inverse of ``bits_to_symbols``, padding included."""
    shifts = np.arange(p - 1, -1, -1)
    return ((np.asarray(symbols, dtype=np.int64)[:, None] >> shifts) & 1).ravel()


def distortion(y: np.ndarray, y_hat: np.ndarray) -> float:
    """Normalized Hamming distance between two bit vectors.

    Raises:
        DimensionMismatchError: If the lengths differ.
    """
    if len(y) != len(y_hat):
        raise DimensionMismatchError(f"Lengths differ: {len(y)} vs {len(y_hat)}")
    if len(y) == 0:
        return 0.0
    return float(np.count_nonzero(np.asarray(y) != np.asarray(y_hat)) / len(y))


def build_prior(
    source: np.ndarray, strength: float, p: int, tables: Optional[FieldTables] = None
) -> Prior:
    """External field ``exp(-L * popcount(a XOR y_v))``, normalized per variable.

    Raises:
        ConfigurationError: If ``strength`` is negative.
    """
    if strength < 0:
        raise ConfigurationError(f"Prior strength must be >= 0, got {strength}")
    tables = tables or field_tables(p)
    source = np.asarray(source, dtype=np.int64)
    symbols = np.arange(tables.q)
    distance = tables.popcount[source[:, None] ^ symbols[None, :]]
    vectors = np.exp(-strength * distance)
    vectors /= vectors.sum(axis=1, keepdims=True)
    return Prior(vectors=vectors, strength=strength, source=source)


def _header(code: SparseCode, pad: int, flags: int, tables: FieldTables) -> StreamHeader:
    if code.construction == "random":
        flags |= FLAG_RANDOM_CONSTRUCTION
    return StreamHeader(
        version=STREAM_VERSION,
        p=code.p,
        n_sym=code.n_sym,
        m_sym=code.m_sym,
        b=code.b,
        seed=code.seed,
        poly=tables.primitive_poly,
        pad_bits=pad,
        flags=flags,
    )


def encode(
    source: SourceBlock,
    code: SparseCode,
    params: Optional[CodecParams] = None,
    order: Optional[PeelOrder] = None,
    tables: Optional[FieldTables] = None,
    diagnostics: Optional[DiagnosticsSink] = None,
) -> EncodeReport:
    """Compress one block.

    Args:
        source: Bits to compress; padded to ``code.n_sym * code.p``.
        code: Code with an empty leaf-removal core.
        params: Encoder parameters.
        order: Precomputed leaf-removal order of ``code``.
        tables: Field tables of ``code.p``.
        diagnostics: Optional per-sweep sink.

    Returns:
        EncodeReport. When reinforced BP fails the block is a raw fallback
        block carrying the padded source and the distortion is 0.

    Raises:
        ConfigurationError: If the code has a nonempty core.
        DimensionMismatchError: If the source does not fill the code.
    """
    params = params or CodecParams()
    tables = tables or field_tables(code.p)
    symbols, pad = bits_to_symbols(source.bits, code.p)
    if len(symbols) != code.n_sym or pad >= code.p:
        raise DimensionMismatchError(
            f"{source.n_bits} bits do not fill a code of {code.n_sym} symbols over p={code.p}"
        )
    order = order or leaf_removal(code)
    if not order.is_empty_core:
        raise ConfigurationError(
            f"Code has a core of {order.core_size} checks; reduce it with b >= 1 first"
        )

    flags = FLAG_EMBEDDED if (params.embed_code or code.construction == "external") else 0
    code_text = format_code(code) if flags & FLAG_EMBEDDED else None

    prior = build_prior(symbols, params.strength, code.p, tables)
    try:
        result = run_rbp(code, prior, params.rbp, tables, diagnostics)
    except EncodeFailure as failure:
        logger.warning("Encoder failed (%s); emitting a raw fallback block", failure)
        block = CompressedBlock(
            header=_header(code, pad, flags | FLAG_FALLBACK, tables),
            payload=symbols.copy(),
            code_text=code_text,
        )
        return EncodeReport(
            block=block,
            distortion=0.0,
            iterations=failure.iterations,
            trials=failure.trials,
            fallback=True,
        )

    codeword = result.codeword
    reconstructed = symbols_to_bits(codeword, code.p)[: source.n_bits]
    block = CompressedBlock(
        header=_header(code, pad, flags, tables),
        payload=codeword[order.info_set].copy(),
        code_text=code_text,
    )
    d = distortion(source.bits, reconstructed)
    logger.debug(
        "Encoded %d bits into %d payload bits, distortion %.4f after %d sweeps",
        source.n_bits, block.payload_bits, d, result.iterations,
    )
    return EncodeReport(
        block=block,
        distortion=d,
        iterations=result.iterations,
        trials=result.trials,
        fallback=False,
        codeword=codeword,
    )


def back_substitute(
    code: SparseCode, order: PeelOrder, info_values: np.ndarray, tables: FieldTables
) -> np.ndarray:
    """Fill in the pivots of ``order`` in reverse, one check each.

    ``c_v = inv(h_vf) * sum_{i != v} h_if c_i`` for every step ``(f, v)``.
    """
    mul = tables.mul_table.tolist()
    inv = tables.inv_table.tolist()
    word = [0] * code.n_sym
    for v, a in zip(order.info_set.tolist(), np.asarray(info_values).tolist()):
        word[v] = a
    ptr = code.check_ptr.tolist()
    edge_var = code.edge_var.tolist()
    edge_coef = code.edge_coef.tolist()

    for step in reversed(order.steps):
        acc = 0
        pivot_coef = 0
        for e in range(ptr[step.check], ptr[step.check + 1]):
            u = edge_var[e]
            if u == step.pivot:
                pivot_coef = edge_coef[e]
            else:
                acc ^= mul[edge_coef[e]][word[u]]
        word[step.pivot] = mul[inv[pivot_coef]][acc]
    return np.array(word, dtype=np.int64)


def resolve_code(header: StreamHeader, code_text: Optional[str] = None) -> SparseCode:
    """Code described by a stream header: parsed if embedded, else regenerated."""
    if code_text is not None:
        return parse_code(code_text)
    return build_code(
        header.n_sym,
        header.m_sym + header.b,
        header.p,
        header.seed,
        header.b,
        header.construction,
    )


def verify_header(header: StreamHeader, code: SparseCode, tables: FieldTables) -> None:
    """Raise HeaderMismatchError unless ``header`` describes ``code``."""
    recorded = (header.p, header.n_sym, header.m_sym, header.b, header.seed)
    if recorded != code.identity():
        raise HeaderMismatchError(
            f"Block was produced with (p, n, m, b, seed)={recorded}, "
            f"code is {code.identity()}"
        )
    if header.poly != tables.primitive_poly:
        raise HeaderMismatchError(f"Block polynomial {header.poly:#x} is not {tables.primitive_poly:#x}")
    if code.construction != "external" and not header.embedded:
        if header.construction != code.construction:
            raise HeaderMismatchError(
                f"Block was produced with a {header.construction} code, "
                f"given a {code.construction} code"
            )


def decode(
    block: CompressedBlock,
    code: Optional[SparseCode] = None,
    order: Optional[PeelOrder] = None,
    tables: Optional[FieldTables] = None,
) -> ReconstructedBlock:
    """Reconstruct the bits of a compressed block.

    Args:
        block: Block to decode.
        code: Code used for encoding; resolved from the block when omitted.
        order: Precomputed leaf-removal order of ``code``.
        tables: Field tables.

    Returns:
        ReconstructedBlock of the original (unpadded) length. Fallback blocks
        return the source verbatim.

    Raises:
        HeaderMismatchError: If the block was produced with another code.
        CorruptStreamError: If the payload does not fit the code.
        ConfigurationError: If the code has a nonempty core.
    """
    header = block.header
    n_bits = header.n_bits
    if header.fallback:
        if len(block.payload) != header.n_sym:
            raise CorruptStreamError("Fallback payload does not cover the block")
        bits = symbols_to_bits(block.payload, header.p)[:n_bits]
        return ReconstructedBlock(bits=bits, symbols=block.payload.copy(), fallback=True)

    code = code or resolve_code(header, block.code_text)
    tables = tables or field_tables(code.p)
    verify_header(header, code, tables)

    order = order or leaf_removal(code)
    if not order.is_empty_core:
        raise ConfigurationError(f"Code has a core of {order.core_size} checks")
    if len(block.payload) != len(order.info_set):
        raise CorruptStreamError(
            f"Payload has {len(block.payload)} symbols, code has {len(order.info_set)} information symbols"
        )
    if len(block.payload) and (block.payload.min() < 0 or block.payload.max() >= code.q):
        raise CorruptStreamError("Payload symbol outside GF(q)")

    word = back_substitute(code, order, block.payload, tables)
    if not is_codeword(code, word, tables):
        raise CorruptStreamError("Decoded word violates a parity check")
    return ReconstructedBlock(bits=symbols_to_bits(word, code.p)[:n_bits], symbols=word)


class CodecService:
    """Compresses and decompresses blocks with one code.

    Leaf removal and the field tables are computed once, so a service can
    encode many blocks of the same length cheaply.

    Attributes:
        code: Code with an empty leaf-removal core.
        order: Its leaf-removal order.
        tables: Field tables of ``code.p``.
        params: Encoder parameters.

    Example:
        >>> service = CodecService.generated(1600, 0.33, p=6, seed=7, b=5)
        >>> report = service.compress(bits)
        >>> service.decompress(report.block).bits.shape
        (1600,)
    """

    def __init__(self, code: SparseCode, params: Optional[CodecParams] = None):
        """Initialize the codec service.

        Args:
            code: Code to encode with.
            params: Encoder parameters; defaults apply when omitted.

        Raises:
            ConfigurationError: If the code has a nonempty core.
        """
        self.code = code
        self.params = params or CodecParams()
        self.tables = field_tables(code.p)
        self.order = leaf_removal(code)
        if not self.order.is_empty_core:
            hint = (
                "pick another --seed or a larger --b"
                if code.construction != "external"
                else "reduce it before use"
            )
            raise ConfigurationError(
                f"Code (b={code.b}, seed={code.seed}) keeps a core of "
                f"{self.order.core_size} checks; {hint}"
            )

    @classmethod
    def generated(
        cls,
        n_bits: int,
        rate: float,
        p: int,
        seed: int,
        b: int = 5,
        construction: str = "peg",
        params: Optional[CodecParams] = None,
    ) -> "CodecService":
        """Service over the code regenerated from its construction tuple."""
        return cls(code_for_bits(n_bits, rate, p, seed, b, construction), params)

    def compress(
        self, bits: np.ndarray, diagnostics: Optional[DiagnosticsSink] = None
    ) -> EncodeReport:
        """Encode one block whose bits fill ``code.n_sym`` symbols."""
        return encode(
            SourceBlock(np.asarray(bits)), self.code, self.params, self.order,
            self.tables, diagnostics,
        )

    def decompress(self, block: CompressedBlock) -> ReconstructedBlock:
        """Decode a block produced with this code."""
        return decode(block, self.code, self.order, self.tables)
