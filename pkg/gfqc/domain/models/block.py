"""Source, compressed and reconstructed block models."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from gfqc.domain.errors import ConfigurationError

STREAM_MAGIC = b"GFQC"
STREAM_VERSION = 1

FLAG_FALLBACK = 0x01
FLAG_EMBEDDED = 0x02
FLAG_RANDOM_CONSTRUCTION = 0x04

# widths of the seed and b header fields
MAX_SEED = 2**64 - 1
MAX_B = 2**16 - 1


@dataclass(frozen=True, eq=False)
class SourceBlock:
    """A binary source realization y.

    Attributes:
        bits: 0/1 vector of length n_bits.
    """

    bits: np.ndarray

    def __post_init__(self) -> None:
        if self.bits.ndim != 1:
            raise ConfigurationError("Source bits must be a flat vector")
        if len(self.bits) and (self.bits.min() < 0 or self.bits.max() > 1):
            raise ConfigurationError("Source bits must be 0 or 1")

    @property
    def n_bits(self) -> int:
        return len(self.bits)


@dataclass(frozen=True)
class StreamHeader:
    """Fixed header of a compressed stream.

    Attributes:
        version: Format version (1).
        p: Field extension degree.
        n_sym: Variables of the code.
        m_sym: Checks of the code after reduction.
        b: Number of removed checks.
        seed: Code construction seed.
        poly: Primitive polynomial bitmask.
        pad_bits: Zero bits appended to the source to fill the last symbol.
        flags: bit0 fallback, bit1 embedded matrix, bit2 random construction.
    """

    version: int
    p: int
    n_sym: int
    m_sym: int
    b: int
    seed: int
    poly: int
    pad_bits: int
    flags: int = 0

    @property
    def fallback(self) -> bool:
        return bool(self.flags & FLAG_FALLBACK)

    @property
    def embedded(self) -> bool:
        return bool(self.flags & FLAG_EMBEDDED)

    @property
    def construction(self) -> str:
        return "random" if self.flags & FLAG_RANDOM_CONSTRUCTION else "peg"

    @property
    def n_bits(self) -> int:
        return self.n_sym * self.p - self.pad_bits

    def payload_symbols(self) -> int:
        """Symbols carried by the payload: all of them in fallback mode."""
        return self.n_sym if self.fallback else self.n_sym - self.m_sym


@dataclass(frozen=True, eq=False)
class CompressedBlock:
    """Header plus information-symbol payload.

    Attributes:
        header: Stream header.
        payload: Information symbols in ``info_set`` order, or the padded
            source symbols when the fallback flag is set.
        code_text: Code file text carried in embedded-matrix mode.
    """

    header: StreamHeader
    payload: np.ndarray
    code_text: Optional[str] = None

    @property
    def payload_bits(self) -> int:
        return len(self.payload) * self.header.p

    @property
    def rate(self) -> float:
        """Payload bits per source bit, header excluded."""
        return self.payload_bits / max(self.header.n_bits, 1)


@dataclass(frozen=True, eq=False)
class ReconstructedBlock:
    """Decoder output.

    Attributes:
        bits: Reconstructed 0/1 vector, unpadded.
        symbols: Codeword symbols (padded source symbols for fallback blocks).
        fallback: Whether the block was passed through raw.
        distortion: Distortion recorded by the caller, if known.
    """

    bits: np.ndarray
    symbols: np.ndarray
    fallback: bool = False
    distortion: Optional[float] = None
