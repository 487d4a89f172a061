"""Binary layout of compressed blocks.

All integers are big-endian::

    magic   4s   b"GFQC"
    version u8   1
    p       u8
    n_sym   u32
    m_sym   u32  checks after reduction
    b       u16
    seed    u64
    poly    u16
    pad     u16  zero bits appended to the source
    flags   u8   bit0 fallback, bit1 embedded code, bit2 random construction
    [u32 length + UTF-8 code file]   only with bit1
    payload      p bits per symbol, MSB first, zero-padded to a byte
"""

import struct
from pathlib import Path
from typing import Union

import numpy as np

from gfqc.domain.errors import CorruptStreamError
from gfqc.domain.models.block import (
    STREAM_MAGIC,
    STREAM_VERSION,
    CompressedBlock,
    StreamHeader,
)

HEADER = struct.Struct(">4sBBIIHQHHB")
LENGTH = struct.Struct(">I")


def pack_symbols(symbols: np.ndarray, p: int) -> bytes:
    """Pack symbols into ``p`` bits each, most significant bit first."""
    shifts = np.arange(p - 1, -1, -1)
    bits = (np.asarray(symbols, dtype=np.int64)[:, None] >> shifts) & 1
    return np.packbits(bits.astype(np.uint8).ravel()).tobytes()


def unpack_symbols(data: bytes, count: int, p: int) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))[: count * p]
    weights = 1 << np.arange(p - 1, -1, -1)
    return (bits.reshape(count, p).astype(np.int64) * weights).sum(axis=1)


def pack_block(block: CompressedBlock) -> bytes:
    """Serialize a block.

    Raises:
        CorruptStreamError: If the payload length disagrees with the header or
            a header field (seed, b, sizes) overflows its width.
    """
    h = block.header
    if len(block.payload) != h.payload_symbols():
        raise CorruptStreamError(
            f"Payload has {len(block.payload)} symbols, header implies {h.payload_symbols()}"
        )
    try:
        out = [
            HEADER.pack(
                STREAM_MAGIC, h.version, h.p, h.n_sym, h.m_sym, h.b,
                h.seed, h.poly, h.pad_bits, h.flags,
            )
        ]
    except struct.error as e:
        raise CorruptStreamError(f"Header field does not fit the stream format: {e}") from e
    if h.embedded:
        text = (block.code_text or "").encode("utf-8")
        out.append(LENGTH.pack(len(text)))
        out.append(text)
    out.append(pack_symbols(block.payload, h.p))
    return b"".join(out)


def unpack_block(data: bytes) -> CompressedBlock:
    """Parse a serialized block.

    Raises:
        CorruptStreamError: On a bad magic, unknown version, truncation or
            trailing bytes.
    """
    if len(data) < HEADER.size:
        raise CorruptStreamError(f"Stream of {len(data)} bytes is shorter than the header")
    magic, version, p, n_sym, m_sym, b, seed, poly, pad, flags = HEADER.unpack_from(data)
    if magic != STREAM_MAGIC:
        raise CorruptStreamError(f"Bad magic {magic!r}")
    if version != STREAM_VERSION:
        raise CorruptStreamError(f"Unsupported stream version {version}")
    if not 1 <= p <= 8 or m_sym > n_sym or pad >= p:
        raise CorruptStreamError("Header fields out of range")
    header = StreamHeader(version, p, n_sym, m_sym, b, seed, poly, pad, flags)

    offset = HEADER.size
    code_text = None
    if header.embedded:
        if len(data) < offset + LENGTH.size:
            raise CorruptStreamError("Truncated embedded code length")
        (length,) = LENGTH.unpack_from(data, offset)
        offset += LENGTH.size
        if len(data) < offset + length:
            raise CorruptStreamError("Truncated embedded code")
        try:
            code_text = data[offset : offset + length].decode("utf-8")
        except UnicodeDecodeError as e:
            raise CorruptStreamError("Embedded code is not UTF-8") from e
        offset += length

    count = header.payload_symbols()
    expected = -(-count * p // 8)
    body = data[offset:]
    if len(body) != expected:
        raise CorruptStreamError(f"Payload has {len(body)} bytes, expected {expected}")
    payload = unpack_symbols(body, count, p)
    return CompressedBlock(header=header, payload=payload, code_text=code_text)


def write_stream(path: Union[str, Path], block: CompressedBlock) -> int:
    """Write a block; returns the number of bytes written."""
    data = pack_block(block)
    Path(path).write_bytes(data)
    return len(data)


def read_stream(path: Union[str, Path]) -> CompressedBlock:
    return unpack_block(Path(path).read_bytes())
