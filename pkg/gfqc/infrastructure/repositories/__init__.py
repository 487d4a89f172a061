"""File formats for codes, compressed streams and experiment results.

Modules:
    code_file: ``gfq-code v1`` text format
    stream: Binary compressed-stream layout
    results: CSV tables with JSON mirrors, bit files
"""

from gfqc.infrastructure.repositories.code_file import (
    format_code,
    parse_code,
    read_code_file,
    write_code_file,
)
from gfqc.infrastructure.repositories.stream import (
    pack_block,
    read_stream,
    unpack_block,
    write_stream,
)
from gfqc.infrastructure.repositories.results import ResultWriter, read_bits, write_bits

__all__ = [
    "format_code",
    "parse_code",
    "read_code_file",
    "write_code_file",
    "pack_block",
    "read_stream",
    "unpack_block",
    "write_stream",
    "ResultWriter",
    "read_bits",
    "write_bits",
]
