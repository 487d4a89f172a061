"""Infrastructure layer of the codec.

This package provides the numerical kernels and the file formats.

Modules:
    services: GF(2^p) tables and the Walsh-Hadamard transform
    repositories: Code files, compressed streams and result tables
    diagnostics: Logging setup and the per-sweep diagnostics sink
"""

from gfqc.infrastructure import services
from gfqc.infrastructure import repositories

__all__ = [
    "services",
    "repositories",
]
