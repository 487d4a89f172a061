"""Application layer of the codec.

This package provides the use cases that orchestrate domain models and
infrastructure kernels: code construction, leaf removal, message passing,
compression and the analysis experiments.

Modules:
    services: Construction, peeling, message passing, codec and analysis services
"""

from gfqc.application import services

__all__ = [
    "services",
]
