"""Lossy compression of binary symmetric sources with GF(2^p) US-LDPC codes.

This is the root package of the codec. It follows a layered layout:
- Domain: field, code, message and block data types plus the error hierarchy
- Application: construction, peeling, message passing, codec and analysis services
- Infrastructure: field kernels, code/stream/result file formats, diagnostics
- Presentation: the command-line interface
"""

__version__ = "0.1.0"
__all__ = ["config", "domain", "application", "infrastructure", "presentation"]
