"""Domain layer package.

Pure data types for fields, codes, messages and compressed blocks, plus the
codec's exception hierarchy. Nothing here performs I/O.

Modules:
    errors: Exception hierarchy.
    models: Data types shared by every service.
"""

__all__ = ["errors", "models"]
