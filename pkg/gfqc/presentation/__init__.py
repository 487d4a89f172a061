"""Presentation layer: the ``gfqc`` command line."""
