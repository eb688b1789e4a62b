"""Exact and numerical tools for the Painlevé III equations of types D6 and D7."""

__version__ = "0.1.0"
