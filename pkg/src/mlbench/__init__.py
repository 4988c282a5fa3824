"""Multilayer network benchmarks with planted, interdependent community structure."""

__version__ = "0.1.0"
