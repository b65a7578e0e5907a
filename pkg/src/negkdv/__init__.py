"""Exact verification kernel for negative-KdV type flows."""

__version__ = "0.1.0"
