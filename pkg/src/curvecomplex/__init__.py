"""Exact combinatorics of simple closed curves on punctured surfaces."""

__version__ = "0.1.0"
