"""Geometric LP relaxation of minimum multiway cut and its rounding schemes."""

__version__ = "0.1.0"
