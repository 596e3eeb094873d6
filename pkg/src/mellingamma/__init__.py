"""Exact Mellin-side computations for gamma-kernel convolution on tori."""

__version__ = "0.1.0"
