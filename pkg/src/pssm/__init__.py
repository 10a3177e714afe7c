"""Truncated power-series solver for nonlinear PDEs."""
__version__ = "0.1.0"
