"""Numerical laboratory for de Branges spaces given by atomic spectral data."""

__version__ = "0.1.0"
