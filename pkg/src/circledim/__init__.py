"""Numerical laboratory for dimension theory of circle-diffeomorphism group actions."""

__version__ = "0.1.0"
