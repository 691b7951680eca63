"""Numerical laboratory for Steklov and Steklov-Neumann spectra of planar domains."""

__version__ = "0.1.0"
