"""Dispersion interaction of two model atoms, including excited reference states."""

__version__ = "0.1.0"
