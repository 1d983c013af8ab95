"""Quasi-sets of indistinguishable particles and their quantum statistics."""

__version__ = "0.1.0"
