"""Schrödinger-Heisenberg variational quantum eigensolver toolkit."""

__version__ = "0.1.0"
