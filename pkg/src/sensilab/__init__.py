"""Finite-window tools for sensitivity, recurrence and divergence in skew products and the Morse system."""

__version__ = "0.1.0"
