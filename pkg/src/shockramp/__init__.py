"""Shock-ramp Lagrangian analysis of free-surface velocity records."""

__version__ = "0.1.0"
