"""Exact certification of the SIC/MUB contextuality inequalities in dimension three."""

__version__ = "0.1.0"
