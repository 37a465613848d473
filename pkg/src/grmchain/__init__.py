"""Cyclic subcodes of GRM(2, m)* over odd prime fields."""

__version__ = "0.1.0"
