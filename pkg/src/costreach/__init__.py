"""Bounded reachability and exact resource costs for prefix replacement systems."""

__version__ = "0.1.0"
