"""Exact verification toolkit for a six-dimensional p-adic quadratic space,
its Clifford algebra, vertex lattices and associated finite-field strata."""

__version__ = "0.1.0"
