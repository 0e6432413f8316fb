"""Finite-field toolkit for auditing the existence of primitive normal pairs
(eps, f(eps)) with prescribed traces over characteristic-5 fields."""

__version__ = "0.1.0"
