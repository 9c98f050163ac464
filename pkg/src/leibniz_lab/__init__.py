"""Exact computations with Leibniz algebras of Heisenberg type."""

__version__ = "0.1.0"
