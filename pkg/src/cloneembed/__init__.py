"""Bounded-depth machinery for embedding finite lattices into clone lattices."""

__version__ = "0.1.0"
