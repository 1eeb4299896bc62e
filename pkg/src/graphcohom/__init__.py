"""Exact graph cohomology of graded algebras, simplicial configuration-space
oracles, and Massey-product spectral sequences."""

__version__ = "0.1.0"
