"""Solvers and decomposition machinery for graphs whose tree decompositions
have small bag-local induced matchings or independent sets."""

__version__ = "0.1.0"
