"""Braid-word compilation of quantum gates for non-semisimple Ising anyons."""

__version__ = "0.1.0"
