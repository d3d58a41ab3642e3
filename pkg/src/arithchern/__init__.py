"""Exact and numerical pieces for checking an arithmetic Chern class identity
for short exact sequences of hermitian line bundles on the projective line
over the integers."""

__version__ = "0.1.0"
