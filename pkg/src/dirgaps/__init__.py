"""Numerics for large gaps between critical-line zeros of Dirichlet L-functions.

Modules: characters, lfunc, zeros, shiftframe (with the laurent series
engine), kappacoeffs, localconst, weights and the cli front end.
"""

__version__ = "0.1.0"
