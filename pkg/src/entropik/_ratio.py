"""Exact rational coefficient type.

Single indirection point for the coefficient arithmetic: everything in the
kernel imports ``Q`` from here.  Exact rationals only -- no floats anywhere.
"""

from fractions import Fraction as Q

__all__ = ["Q"]
