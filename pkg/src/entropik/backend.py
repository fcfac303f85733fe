"""Polynomial backend selection.

Prefers the compiled extension (``entropik._poly_cy``); falls back to the
pure-Python twin.  Set ``ENTROPIK_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os

if os.environ.get("ENTROPIK_PURE"):
    from . import _poly_py as poly
else:
    try:
        from . import _poly_cy as poly  # type: ignore[attr-defined]
    except ImportError:
        from . import _poly_py as poly

BACKEND = poly.BACKEND

mono_mul = poly.mono_mul
p_add = poly.p_add
p_sub = poly.p_sub
p_neg = poly.p_neg
p_scale = poly.p_scale
p_mul = poly.p_mul
p_pow = poly.p_pow
p_diff = poly.p_diff
