"""Plain-text rendering of atoms and expressions.

Jet variables render as ``rho_tx`` (field name plus derivative suffix) and
constitutive partials as ``d2q1/drho.deps`` when a :class:`RenderContext`
supplies the model's independent-variable and argument names; without one,
positional fallbacks are used.  Monomials print in descending canonical
order, so rendering is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from ._ratio import Q
from .atoms import Atom, ConstitPartial, ConstitSym, IndepVar, JetVar

__all__ = ["RenderContext", "atom_str", "expr_str", "poly_str"]


@dataclass(frozen=True)
class RenderContext:
    indep_names: tuple[str, ...]
    # constitutive name -> display name of each argument slot
    arg_names: Mapping[str, tuple[str, ...]]


def atom_str(a: Atom, ctx: Optional[RenderContext] = None) -> str:
    if isinstance(a, (IndepVar, ConstitSym)):
        return a.name
    if isinstance(a, JetVar):
        if not any(a.orders):
            return a.field
        if ctx is not None and len(ctx.indep_names) == len(a.orders):
            return a.field + "_" + a.suffix(ctx.indep_names)
        return str(a)
    if isinstance(a, ConstitPartial):
        order = a.order
        head = f"d{a.name}" if order == 1 else f"d{order}{a.name}"
        names = None
        if ctx is not None:
            names = ctx.arg_names.get(a.name)
        parts = []
        for j, k in enumerate(a.slots):
            label = names[j] if names and j < len(names) else f"a{j}"
            parts.extend([f"d{label}"] * k)
        return head + "/" + ".".join(parts)
    return str(a)


def _coeff_str(c: Q) -> str:
    return str(c)


def _mono_str(m, ctx) -> str:
    parts = []
    for a, e in m:
        s = atom_str(a, ctx)
        parts.append(s if e == 1 else f"{s}^{e}")
    return "*".join(parts)


def poly_str(p, ctx: Optional[RenderContext] = None) -> str:
    from .expr import mono_key

    if not p:
        return "0"
    out = []
    for m in sorted(p, key=mono_key, reverse=True):
        c = p[m]
        sign = "-" if c < 0 else "+"
        mag = -c if c < 0 else c
        if not m:
            body = _coeff_str(mag)
        elif mag == 1:
            body = _mono_str(m, ctx)
        else:
            body = f"{_coeff_str(mag)}*{_mono_str(m, ctx)}"
        out.append((sign, body))
    first_sign, first_body = out[0]
    s = ("-" if first_sign == "-" else "") + first_body
    for sign, body in out[1:]:
        s += f" {sign} {body}"
    return s


def expr_str(e, ctx: Optional[RenderContext] = None) -> str:
    from .expr import _ONE_POLY

    num = poly_str(e.num, ctx)
    if e.den == _ONE_POLY:
        return num
    den = poly_str(e.den, ctx)
    return f"({num})/({den})"
