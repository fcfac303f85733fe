"""Interned jet-space symbols.

An :class:`Atom` is an indivisible symbol of the expression algebra:

* :class:`IndepVar` -- an independent variable (``t``, ``x``, ...);
* :class:`JetVar` -- a field derivative identified by field name and a
  multi-index of derivative orders, one entry per independent variable
  (the zero multi-index is the field itself);
* :class:`ConstitSym` -- an undetermined constitutive function, treated as
  an opaque symbol;
* :class:`ConstitPartial` -- a partial derivative of a constitutive
  function, identified by per-argument-slot differentiation counts.

Atoms are interned: structurally equal atoms are the *same* object, so
identity comparison and the default hash are valid.  A global total order
(IndepVar < JetVar < ConstitSym < ConstitPartial, then lexicographic on the
structural payload) is exposed through ``Atom.key`` and the comparison
operators; canonical expression forms rely on it.

The interner is the only shared mutable state in the kernel; registration
uses ``dict.setdefault`` and is safe under concurrent use.
"""

from __future__ import annotations

from typing import Iterable

__all__ = [
    "Atom",
    "IndepVar",
    "JetVar",
    "ConstitSym",
    "ConstitPartial",
    "mi_add",
    "mi_unit",
    "mi_total",
    "mi_dominates",
]


# ---------------------------------------------------------------------------
# Multi-index helpers.  A multi-index is a plain tuple of nonnegative ints.

def mi_unit(n: int, i: int) -> tuple[int, ...]:
    """The i-th unit multi-index of length n."""
    return tuple(1 if j == i else 0 for j in range(n))


def mi_add(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    if len(a) != len(b):
        raise ValueError(f"multi-index length mismatch: {a} vs {b}")
    return tuple(x + y for x, y in zip(a, b))


def mi_total(a: tuple[int, ...]) -> int:
    return sum(a)


def mi_dominates(beta: tuple[int, ...], alpha: tuple[int, ...]) -> bool:
    """True iff beta >= alpha componentwise and beta != alpha.

    When alpha identifies a leading derivative of a field, the dominated
    beta identifies one of its differential consequences.
    """
    return (
        len(beta) == len(alpha)
        and beta != alpha
        and all(b >= a for b, a in zip(beta, alpha))
    )


# ---------------------------------------------------------------------------
# Atoms.

class Atom:
    """Base class; use the subclasses' constructors (they intern)."""

    __slots__ = ("key",)
    _interned: dict[tuple, "Atom"] = {}

    def __repr__(self) -> str:  # pragma: no cover - debug aid
        return f"<{type(self).__name__} {self}>"

    # Total order over all atoms, by structural key.
    def __lt__(self, other: "Atom") -> bool:
        return self.key < other.key

    def __le__(self, other: "Atom") -> bool:
        return self.key <= other.key

    def __gt__(self, other: "Atom") -> bool:
        return self.key > other.key

    def __ge__(self, other: "Atom") -> bool:
        return self.key >= other.key

    @classmethod
    def _intern(cls, key: tuple, builder) -> "Atom":
        found = Atom._interned.get(key)
        if found is None:
            found = Atom._interned.setdefault(key, builder())
        return found


class IndepVar(Atom):
    __slots__ = ("name",)

    def __new__(cls, name: str) -> "IndepVar":
        key = (0, name)

        def build():
            self = object.__new__(cls)
            self.key = key
            self.name = name
            return self

        return cls._intern(key, build)  # type: ignore[return-value]

    def __str__(self) -> str:
        return self.name


class JetVar(Atom):
    __slots__ = ("field", "orders")

    def __new__(cls, field: str, orders: Iterable[int]) -> "JetVar":
        orders = tuple(int(o) for o in orders)
        if any(o < 0 for o in orders):
            raise ValueError(f"negative derivative order in {orders}")
        key = (1, field, orders)

        def build():
            self = object.__new__(cls)
            self.key = key
            self.field = field
            self.orders = orders
            return self

        return cls._intern(key, build)  # type: ignore[return-value]

    @property
    def order(self) -> int:
        return sum(self.orders)

    def suffix(self, indep_names: tuple[str, ...]) -> str:
        """Subscript string like ``tx`` for orders (1,1) over (t, x)."""
        return "".join(n * k for n, k in zip(indep_names, self.orders))

    def __str__(self) -> str:
        if not any(self.orders):
            return self.field
        # Without the model's independent-variable names, fall back to
        # positional subscripts; renderers pass real names via suffix().
        sub = ",".join(str(o) for o in self.orders)
        return f"{self.field}[{sub}]"


class ConstitSym(Atom):
    __slots__ = ("name",)

    def __new__(cls, name: str) -> "ConstitSym":
        key = (2, name)

        def build():
            self = object.__new__(cls)
            self.key = key
            self.name = name
            return self

        return cls._intern(key, build)  # type: ignore[return-value]

    def __str__(self) -> str:
        return self.name


class ConstitPartial(Atom):
    """d^k(name) with slot-wise differentiation counts.

    ``slots`` has one entry per declared argument of the constitutive
    symbol; entry j counts differentiations with respect to argument j.
    The atom is opaque to the algebra: nothing tracks what the arguments
    evaluate to.
    """

    __slots__ = ("name", "slots")

    def __new__(cls, name: str, slots: Iterable[int]) -> "ConstitPartial":
        slots = tuple(int(s) for s in slots)
        if any(s < 0 for s in slots) or sum(slots) == 0:
            raise ValueError(f"invalid slot multi-index {slots}")
        key = (3, name, slots)

        def build():
            self = object.__new__(cls)
            self.key = key
            self.name = name
            self.slots = slots
            return self

        return cls._intern(key, build)  # type: ignore[return-value]

    @property
    def order(self) -> int:
        return sum(self.slots)

    def __str__(self) -> str:
        order = self.order
        head = f"d{self.name}" if order == 1 else f"d{order}{self.name}"
        parts = []
        for j, k in enumerate(self.slots):
            parts.extend([f"a{j}"] * k)
        return head + "/" + ".".join("d" + p for p in parts)
