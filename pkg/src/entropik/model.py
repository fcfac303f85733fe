"""Model intermediate representation.

A :class:`ModelDef` bundles the registries a derivation needs: independent
variables, fields, constitutive declarations, balance equations, the
entropy inequality, the chosen leading derivatives, nonzero assumptions,
and the differential-order cap.  Equation and entropy left-hand sides are
stored fully chain-expanded (all derivative operators applied, constitutive
derivatives turned into ConstitPartial atoms); the original source ASTs are
retained for formatting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .ast_nodes import Node
from .atoms import (
    Atom,
    ConstitPartial,
    ConstitSym,
    IndepVar,
    JetVar,
    mi_dominates,
)
from .errors import ModelError
from .expr import DiffContext, Expr
from .render import RenderContext, atom_str

__all__ = [
    "ConstitDecl",
    "Equation",
    "ModelDef",
    "Classification",
    "expand_model",
    "classify_atoms",
]


@dataclass(frozen=True)
class ConstitDecl:
    """A constitutive function: name, ordered argument atoms, and the
    unordered argument pairs whose mixed dependence is symmetric."""

    name: str
    args: tuple[Atom, ...]
    symmetric: tuple[tuple[int, int], ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)


@dataclass(frozen=True)
class Equation:
    """A balance equation ``lhs = 0`` with ``lhs`` chain-expanded."""

    label: str
    lhs: Expr
    # Source ASTs of the two sides as written, for round-trip formatting.
    lhs_ast: Optional[Node] = None
    rhs_ast: Optional[Node] = None

    def __eq__(self, other):
        if not isinstance(other, Equation):
            return NotImplemented
        return self.label == other.label and self.lhs == other.lhs

    def __hash__(self):
        return hash((self.label, self.lhs))


@dataclass(frozen=True, eq=False)
class ModelDef:
    indep: tuple[IndepVar, ...]
    fields: tuple[str, ...]
    decls: tuple[ConstitDecl, ...]
    equations: tuple[Equation, ...]
    entropy_lhs: Expr
    leading: tuple[JetVar, ...]
    nonzero: tuple[Expr, ...] = ()
    max_order: int = 4
    entropy_ast: Optional[Node] = None
    nonzero_asts: tuple[Node, ...] = ()

    # -- derived views ----------------------------------------------------

    @property
    def indep_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.indep)

    def decl_map(self) -> dict[str, ConstitDecl]:
        return {d.name: d for d in self.decls}

    def diff_ctx(self) -> DiffContext:
        return DiffContext(
            indep=self.indep, args={d.name: d.args for d in self.decls}
        )

    def render_ctx(self) -> RenderContext:
        names = self.indep_names
        arg_names = {}
        for d in self.decls:
            labels = []
            for a in d.args:
                if isinstance(a, JetVar) and any(a.orders):
                    labels.append(a.field + "_" + a.suffix(names))
                else:
                    labels.append(atom_str(a))
            arg_names[d.name] = tuple(labels)
        return RenderContext(indep_names=names, arg_names=arg_names)

    def dependency_atoms(self) -> set[Atom]:
        out: set[Atom] = set()
        for d in self.decls:
            out.update(d.args)
        return out

    def is_consequence(self, a: Atom) -> bool:
        """True iff ``a`` is a leading derivative or dominates one."""
        if not isinstance(a, JetVar):
            return False
        for ld in self.leading:
            if a.field == ld.field and (
                a.orders == ld.orders or mi_dominates(a.orders, ld.orders)
            ):
                return True
        return False

    # -- validation -------------------------------------------------------

    def validate(self) -> None:
        names = self.indep_names
        if len(set(names)) != len(names):
            raise ModelError("duplicate independent variables")
        if len(set(self.fields)) != len(self.fields):
            raise ModelError("duplicate fields")
        decl_names = [d.name for d in self.decls]
        if len(set(decl_names)) != len(decl_names):
            raise ModelError("duplicate constitutive declarations")
        field_set = set(self.fields)
        for d in self.decls:
            if len(set(d.args)) != len(d.args):
                raise ModelError(f"constitutive {d.name}: repeated argument")
            for a in d.args:
                if not isinstance(a, JetVar) or a.field not in field_set:
                    raise ModelError(
                        f"constitutive {d.name}: argument {a} is not a field derivative"
                    )
                if len(a.orders) != len(self.indep):
                    raise ModelError(
                        f"constitutive {d.name}: argument {a} has wrong multi-index length"
                    )
            for i, j in d.symmetric:
                if not (0 <= i < d.arity and 0 <= j < d.arity and i != j):
                    raise ModelError(
                        f"constitutive {d.name}: invalid symmetric pair ({i}, {j})"
                    )
        if len(self.leading) != len(self.equations):
            raise ModelError(
                f"{len(self.leading)} leading derivatives for "
                f"{len(self.equations)} equations"
            )
        for i, a in enumerate(self.leading):
            for b in self.leading[i + 1 :]:
                if a.field == b.field and (
                    mi_dominates(a.orders, b.orders)
                    or mi_dominates(b.orders, a.orders)
                ):
                    raise ModelError(
                        f"leading derivatives are not independent: "
                        f"{atom_str(a, self.render_ctx())} and "
                        f"{atom_str(b, self.render_ctx())}"
                    )
        occurring: set[Atom] = set()
        for eq in self.equations:
            if not any(isinstance(a, JetVar) for a in eq.lhs.atoms()):
                raise ModelError(f"equation {eq.label}: no jet variable on the left")
            occurring.update(eq.lhs.atoms())
        declared = {d.name for d in self.decls}
        for a in list(occurring) + list(self.entropy_lhs.atoms()):
            if isinstance(a, (ConstitSym, ConstitPartial)) and a.name not in declared:
                raise ModelError(f"undeclared constitutive symbol {a.name}")
        for ld in self.leading:
            if ld not in occurring:
                raise ModelError(
                    f"leading derivative {atom_str(ld, self.render_ctx())} "
                    "appears in no equation"
                )

    # -- equality (semantic content, ASTs ignored) ------------------------

    def __eq__(self, other):
        if not isinstance(other, ModelDef):
            return NotImplemented
        return (
            self.indep == other.indep
            and self.fields == other.fields
            and self.decls == other.decls
            and self.equations == other.equations
            and self.entropy_lhs == other.entropy_lhs
            and self.leading == other.leading
            and self.nonzero == other.nonzero
            and self.max_order == other.max_order
        )

    def __hash__(self):
        return hash((self.indep, self.fields, self.leading))


@dataclass(frozen=True)
class Classification:
    """Disjoint partition of the atoms occurring in a set of expressions
    (plus the model's independent variables)."""

    leading: frozenset[Atom]
    dependency: frozenset[Atom]
    free: frozenset[Atom]
    excluded: frozenset[Atom]
    conflicts: tuple[Atom, ...]  # dependency atoms claimed by the leading class


def expand_model(m: ModelDef) -> tuple[tuple[tuple[str, Expr], ...], Expr]:
    """The chain-expanded equation lhs forms and entropy lhs.

    Expansion happens when a ModelDef is built (the canonical Expr form
    cannot hold an unapplied derivative operator), so this is a lookup; it
    exists as the single place downstream passes take expanded forms from.
    """
    return tuple((eq.label, eq.lhs) for eq in m.equations), m.entropy_lhs


def classify_atoms(m: ModelDef, exprs: Iterable[Expr]) -> Classification:
    """Partition atoms into {leading, dependency, free, excluded}.

    Leading derivatives and their differential consequences win over
    dependency membership (the conflict is recorded); constitutive symbols
    and partials are excluded (they are the unknown functions).  All of the
    model's independent variables count as free elements whether or not
    they occur.
    """
    atoms: set[Atom] = set(m.indep)
    for e in exprs:
        atoms.update(e.atoms())
    deps = m.dependency_atoms()
    # Declared dependencies are in scope even when no expression mentions
    # the bare atom (e.g. an energy density that only ever appears inside
    # derivatives).
    atoms.update(deps)
    leading: set[Atom] = set()
    dependency: set[Atom] = set()
    free: set[Atom] = set()
    excluded: set[Atom] = set()
    conflicts: list[Atom] = []
    for a in atoms:
        if isinstance(a, (ConstitSym, ConstitPartial)):
            excluded.add(a)
        elif m.is_consequence(a):
            leading.add(a)
            if a in deps:
                conflicts.append(a)
        elif a in deps:
            dependency.add(a)
        else:
            free.add(a)
    conflicts.sort()
    return Classification(
        leading=frozenset(leading),
        dependency=frozenset(dependency),
        free=frozenset(free),
        excluded=frozenset(excluded),
        conflicts=tuple(conflicts),
    )
