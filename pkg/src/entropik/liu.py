"""Classical multiplier-based entropy analysis, for comparison.

The extended inequality subtracts each balance equation weighted by a
fresh unknown multiplier symbol, then sets the coefficients of every
derivative that is not a declared material-function argument to zero —
a purely linear-algebraic step that knows nothing about differential
consequences of the equations.  Comparing its output with the
solution-manifold splitting quantifies what that omission costs.

The multipliers are postulated to be functions of the declared
dependency atoms.  Because they are *arbitrary* unknown functions, any
identity they enter must hold for every value of their arguments; when
a participating material function lacks one of those arguments, slot
differentiation of the identity produces extra conclusions in the
generic branch (multiplier partial nonzero).  That harvesting step is
what reproduces the method's well-known over-restriction on models
whose energy pair depends on a derivative the fluxes do not see.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .atoms import (
    Atom,
    ConstitPartial,
    ConstitSym,
    JetVar,
    mi_add,
    mi_total,
    mi_unit,
)
from .errors import (
    MultiplierEliminationIncomplete,
    NonlinearExtendedInequality,
)
from .expr import (
    Expr,
    Monomial,
    ZERO,
    collect_coefficients,
    mono_key,
    partial_diff,
    substitute,
)
from .model import ModelDef
from .render import expr_str
from .split import ConstraintSystem, normalize_constraint, try_divexact

__all__ = [
    "LiuResult",
    "ComparisonReport",
    "multiplier_symbols",
    "liu_extended",
    "liu_split",
    "eliminate_multipliers",
    "implied_by",
    "compare",
]

_MULTIPLIER_PREFIX = "Lam_"


def multiplier_symbols(m: ModelDef) -> tuple[ConstitSym, ...]:
    """One fresh multiplier symbol per equation, by label."""
    return tuple(ConstitSym(_MULTIPLIER_PREFIX + eq.label) for eq in m.equations)


def liu_extended(
    m: ModelDef, multiplier_dep: Optional[Sequence[Atom]] = None
) -> Expr:
    """Entropy lhs minus multiplier-weighted equation lhs's.

    ``multiplier_dep`` records the postulated multiplier dependency; it
    does not change the expression (multipliers are never differentiated
    here) but is honoured by :func:`liu_split` when the caller passes the
    same list there.
    """
    e = m.entropy_lhs
    for lam, eq in zip(multiplier_symbols(m), m.equations):
        e = e - Expr.atom(lam) * eq.lhs
    return e


@dataclass(frozen=True)
class LiuResult:
    multipliers: tuple[ConstitSym, ...]
    multiplier_dep: tuple[Atom, ...]
    identities: tuple[Expr, ...]   # each = 0, normalized
    residual: Expr                  # remainder, >= 0
    split_atoms: tuple[JetVar, ...]
    table: tuple[tuple[Monomial, Expr], ...]
    free_fields: tuple[JetVar, ...] = ()
    derived_zeros: tuple[Atom, ...] = ()        # material-function atoms
    generic_assumptions: tuple[Atom, ...] = ()  # multiplier partials != 0


def _is_multiplier_name(name: str) -> bool:
    return name.startswith(_MULTIPLIER_PREFIX)


def _args_map(
    m: ModelDef, multiplier_dep: Sequence[Atom]
) -> dict[str, tuple[Atom, ...]]:
    args = {d.name: d.args for d in m.decls}
    dep = tuple(multiplier_dep)
    for lam in multiplier_symbols(m):
        args[lam.name] = dep
    return args


def _arg_derivative(
    e: Expr, a: Atom, args_of: Mapping[str, tuple[Atom, ...]]
) -> Expr:
    """Slot derivative of ``e`` with respect to the dependency atom ``a``.

    Every symbol whose declared arguments include ``a`` contributes a
    bumped partial; symbols that do not see ``a`` are constants.  ``a``
    itself differentiates to one; all other jet atoms are unrelated
    coordinates and differentiate to zero.
    """
    total = ZERO
    for x in set(e.atoms()):
        if x is a:
            total = total + partial_diff(e, x)
            continue
        if not isinstance(x, (ConstitSym, ConstitPartial)):
            continue
        args = args_of.get(x.name)
        if args is None or a not in args:
            continue
        j = args.index(a)
        if isinstance(x, ConstitSym):
            d = ConstitPartial(x.name, mi_unit(len(args), j))
        else:
            d = ConstitPartial(x.name, mi_add(x.slots, mi_unit(len(args), j)))
        total = total + partial_diff(e, x) * Expr.atom(d)
    return total


def _apply_zeros(e: Expr, zeros: Iterable[Atom]) -> Expr:
    """Substitute zero for the given atoms *as functions*: a vanishing
    symbol also kills every partial of the same symbol."""
    zeros = set(zeros)
    if not zeros:
        return e
    names = {a.name for a in zeros if isinstance(a, ConstitSym)}
    sub = {a: ZERO for a in zeros}
    for x in e.atoms():
        if isinstance(x, ConstitPartial) and x.name in names:
            sub[x] = ZERO
    return substitute(e, sub) if sub else e


def _field_pieces(e: Expr, free_fields: Sequence[JetVar]) -> list[Expr]:
    """Split over undifferentiated fields outside every dependency: no
    unknown function sees them, so each coefficient vanishes on its own."""
    fs = [f for f in free_fields if f in set(e.atoms())]
    if not fs:
        return [e]
    return list(collect_coefficients(e, fs).values())


def _mono_expr(mono: Monomial) -> Expr:
    e = Expr.rational(1)
    for a, k in mono:
        e = e * Expr.atom(a) ** k
    return e


def _certified_nonzero(e: Expr, nonzero: Iterable[Expr]) -> bool:
    """True when ``e`` is a product of rationals and nonzero-assumed
    factors, so dividing by it is safe."""
    if e.is_zero():
        return False
    for f in nonzero:
        while True:
            d = try_divexact(e, f)
            if d is None or d.is_zero():
                break
            e = d
    return e.is_rational()


def _single_monomial(e: Expr) -> Optional[Monomial]:
    e = e.numerator_expr()
    if len(e.num) != 1:
        return None
    mono, = e.num.keys()
    return mono


def _harvest(
    pieces: Sequence[Expr],
    multiplier_dep: Sequence[Atom],
    args_of: Mapping[str, tuple[Atom, ...]],
    nonzero: Sequence[Expr],
) -> tuple[set[Atom], set[Atom]]:
    """Closure of zero conclusions over the refined identity pieces.

    Two sound rules run to a fixed point first:

    * a single-monomial identity whose factors are all certified nonzero
      except one unknown symbol forces that symbol to zero;
    * a slot derivative of an identity that collapses to one multiplier
      partial times a certified cofactor forces that partial to zero
      (the multiplier simply cannot depend on that argument).

    Only when neither rule fires is one *generic-branch* step taken: a
    slot derivative of the form (multiplier partial)·(single unknown
    symbol) concludes the unknown vanishes, recording the assumption
    that the multiplier partial is nonzero.  This is the branch the
    multiplier ansatz takes by default — the multipliers are arbitrary
    functions of all their declared arguments — and it is the source of
    the method's extra restrictions.
    """
    zeros: set[Atom] = set()
    generic: set[Atom] = set()

    def uncert(mono: Monomial, skip: Atom | None = None) -> list[Atom]:
        out = []
        for a, _k in mono:
            if a is skip:
                continue
            if not _certified_nonzero(Expr.atom(a), nonzero):
                out.append(a)
        return out

    def mult_partials(mono: Monomial) -> list[tuple[Atom, int]]:
        return [
            (a, k)
            for a, k in mono
            if isinstance(a, ConstitPartial) and _is_multiplier_name(a.name)
        ]

    while True:
        pool = []
        for p in pieces:
            r = _apply_zeros(p, zeros)
            if r.is_zero():
                continue
            r, _ = normalize_constraint(r, nonzero)
            if not r.is_zero() and r not in pool:
                pool.append(r)

        forced = False
        # Rule 1: single monomial with one uncertified symbol.
        for p in pool:
            mono = _single_monomial(p)
            if mono is None:
                continue
            u = uncert(mono)
            if len(u) == 1 and isinstance(u[0], (ConstitSym, ConstitPartial)):
                if u[0] not in zeros:
                    zeros.add(u[0])
                    forced = True
        if forced:
            continue

        # Rule 2: forced multiplier-partial zeros from slot derivatives.
        candidates: list[tuple[Atom, Atom]] = []
        for p in pool:
            for a in multiplier_dep:
                j = _apply_zeros(_arg_derivative(p, a, args_of), zeros)
                if j.is_zero():
                    continue
                mono = _single_monomial(j)
                if mono is None:
                    continue
                mp = mult_partials(mono)
                if len(mp) != 1 or mp[0][1] != 1:
                    continue
                m_atom = mp[0][0]
                rest = uncert(mono, skip=m_atom)
                if not rest:
                    if m_atom not in zeros:
                        zeros.add(m_atom)
                        forced = True
                elif (
                    len(rest) == 1
                    and isinstance(rest[0], (ConstitSym, ConstitPartial))
                    and not _is_multiplier_name(rest[0].name)
                    and rest[0] not in zeros
                ):
                    candidates.append((rest[0], m_atom))
        if forced:
            continue

        # Generic branch: take one conclusion, then re-run the sound rules.
        if candidates:
            candidates.sort(key=lambda uv: (uv[0].key, uv[1].key))
            u, m_atom = candidates[0]
            zeros.add(u)
            generic.add(m_atom)
            continue
        break

    return zeros, generic


def liu_split(
    e: Expr,
    m: ModelDef,
    multiplier_dep: Optional[Sequence[Atom]] = None,
) -> LiuResult:
    """Coefficient extraction over the non-argument derivatives.

    The splitting set is every derivative (jet variable of order >= 1)
    present in ``e`` that is neither a declared material-function argument
    nor in the multiplier dependency.  The extended inequality must be
    linear in that set; a higher-degree monomial is a structural failure
    of the multiplier method for the model and is reported as such.

    After the raw coefficients, a harvesting pass (see :func:`_harvest`)
    refines each identity over dependency-free fields and closes the
    result under slot differentiation in the multiplier arguments; any
    material-function symbols concluded zero are appended as identities.
    """
    if multiplier_dep is None:
        multiplier_dep = tuple(
            sorted(m.dependency_atoms(), key=lambda a: a.key)
        )
    else:
        multiplier_dep = tuple(multiplier_dep)
    dep = set(m.dependency_atoms()) | set(multiplier_dep)
    split_atoms = sorted(
        (
            a
            for a in e.atoms()
            if isinstance(a, JetVar) and mi_total(a.orders) >= 1 and a not in dep
        ),
        key=lambda a: a.key,
    )
    coeffs = collect_coefficients(e, split_atoms)
    rc = m.render_ctx()
    for mono in coeffs:
        if sum(k for _, k in mono) > 1:
            raise NonlinearExtendedInequality(
                "extended inequality is not linear in the split derivatives: "
                f"monomial {expr_str(_mono_expr(mono), rc)}",
                monomial=mono,
            )

    nonzero = list(m.nonzero)
    table = sorted(
        ((mono, c) for mono, c in coeffs.items() if mono),
        key=lambda kv: mono_key(kv[0]),
    )
    identities: list[Expr] = []
    for _, c in table:
        n, _ = normalize_constraint(c, nonzero)
        if not n.is_zero() and n not in identities:
            identities.append(n)

    free_fields = tuple(
        sorted(
            (
                jv
                for f in m.fields
                if (jv := JetVar(f, (0,) * len(m.indep))) not in dep
            ),
            key=lambda a: a.key,
        )
    )
    pieces: list[Expr] = []
    for ident in identities:
        for p in _field_pieces(ident, free_fields):
            n, _ = normalize_constraint(p, nonzero)
            if not n.is_zero() and n not in pieces:
                pieces.append(n)
    args_of = _args_map(m, multiplier_dep)
    zeros, generic = _harvest(pieces, multiplier_dep, args_of, nonzero)

    declared = {d.name for d in m.decls}
    derived = tuple(
        sorted((a for a in zeros if a.name in declared), key=lambda a: a.key)
    )
    for a in derived:
        z = Expr.atom(a)
        if z not in identities:
            identities.append(z)

    return LiuResult(
        multipliers=multiplier_symbols(m),
        multiplier_dep=multiplier_dep,
        identities=tuple(identities),
        residual=coeffs.get((), ZERO),
        split_atoms=tuple(split_atoms),
        table=table,
        free_fields=free_fields,
        derived_zeros=derived,
        generic_assumptions=tuple(sorted(generic, key=lambda a: a.key)),
    )


def eliminate_multipliers(
    lr: LiuResult, nonzero: Iterable[Expr]
) -> tuple[dict[ConstitSym, Expr], tuple[Expr, ...], tuple[ConstitSym, ...]]:
    """Solve identities for the multiplier symbols where a safe linear
    pivot exists; substitute into the rest.

    Returns (solved multipliers, multiplier-free identities, unsolved
    multiplier symbols).  Identities still containing an unsolved
    multiplier are dropped from the returned list (the caller reports the
    incompleteness).
    """
    nonzero = list(nonzero)
    pending = list(lr.identities)
    solved: dict[ConstitSym, Expr] = {}
    remaining = set(lr.multipliers)

    progress = True
    while progress and remaining:
        progress = False
        for lam in sorted(remaining, key=lambda a: a.key):
            for ident in pending:
                if lam not in set(ident.atoms()):
                    continue
                coeffs = collect_coefficients(ident, [lam])
                mono = ((lam, 1),)
                if set(coeffs) - {(), mono}:
                    continue  # nonlinear occurrence
                a = coeffs[mono]
                if any(x in remaining or x in solved for x in a.atoms()):
                    continue  # coefficient entangled with other multipliers
                if not _certified_nonzero(a, nonzero):
                    continue
                b = coeffs.get((), ZERO)
                solved[lam] = -b / a
                remaining.discard(lam)
                pending = [
                    substitute(x, {lam: solved[lam]}) for x in pending
                ]
                progress = True
                break
            if progress:
                break

    # A solved value may reference a multiplier that was pivoted later;
    # back-substitute until every value is multiplier-free.
    for _ in range(len(solved)):
        dirty = False
        for lam, v in list(solved.items()):
            if any(x in solved for x in v.atoms()):
                solved[lam] = substitute(v, solved)
                dirty = True
        if not dirty:
            break

    physical: list[Expr] = []
    for ident in pending:
        atoms = set(ident.atoms())
        if atoms & remaining:
            continue
        n, _ = normalize_constraint(ident, nonzero)
        if not n.is_zero() and n not in physical:
            physical.append(n)
    return solved, tuple(physical), tuple(sorted(remaining, key=lambda a: a.key))


def _zero_closure(
    base: Sequence[Expr], nonzero: Sequence[Expr]
) -> tuple[set[Atom], list[Expr]]:
    """Symbols forced to zero by single-monomial members of ``base``
    (certified cofactor), iterated, plus the base reduced modulo them."""
    zeros: set[Atom] = set()
    current = list(base)
    while True:
        new = False
        for c in current:
            mono = _single_monomial(c)
            if mono is None:
                continue
            u = [
                a
                for a, _k in mono
                if isinstance(a, (ConstitSym, ConstitPartial))
                and not _certified_nonzero(Expr.atom(a), nonzero)
            ]
            certified_rest = all(
                _certified_nonzero(Expr.atom(a), nonzero)
                for a, _k in mono
                if a not in u
            )
            if len(u) == 1 and certified_rest and u[0] not in zeros:
                zeros.add(u[0])
                new = True
        if not new:
            break
        reduced = []
        for c in current:
            r = _apply_zeros(c, zeros)
            if r.is_zero():
                continue
            r, _ = normalize_constraint(r, nonzero)
            if not r.is_zero() and r not in reduced:
                reduced.append(r)
        current = reduced + [Expr.atom(a) for a in sorted(zeros, key=lambda a: a.key)]
    return zeros, current


def _in_rational_span(target: Expr, base: Sequence[Expr]) -> bool:
    """Whether ``target``'s numerator is a rational-coefficient linear
    combination of the base numerators (Gaussian elimination over the
    monomial basis)."""
    rows = [dict(b.numerator_expr().num) for b in base if not b.is_zero()]
    t = dict(target.numerator_expr().num)
    pivots: list[tuple[Monomial, dict]] = []
    for row in rows:
        row = dict(row)
        for mono, prow in pivots:
            c = row.get(mono)
            if c:
                for m2, v in prow.items():
                    nv = row.get(m2, 0) - c * v
                    if nv:
                        row[m2] = nv
                    else:
                        row.pop(m2, None)
        if row:
            lead = min(row, key=mono_key)
            lc = row[lead]
            pivots.append((lead, {m: v / lc for m, v in row.items()}))
    for mono, prow in pivots:
        c = t.get(mono)
        if c:
            for m2, v in prow.items():
                nv = t.get(m2, 0) - c * v
                if nv:
                    t[m2] = nv
                else:
                    t.pop(m2, None)
    return not t


def implied_by(
    target: Expr,
    base: Sequence[Expr],
    nonzero: Iterable[Expr],
    zeros: Optional[set[Atom]] = None,
) -> bool:
    """Sound, incomplete implication test: ``target = 0`` follows from
    ``base`` (all = 0) under the nonzero assumptions.

    Accepts: exact membership after normalization, vanishing after
    substituting symbols the base forces to zero, and polynomial
    multiples of a base element (before or after the zero substitution).
    """
    nonzero = list(nonzero)
    n, _ = normalize_constraint(target, nonzero)
    if n.is_zero() or n in base:
        return True
    if zeros is None:
        zeros, _ = _zero_closure(base, nonzero)
    candidates = [n]
    if zeros:
        r = _apply_zeros(n, zeros)
        if r.is_zero():
            return True
        r, _ = normalize_constraint(r, nonzero)
        if r.is_zero() or r in base:
            return True
        candidates.append(r)
    for cand in candidates:
        for b in base:
            if b.is_zero():
                continue
            if try_divexact(cand.numerator_expr(), b.numerator_expr()) is not None:
                return True
    for cand in candidates:
        if _in_rational_span(cand, base):
            return True
    return False


@dataclass(frozen=True)
class ComparisonReport:
    verdict: str  # "identical" | "liu-over-restricts" | "incomparable"
    multipliers: dict
    common: tuple[Expr, ...]
    liu_only: tuple[Expr, ...]          # not implied by the solution set
    solution_only: tuple[Expr, ...]     # not implied by the multiplier set
    unsolved_multipliers: tuple[ConstitSym, ...]
    incomplete: bool
    generic_assumptions: tuple[Atom, ...] = ()


def compare(
    lr: LiuResult, cs: ConstraintSystem, strict: bool = False
) -> ComparisonReport:
    """Classify the multiplier-method identity set against the
    solution-manifold constraint set.

    The multiplier symbols are eliminated linearly first, and both sides
    are refined over dependency-free fields (sound: no unknown function
    sees them).  Then each side is tested for implication by the other;
    the verdict is ``identical`` when both directions close,
    ``liu-over-restricts`` when the multiplier set implies everything the
    solution set requires and strictly more, and ``incomparable``
    otherwise.
    """
    nonzero = list(cs.nonzero)
    solved, liu_raw, unsolved = eliminate_multipliers(lr, nonzero)
    incomplete = bool(unsolved)
    if incomplete and strict:
        raise MultiplierEliminationIncomplete(
            f"could not eliminate multipliers: {', '.join(a.name for a in unsolved)}"
        )

    def refined(exprs: Iterable[Expr]) -> list[Expr]:
        out: list[Expr] = []
        for e in exprs:
            if e.is_zero():
                continue
            for p in _field_pieces(e, lr.free_fields):
                n, _ = normalize_constraint(p, nonzero)
                if not n.is_zero() and n not in out:
                    out.append(n)
        return out

    liu_ids = refined(liu_raw)
    sol = refined(cs.constraints)
    liu_zeros, _ = _zero_closure(liu_ids, nonzero)
    sol_zeros, _ = _zero_closure(sol, nonzero)

    common: list[Expr] = []
    liu_only: list[Expr] = []
    for ident in liu_ids:
        if implied_by(ident, sol, nonzero, zeros=sol_zeros):
            common.append(ident)
        else:
            liu_only.append(ident)
    solution_only = [
        c for c in sol if not implied_by(c, liu_ids, nonzero, zeros=liu_zeros)
    ]

    if not liu_only and not solution_only:
        verdict = "identical"
    elif not solution_only:
        verdict = "liu-over-restricts"
    else:
        verdict = "incomparable"
    return ComparisonReport(
        verdict=verdict,
        multipliers=dict(solved),
        common=tuple(common),
        liu_only=tuple(liu_only),
        solution_only=tuple(solution_only),
        unsolved_multipliers=unsolved,
        incomplete=incomplete,
        generic_assumptions=lr.generic_assumptions,
    )
