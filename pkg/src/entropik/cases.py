"""Branching the constraint identities on undetermined coefficients.

The identities produced by the splitting are a polynomial system in the
unknown material functions.  Reducing it to triangular form repeatedly
divides by coefficients; when a coefficient is not certified nonzero the
reduction forks: one branch assumes the coefficient nonzero and divides,
the other assumes it vanishes identically and substitutes.  Collecting
the forks gives a finite case tree whose leaves are the mutually
exclusive solution families.

Three reduction rules run to a fixed point inside every node:

* a constraint that is a single monomial forces its one uncertified
  function factor to vanish (as a function: all its partials die too);
* a constraint linear in a function atom, with a coefficient that is a
  product of certified-nonzero factors and at least one of them not a
  plain rational, is solved for that atom;
* when two single-slot partials of the same function have been solved,
  cross-differentiating the two values must agree; the difference is
  appended as a new constraint.

Every division is logged as a certificate naming the constraint and the
factor divided by.  Composite pivots arise from a proportionality
pattern: when the same pair of coefficient atoms multiplies unknown
pairs across several constraints, the ratio of the two coefficients is
pinned down, and whether it actually varies with each shared argument —
the slot Wronskian of the pair — becomes a branching question.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

from .atoms import Atom, ConstitPartial, ConstitSym, JetVar, mi_dominates, mi_total
from .expr import Expr, ZERO, collect_coefficients, substitute
from .liu import _arg_derivative, _certified_nonzero, _single_monomial
from .split import (
    ConstraintSystem,
    _nonzero_factors,
    normalize_constraint,
    try_divexact,
)

__all__ = [
    "Assumption",
    "Certificate",
    "ReducedSystem",
    "CaseNode",
    "CaseTree",
    "DepthCapExceeded",
    "pivot_candidates",
    "apply_assumptions",
    "build_tree",
    "force_residual",
]

_MAX_ROUNDS = 64


@dataclass(frozen=True)
class Assumption:
    """One branch hypothesis: ``expr`` identically zero, or nonzero."""

    expr: Expr
    polarity: str  # "zero" | "nonzero"

    def __post_init__(self):
        if self.polarity not in ("zero", "nonzero"):
            raise ValueError(f"bad polarity {self.polarity!r}")

    @staticmethod
    def zero(e: Expr) -> "Assumption":
        return Assumption(e, "zero")

    @staticmethod
    def nonzero(e: Expr) -> "Assumption":
        return Assumption(e, "nonzero")


@dataclass(frozen=True)
class Certificate:
    """Why one reduction step was sound."""

    kind: str            # "solve" | "zero" | "compat" | "cancel"
    constraint: Expr
    factor: Expr         # the divided-by (certified nonzero) coefficient
    atom: Optional[Atom] = None
    value: Optional[Expr] = None


@dataclass(frozen=True)
class ReducedSystem:
    constraints: tuple[Expr, ...]
    nonzero: tuple[Expr, ...]
    zeroed: tuple[Atom, ...]                  # vanish as functions
    solved: tuple[tuple[Atom, Expr], ...]     # triangular assignments
    certificates: tuple[Certificate, ...]
    derived_zeros: tuple[Atom, ...] = ()      # zeroed minus the assumed
    inconsistent: Optional[str] = None

    def same_content(self, other: "ReducedSystem") -> bool:
        return (
            frozenset(self.constraints) == frozenset(other.constraints)
            and frozenset(self.zeroed) == frozenset(other.zeroed)
            and dict(self.solved) == dict(other.solved)
        )


@dataclass(frozen=True)
class DepthCapExceeded:
    """A branch that still wanted to fork when the depth cap was hit."""

    path: tuple[Assumption, ...]
    pending_pivot: Expr


@dataclass(frozen=True)
class CaseNode:
    assumptions: tuple[Assumption, ...]  # full path from the root
    system: ReducedSystem
    pivot: Optional[Expr] = None         # branched-on quantity, if any
    children: tuple["CaseNode", ...] = ()
    status: str = "leaf"                 # "open" | "closed-inconsistent" | "leaf"
    contradiction: Optional[str] = None
    capped: Optional[DepthCapExceeded] = None

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()


@dataclass(frozen=True)
class CaseTree:
    root: CaseNode
    pivots: tuple[Expr, ...]  # the candidate pool the build ran with

    def leaves(self) -> tuple[CaseNode, ...]:
        return tuple(n for n in self.root.walk() if n.status == "leaf")

    def pivot_set(self) -> tuple[Expr, ...]:
        out: list[Expr] = []
        for n in self.root.walk():
            if n.pivot is not None and n.pivot not in out:
                out.append(n.pivot)
        return tuple(out)

    def capped(self) -> tuple[DepthCapExceeded, ...]:
        return tuple(n.capped for n in self.root.walk() if n.capped is not None)


# ---------------------------------------------------------------------------
# Reduction engine.


class _State:
    def __init__(self, cs: ConstraintSystem):
        self.constraints: list[Expr] = list(cs.constraints)
        self.nonzero: list[Expr] = list(cs.nonzero)
        self.zeros: set[Atom] = set()
        self.solved: dict[Atom, Expr] = {}
        self.log: list[Certificate] = []
        self.args_of: dict[str, tuple[Atom, ...]] = dict(cs.args_of)
        self.inconsistent: Optional[str] = None

    # -- zero substitution, function-level ---------------------------------

    def _is_zeroed(self, x: Atom) -> bool:
        if x in self.zeros:
            return True
        if isinstance(x, ConstitPartial):
            for z in self.zeros:
                if isinstance(z, ConstitSym) and z.name == x.name:
                    return True
                if (
                    isinstance(z, ConstitPartial)
                    and z.name == x.name
                    and mi_dominates(x.slots, z.slots)
                ):
                    return True
        return False

    def _derived_value(self, x: Atom) -> Optional[Expr]:
        """Value of a partial dominating a solved partial of the same
        function, obtained by slot-differentiating the solved value."""
        if not isinstance(x, ConstitPartial):
            return None
        args = self.args_of.get(x.name)
        if args is None:
            return None
        base: Optional[Atom] = None
        base_slots = tuple(0 for _ in args)
        sym = ConstitSym(x.name)
        if sym in self.solved:
            base = sym
        for k in self.solved:
            if (
                isinstance(k, ConstitPartial)
                and k.name == x.name
                and k is not x
                and mi_dominates(x.slots, k.slots)
            ):
                if base is None or mi_total(k.slots) > mi_total(base_slots):
                    base, base_slots = k, k.slots
        if base is None:
            return None
        v = self.solved[base]
        for j, a in enumerate(args):
            for _ in range(x.slots[j] - base_slots[j]):
                v = _arg_derivative(v, a, self.args_of)
        return v

    def subst_known(self, e: Expr) -> Expr:
        for _ in range(12):
            sub: dict[Atom, Expr] = {}
            for x in e.atoms():
                if self._is_zeroed(x):
                    sub[x] = ZERO
                elif x in self.solved:
                    sub[x] = self.solved[x]
                else:
                    dv = self._derived_value(x)
                    if dv is not None:
                        self.solved[x] = dv
                        sub[x] = dv
            if not sub:
                return e
            e = substitute(e, sub)
        return e

    def add_zero(self, a: Atom, constraint: Expr, factor: Expr) -> None:
        self.zeros.add(a)
        self.log.append(Certificate("zero", constraint, factor, atom=a))

    def add_solved(self, a: Atom, v: Expr, constraint: Expr, factor: Expr) -> None:
        if v.is_zero():
            self.add_zero(a, constraint, factor)
            return
        for k in list(self.solved):
            old = self.solved[k]
            if a in set(old.atoms()):
                self.solved[k] = substitute(old, {a: v})
        self.solved[a] = v
        self.log.append(Certificate("solve", constraint, factor, atom=a, value=v))


def _strip_certified(e: Expr, nonzero: Sequence[Expr]) -> Expr:
    for f in nonzero:
        while True:
            d = try_divexact(e, f)
            if d is None or d.is_zero():
                break
            e = d
    return e


def _circular(u: Atom, value: Expr) -> bool:
    """Would assigning ``value`` to ``u`` feed back into itself?  The
    same function may appear through an incomparable partial (that is
    ordinary triangular coupling), but not through ``u`` itself, a
    partial dominating it, or — for a whole-symbol assignment — any
    partial at all."""
    for a in value.atoms():
        if not isinstance(a, (ConstitSym, ConstitPartial)) or a.name != u.name:
            continue
        if isinstance(u, ConstitSym):
            return True
        if isinstance(a, ConstitSym):
            return True
        if mi_dominates(a.slots, u.slots):
            return True
    return False


def _constit_atoms(e: Expr) -> list[Atom]:
    return sorted(
        (a for a in set(e.atoms()) if isinstance(a, (ConstitSym, ConstitPartial))),
        key=lambda a: a.key,
    )


def _refresh(st: _State) -> bool:
    """Re-substitute, renormalize, deduplicate; detect contradictions."""
    out: list[Expr] = []
    changed = False
    for c in st.constraints:
        r = st.subst_known(c)
        n, logs = normalize_constraint(r, st.nonzero)
        for lg in logs:
            st.log.append(Certificate("cancel", c, lg.factor))
        if n.is_zero():
            changed = changed or not c.is_zero()
            continue
        if not _constit_atoms(n):
            st.inconsistent = (
                "constraint reduces to a nonvanishing function-free expression"
            )
            return False
        if n != c:
            changed = True
        if n not in out:
            out.append(n)
        else:
            changed = True
    if len(out) != len(st.constraints):
        changed = True
    st.constraints = out
    for nz in st.nonzero:
        if st.subst_known(nz).is_zero():
            st.inconsistent = "a nonzero side condition vanishes identically"
            return False
    return changed


def _zero_rule(st: _State) -> bool:
    """A single-monomial constraint kills its one uncertified function
    factor (jet-coordinate factors may ride along: the identity holds
    for all values of the coordinates)."""
    changed = False
    for c in list(st.constraints):
        mono = _single_monomial(c)
        if mono is None:
            continue
        uncert = [
            a
            for a, _k in mono
            if isinstance(a, (ConstitSym, ConstitPartial))
            and not _certified_nonzero(Expr.atom(a), st.nonzero)
        ]
        if len(uncert) == 1:
            cofactor = c / Expr.atom(uncert[0])
            st.add_zero(uncert[0], c, cofactor.numerator_expr())
            st.constraints.remove(c)
            changed = True
    return changed


@dataclass(frozen=True)
class _Blocked:
    constraint: Expr
    candidate: Expr  # normalized; single atom or a multi-term combination


def _blocked_candidate(residue: Expr) -> Optional[Expr]:
    if len(residue.numerator_expr().num) > 1:
        n, _ = normalize_constraint(residue, ())
        return n
    mono = _single_monomial(residue)
    if mono is None:
        return None
    for a, _k in mono:
        if isinstance(a, (ConstitSym, ConstitPartial)):
            return Expr.atom(a)
    return None


def _eliminate(st: _State) -> tuple[bool, list[_Blocked]]:
    """Solve constraints for linearly occurring atoms whose coefficient is
    certified nonzero and not a bare rational.  Collect, for blocked
    divisions, the uncancelled part of the coefficient."""
    blocked: list[_Blocked] = []
    for c in list(st.constraints):
        for u in _constit_atoms(c):
            coeffs = collect_coefficients(c, [u])
            mono_u = ((u, 1),)
            if set(coeffs) - {(), mono_u} or mono_u not in coeffs:
                continue
            coeff = coeffs[mono_u]
            residue = _strip_certified(coeff, st.nonzero)
            if residue.is_rational():
                if coeff.is_rational():
                    continue  # no genuine pivot backs this division
                value = st.subst_known(-coeffs.get((), ZERO) / coeff)
                if _circular(u, value):
                    continue  # not triangular: value feeds back into u
                st.add_solved(u, value, c, coeff)
                st.constraints.remove(c)
                return True, blocked
            cand = _blocked_candidate(residue)
            if cand is not None:
                blocked.append(_Blocked(c, cand))
    return False, blocked


def _compat(st: _State) -> bool:
    """Cross-argument agreement of solved single-slot partials."""
    by_name: dict[str, list[ConstitPartial]] = {}
    values: dict[ConstitPartial, Expr] = {}
    for k, v in st.solved.items():
        if isinstance(k, ConstitPartial) and mi_total(k.slots) == 1:
            by_name.setdefault(k.name, []).append(k)
            values[k] = v
    for k in st.zeros:
        # a vanishing single-slot partial still constrains its siblings
        if isinstance(k, ConstitPartial) and mi_total(k.slots) == 1:
            by_name.setdefault(k.name, []).append(k)
            values[k] = ZERO
    changed = False
    for name, parts in by_name.items():
        args = st.args_of.get(name)
        if args is None or len(parts) < 2:
            continue
        parts = sorted(parts, key=lambda a: a.key)
        for i in range(len(parts)):
            for j in range(i + 1, len(parts)):
                pi, pj = parts[i], parts[j]
                ai = args[pi.slots.index(1)]
                aj = args[pj.slots.index(1)]
                k = _arg_derivative(values[pi], aj, st.args_of) - _arg_derivative(
                    values[pj], ai, st.args_of
                )
                k = st.subst_known(k)
                n, _ = normalize_constraint(k, st.nonzero)
                if n.is_zero() or n in st.constraints:
                    continue
                if not _constit_atoms(n):
                    st.inconsistent = (
                        "incompatible mixed partials of a solved function"
                    )
                    return False
                st.constraints.append(n)
                st.log.append(Certificate("compat", n, Expr.rational(1), atom=pi))
                changed = True
    return changed


def _reduce(st: _State) -> list[_Blocked]:
    blocked: list[_Blocked] = []
    for _ in range(_MAX_ROUNDS):
        changed = _refresh(st)
        if st.inconsistent:
            return []
        if _zero_rule(st):
            changed = True
        fired, blocked = _eliminate(st)
        if fired:
            changed = True
        if not changed and not _compat(st):
            break
        if st.inconsistent:
            return []
    return blocked


# ---------------------------------------------------------------------------
# Candidate pivots.


def _repeated_pairs(
    constraints: Sequence[Expr],
    nonzero: Sequence[Expr],
) -> list[tuple[ConstitPartial, ConstitPartial]]:
    """Coefficient-atom pairs that recur across two-monomial constraints.

    A constraint ``A*X - B*Y`` pins the ratio of the unknowns to B/A;
    when the same (A, B) shows up in several constraints the pattern is a
    shared proportionality, worth interrogating per argument."""
    counts: dict[tuple[Atom, Atom], int] = {}
    for c in constraints:
        p = c.numerator_expr()
        if len(p.num) != 2:
            continue
        m1, m2 = p.num.keys()

        def partials(mono):
            return [a for a, _k in mono if isinstance(a, ConstitPartial)]

        seen: set[tuple[Atom, Atom]] = set()
        for a in partials(m1):
            for b in partials(m2):
                if a.name == b.name:
                    continue
                key = (a, b) if a.key < b.key else (b, a)
                seen.add(key)
        for key in seen:
            counts[key] = counts.get(key, 0) + 1
    return [pair for pair, n in counts.items() if n >= 2]


def _pair_wronskians(
    pair: tuple[ConstitPartial, ConstitPartial],
    nonzero: Sequence[Expr],
    args_of: Mapping[str, tuple[Atom, ...]],
) -> list[Expr]:
    a, b = pair
    ea, eb = Expr.atom(a), Expr.atom(b)
    out: list[Expr] = []
    for arg in args_of.get(a.name, ()):
        if arg not in args_of.get(b.name, ()):
            continue
        w = ea * _arg_derivative(eb, arg, args_of) - eb * _arg_derivative(
            ea, arg, args_of
        )
        n, _ = normalize_constraint(w, nonzero)
        if not n.is_zero() and not n.is_rational() and n not in out:
            out.append(n)
    return out


def pivot_candidates(cs: ConstraintSystem) -> tuple[Expr, ...]:
    """Ranked branching candidates for a constraint system.

    Function-partial atoms occurring in the constraints come first,
    ranked by how many constraints contain them; then slot Wronskians of
    repeated coefficient pairs; then the recorded cancellation factors
    and denominator pivots (already certified, so they never actually
    fork, but they document where divisions happened)."""
    occurrence: dict[Atom, int] = {}
    for c in cs.constraints:
        for a in set(c.atoms()):
            if isinstance(a, ConstitPartial):
                occurrence[a] = occurrence.get(a, 0) + 1
    ranked = sorted(occurrence, key=lambda a: (-occurrence[a], a.key))
    out: list[Expr] = [Expr.atom(a) for a in ranked]
    args_of = dict(cs.args_of)
    for pair in _repeated_pairs(cs.constraints, cs.nonzero):
        for w in _pair_wronskians(pair, cs.nonzero, args_of):
            if w not in out:
                out.append(w)
    for extra in list(cs.nonzero) + [f.factor for f in cs.cancellations]:
        n, _ = normalize_constraint(extra, ())
        if not n.is_zero() and not n.is_rational() and n not in out:
            out.append(n)
    return tuple(out)


def force_residual(cs: ConstraintSystem) -> ConstraintSystem:
    """Degenerate-production variant: the residual is demanded to vanish
    identically and joins the constraints.

    The residual is a sign-definite quantity, so its identical vanishing
    is only informative away from the locus where the repeated
    coefficient pair of the system degenerates; those pair atoms are
    asserted nonzero alongside."""
    nonzero = list(cs.nonzero)
    for pair in _repeated_pairs(cs.constraints, cs.nonzero):
        for a in pair:
            e = Expr.atom(a)
            if e not in nonzero:
                nonzero.append(e)
    constraints = list(cs.constraints)
    n, _ = normalize_constraint(cs.residual_numerator, nonzero)
    if not n.is_zero() and n not in constraints:
        constraints.append(n)
    return replace(
        cs,
        constraints=tuple(constraints),
        residual_numerator=ZERO,
        nonzero=tuple(nonzero),
    )


# ---------------------------------------------------------------------------
# Public reduction and tree construction.


def _make_state(cs: ConstraintSystem, assumptions: Sequence[Assumption]) -> _State:
    st = _State(cs)
    for a in assumptions:
        if a.polarity == "nonzero":
            for f in _nonzero_factors(a.expr):
                if f not in st.nonzero:
                    st.nonzero.append(f)
        else:
            atoms = _constit_atoms(a.expr)
            mono = _single_monomial(a.expr)
            if mono is not None and len(atoms) == 1 and len(mono) == 1:
                st.zeros.add(atoms[0])
            else:
                n, _ = normalize_constraint(a.expr, ())
                if not n.is_zero():
                    st.constraints.append(n)
    return st


def _finish(st: _State, assumptions: Sequence[Assumption]) -> ReducedSystem:
    assumed: set[Atom] = set()
    for a in assumptions:
        if a.polarity == "zero":
            atoms = _constit_atoms(a.expr)
            if len(atoms) == 1:
                assumed.add(atoms[0])
    zeroed = tuple(sorted(st.zeros, key=lambda x: x.key))
    return ReducedSystem(
        constraints=tuple(st.constraints),
        nonzero=tuple(st.nonzero),
        zeroed=zeroed,
        solved=tuple(sorted(st.solved.items(), key=lambda kv: kv[0].key)),
        certificates=tuple(st.log),
        derived_zeros=tuple(a for a in zeroed if a not in assumed),
        inconsistent=st.inconsistent,
    )


def apply_assumptions(
    cs: ConstraintSystem, assumptions: Iterable[Assumption]
) -> ReducedSystem:
    """Reduce the system under the given hypotheses.

    Returns the triangularized remainder; an unsatisfiable combination
    is reported through ``inconsistent`` rather than raised, so a tree
    build can close the branch and move on."""
    assumptions = tuple(assumptions)
    st = _make_state(cs, assumptions)
    _reduce(st)
    return _finish(st, assumptions)


def _assumed_exprs(assumptions: Sequence[Assumption]) -> set[Expr]:
    return {a.expr for a in assumptions}


def _order_blocked(blocked: Sequence[_Blocked]) -> list[Expr]:
    count: dict[Expr, int] = {}
    first: dict[Expr, int] = {}
    seen: set[tuple[Expr, Expr]] = set()
    for b in blocked:
        if (b.constraint, b.candidate) in seen:
            continue
        seen.add((b.constraint, b.candidate))
        count[b.candidate] = count.get(b.candidate, 0) + 1
        first.setdefault(b.candidate, len(first))

    def key(e: Expr):
        multi = len(e.numerator_expr().num) > 1
        return (-count[e], 0 if multi else 1, first[e])

    return sorted(count, key=key)


def _relevant_static(w: Expr, st: _State) -> bool:
    v = st.subst_known(w)
    if v.is_zero() or _certified_nonzero(v, st.nonzero):
        return False
    names = {a.name for a in w.atoms() if isinstance(a, (ConstitSym, ConstitPartial))}
    present: set[str] = set()
    for c in st.constraints:
        present.update(
            a.name for a in c.atoms() if isinstance(a, (ConstitSym, ConstitPartial))
        )
    return names <= present


def build_tree(
    cs: ConstraintSystem,
    pivots: Optional[Sequence[Expr]] = None,
    depth: int = 3,
    assumptions: Sequence[Assumption] = (),
) -> CaseTree:
    """Binary case analysis over undetermined pivots, to a depth cap.

    ``pivots`` is the admissible candidate pool (default:
    :func:`pivot_candidates`); a branch only ever forks on a member of
    it, so an empty pool yields the single reduced leaf.  Each node
    reduces, asks the reducer what division it is blocked on, and forks
    on the first admissible answer — falling back to a still-relevant
    composite candidate when no division is blocked.  A fork whose two
    children reduce to the same system is skipped as vacuous."""
    if depth < 1:
        raise ValueError("depth cap must be at least 1")
    pool = tuple(pivot_candidates(cs) if pivots is None else pivots)
    statics = [p for p in pool if len(p.numerator_expr().num) > 1]

    def node(path: tuple[Assumption, ...]) -> CaseNode:
        st = _make_state(cs, path)
        blocked = _reduce(st)
        system = _finish(st, path)
        if system.inconsistent:
            return CaseNode(
                assumptions=path,
                system=system,
                status="closed-inconsistent",
                contradiction=system.inconsistent,
            )
        assumed = _assumed_exprs(path)
        candidates = [
            e for e in _order_blocked(blocked) if e in pool and e not in assumed
        ]
        for w in statics:
            if w not in assumed and w not in candidates and _relevant_static(w, st):
                candidates.append(w)
        for cand in candidates:
            if len(path) >= depth:
                return CaseNode(
                    assumptions=path,
                    system=system,
                    status="open",
                    capped=DepthCapExceeded(path=path, pending_pivot=cand),
                )
            hi = node(path + (Assumption.nonzero(cand),))
            lo = node(path + (Assumption.zero(cand),))
            if hi.system.same_content(lo.system):
                continue  # the fork changes nothing; vacuous pivot
            return CaseNode(
                assumptions=path,
                system=system,
                pivot=cand,
                children=(hi, lo),
                status="open",
            )
        return CaseNode(assumptions=path, system=system, status="leaf")

    return CaseTree(root=node(tuple(assumptions)), pivots=pool)
