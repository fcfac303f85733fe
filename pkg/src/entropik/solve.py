"""Solved form of a model on its solution manifold.

``solve_leading`` rewrites the chain-expanded equations as an explicit
substitution map for the chosen leading derivatives, using fraction-free
(Bareiss-style) Gaussian elimination over the polynomial ring to control
expression swell; divisions happen only at the very end and every
nonconstant divisor is recorded as a pivot.

``close_consequences`` extends the map with the differential consequences
a target expression needs: whenever substitution leaves a jet variable
that dominates a leading derivative, the already-solved equation for that
leading derivative is differentiated in the missing direction and solved
for the new key (coefficient one, no new pivots).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Optional

from ._ratio import Q
from .atoms import JetVar, mi_total
from .errors import (
    NonlinearInLeading,
    OrderCapExceeded,
    SingularConsequence,
    SingularSystem,
)
from .expr import (
    Expr,
    ONE,
    SubstitutionMap,
    collect_coefficients,
    mono_key,
    poly_divexact,
    substitute,
    total_derivative,
)
from .model import ModelDef, expand_model

__all__ = [
    "SolvedSystem",
    "ConsequenceStep",
    "VerifyEntry",
    "VerifyReport",
    "solve_leading",
    "close_consequences",
    "verify_solved",
    "pivot_factors",
    "expr_sort_key",
]


def expr_sort_key(e: Expr):
    """Deterministic sort key for canonical expressions."""
    return (
        tuple(sorted((mono_key(m), c) for m, c in e.num.items())),
        tuple(sorted((mono_key(m), c) for m, c in e.den.items())),
    )


def pivot_factors(e: Expr) -> list[Expr]:
    """Split a divisor into its recorded nonzero factors.

    The monomial content contributes one factor per atom (exponents do not
    matter for a nonvanishing condition); a nonconstant primitive part is
    kept whole.  Rational constants are dropped.
    """
    from .expr import _poly_content  # internal, stable

    p = e.num
    if not p:
        return []
    out: list[Expr] = []
    content = _poly_content(p)
    for a in sorted(content, key=lambda a: a.key):
        out.append(Expr.atom(a))
    stripped = {_strip(m, content): c for m, c in p.items()}
    if set(stripped) != {()}:
        lead = stripped[max(stripped, key=mono_key)]
        prim = Expr({m: c / lead for m, c in stripped.items()}, {(): Q(1)})
        out.append(prim)
    return out


def _strip(m, content):
    return tuple((a, k - content.get(a, 0)) for a, k in m if k - content.get(a, 0))


@dataclass(frozen=True)
class ConsequenceStep:
    """One closure step: ``key`` was produced by differentiating the solved
    equation for ``source`` (an equation label for a leading derivative, or
    a previously added key) along ``direction``."""

    key: JetVar
    source: str
    direction: str
    equation: Expr  # the differentiated equation, pre-substitution (= 0)


@dataclass(frozen=True)
class SolvedSystem:
    substitution: SubstitutionMap
    pivots: tuple[Expr, ...]
    consequence_log: tuple[ConsequenceStep, ...] = ()
    determinant: Expr = ONE

    def keys(self) -> tuple[JetVar, ...]:
        return tuple(self.substitution.pairs)

    def is_triangular(self, m: ModelDef) -> bool:
        pairs = self.substitution.pairs
        for rhs in pairs.values():
            for a in rhs.atoms():
                if a in pairs or m.is_consequence(a):
                    return False
        return True


def _divexact(a: Expr, b: Expr) -> Expr:
    return Expr(poly_divexact(a.num, b.num), {(): Q(1)})


def solve_leading(m: ModelDef) -> SolvedSystem:
    """Exact linear solve of the expanded equations for the leading
    derivatives; raises NonlinearInLeading / SingularSystem."""
    eqs, _ = expand_model(m)
    leading = list(m.leading)
    lead_set = set(leading)
    n = len(leading)
    pivot_exprs: list[Expr] = []

    # Row i: sum_j A[i][j] * leading_j + b[i] = 0, over cleared numerators.
    matrix: list[list[Expr]] = []
    for label, lhs in eqs:
        if not lhs.is_polynomial():
            # Clearing the denominator preserves the equation where the
            # denominator does not vanish; record it.
            pivot_exprs.extend(pivot_factors(lhs.denominator_expr()))
        coeffs = collect_coefficients(lhs.numerator_expr(), lead_set)
        row = [Expr.rational(0)] * (n + 1)
        for mono, coeff in coeffs.items():
            if not mono:
                row[n] = row[n] - coeff
                continue
            if len(mono) > 1 or mono[0][1] > 1:
                raise NonlinearInLeading(
                    f"equation {label} is not linear in the leading derivatives"
                )
            atom = mono[0][0]
            row[leading.index(atom)] = coeff
        matrix.append(row)

    # Bareiss fraction-free elimination.
    prev = ONE
    diag: list[Expr] = []
    for k in range(n):
        pivot_row = None
        for r in range(k, len(matrix)):
            if not matrix[r][k].is_zero():
                pivot_row = r
                break
        if pivot_row is None:
            raise SingularSystem(
                "equations are structurally rank-deficient in the leading "
                f"derivatives (no pivot for {m.leading[k]})"
            )
        if pivot_row != k:
            matrix[k], matrix[pivot_row] = matrix[pivot_row], matrix[k]
        pk = matrix[k][k]
        diag.append(pk)
        for i in range(k + 1, len(matrix)):
            for j in range(k + 1, n + 1):
                num = pk * matrix[i][j] - matrix[i][k] * matrix[k][j]
                matrix[i][j] = _divexact(num, prev) if prev != ONE else num
            matrix[i][k] = Expr.rational(0)
        prev = pk

    # Back substitution (the only true divisions).
    solution: dict[JetVar, Expr] = {}
    for i in range(n - 1, -1, -1):
        acc = matrix[i][n]
        for j in range(i + 1, n):
            acc = acc - matrix[i][j] * solution[leading[j]]
        solution[leading[i]] = acc / matrix[i][i]
    solution = {ld: solution[ld] for ld in leading}

    for d in diag:
        pivot_exprs.extend(pivot_factors(d))
    pivots = _dedup_exprs(pivot_exprs)

    triangular = not any(
        any(a in solution or m.is_consequence(a) for a in rhs.atoms())
        for rhs in solution.values()
    )
    return SolvedSystem(
        substitution=SubstitutionMap(solution, triangular=triangular),
        pivots=pivots,
        determinant=diag[-1] if diag else ONE,
    )


def _dedup_exprs(exprs: Iterable[Expr]) -> tuple[Expr, ...]:
    seen = []
    for e in exprs:
        if e.is_rational():
            continue
        if e not in seen:
            seen.append(e)
    return tuple(sorted(seen, key=expr_sort_key))


def close_consequences(
    m: ModelDef, s: SolvedSystem, target: Expr
) -> SolvedSystem:
    """Fixed-point closure of ``s`` with respect to ``target``.

    Adds keys for every jet variable dominated by a leading derivative
    that substitution leaves behind in the target or in any right-hand
    side, then reduces all right-hand sides to a triangular form.
    """
    ctx = m.diff_ctx()
    pairs: dict[JetVar, Expr] = dict(s.substitution.pairs)
    log: list[ConsequenceStep] = list(s.consequence_log)
    # Source equation label for each key (leading keys come from their
    # equation by position).
    source: dict[JetVar, str] = {}
    for ld, eq in zip(m.leading, m.equations):
        source[ld] = eq.label
    for step in log:
        source[step.key] = step.source

    def dominated_leading(a: JetVar) -> Optional[JetVar]:
        best = None
        for ld in m.leading:
            if ld.field == a.field and all(
                x >= y for x, y in zip(a.orders, ld.orders)
            ):
                if best is None or mi_total(ld.orders) > mi_total(best.orders):
                    best = ld
        return best

    def ensure(a: JetVar) -> None:
        if a in pairs:
            return
        if mi_total(a.orders) > m.max_order:
            raise OrderCapExceeded(
                f"consequence closure needs derivative order {mi_total(a.orders)} "
                f"(> max_order {m.max_order})"
            )
        ld = dominated_leading(a)
        if ld is None:
            raise SingularConsequence(f"no leading derivative dominates {a}")
        # Step back one direction towards the dominated leading derivative.
        d = next(
            i for i in range(len(a.orders)) if a.orders[i] > ld.orders[i]
        )
        pred = JetVar(a.field, tuple(
            o - 1 if i == d else o for i, o in enumerate(a.orders)
        ))
        ensure(pred)
        iv = m.indep[d]
        rhs = total_derivative(pairs[pred], iv, ctx)
        pairs[a] = rhs
        src = source.get(pred)
        label = src if src is not None else str(pred)
        source[a] = label
        cons_eq = Expr.atom(a) - rhs  # holds on solutions by construction
        log.append(
            ConsequenceStep(key=a, source=label, direction=iv.name, equation=cons_eq)
        )

    # Fixed point: collect missing consequence atoms, add keys, repeat.
    while True:
        missing: set[JetVar] = set()
        scan = [target] + list(pairs.values())
        for e in scan:
            for a in e.atoms():
                if (
                    isinstance(a, JetVar)
                    and a not in pairs
                    and m.is_consequence(a)
                ):
                    missing.add(a)
        if not missing:
            break
        for a in sorted(missing, key=lambda j: j.key):
            ensure(a)

    # Reduce right-hand sides until no key remains in any of them.
    for _ in range(len(pairs) + 2):
        dirty = False
        for k in list(pairs):
            rhs = pairs[k]
            if any(a in pairs for a in rhs.atoms()):
                pairs[k] = substitute(rhs, pairs)
                dirty = True
        if not dirty:
            break
    else:
        raise SingularConsequence(
            "consequence substitution did not reach a fixed point"
        )

    sub = SubstitutionMap(pairs, triangular=True)
    sub.validate()
    return replace(
        s, substitution=sub, consequence_log=tuple(log)
    )


@dataclass(frozen=True)
class VerifyEntry:
    name: str
    residue: Expr

    @property
    def ok(self) -> bool:
        return self.residue.is_zero()


@dataclass(frozen=True)
class VerifyReport:
    entries: tuple[VerifyEntry, ...]

    @property
    def all_zero(self) -> bool:
        return all(e.ok for e in self.entries)

    def failures(self) -> tuple[VerifyEntry, ...]:
        return tuple(e for e in self.entries if not e.ok)


def verify_solved(m: ModelDef, s: SolvedSystem) -> VerifyReport:
    """Back-substitution check: every original expanded equation and every
    generated consequence equation must reduce to zero under ``s``."""
    entries: list[VerifyEntry] = []
    for eq in m.equations:
        entries.append(
            VerifyEntry(eq.label, substitute(eq.lhs, s.substitution))
        )
    for step in s.consequence_log:
        name = f"d{step.direction}({step.source})->{step.key.field}{step.key.orders}"
        entries.append(
            VerifyEntry(name, substitute(step.equation, s.substitution))
        )
    return VerifyReport(tuple(entries))
