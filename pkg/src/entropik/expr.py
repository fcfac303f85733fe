"""Canonical exact rational-function expressions over jet-space atoms.

An :class:`Expr` is a pair of sparse multivariate polynomials
(numerator, denominator) with exact rational coefficients over interned
:class:`~entropik.atoms.Atom` symbols.  Canonical form:

* monomials carry atoms sorted by the global atom order;
* a zero numerator forces denominator 1;
* the denominator's leading coefficient (w.r.t. the monomial order) is 1;
* monomial content common to numerator and denominator is cancelled.

Two Exprs are equal iff their canonical forms are identical; no semantic
equality beyond field arithmetic is claimed (no full multivariate GCD).
All values are immutable after construction and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Union

from ._ratio import Q
from .atoms import Atom, ConstitPartial, ConstitSym, IndepVar, JetVar, mi_add, mi_unit
from .backend import p_add, p_diff, p_mul, p_neg, p_pow, p_scale, p_sub
from .errors import (
    DenominatorVanishes,
    DivisionByZeroExpr,
    MissingAssignment,
    NotPolynomialInVars,
    UnknownConstitSym,
)

__all__ = [
    "Expr",
    "ZERO",
    "ONE",
    "normalize",
    "atom_expr",
    "DiffContext",
    "SubstitutionMap",
    "partial_diff",
    "total_derivative",
    "substitute",
    "collect_coefficients",
    "monomial_expr",
    "monomial_atoms",
    "eval_numeric",
    "eval_poly",
    "mono_key",
    "poly_divexact",
]

Monomial = tuple  # tuple[(Atom, int), ...]
Poly = dict  # dict[Monomial, Q]

_ONE_POLY = None  # initialized below


def mono_key(m: Monomial):
    """Deterministic monomial sort key (graded, then atom-order lex)."""
    return (sum(e for _, e in m), tuple((a.key, e) for a, e in m))


def _poly_content(p: Poly) -> dict:
    """Per-atom minimum exponent over all monomials ({} if unit occurs)."""
    it = iter(p)
    first = next(it)
    content = {a: e for a, e in first}
    for m in it:
        if not content:
            break
        here = dict(m)
        for a in list(content):
            e = here.get(a, 0)
            if e == 0:
                del content[a]
            elif e < content[a]:
                content[a] = e
    return content


def _mono_strip(m: Monomial, content: dict) -> Monomial:
    out = []
    for a, e in m:
        r = e - content.get(a, 0)
        if r:
            out.append((a, r))
    return tuple(out)


class Expr:
    """Immutable canonical rational function."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Poly, den: Poly, _canonical: bool = False):
        if not _canonical:
            num, den = _canonicalize(num, den)
        self.num = num
        self.den = den
        self._hash = None

    # -- constructors -----------------------------------------------------

    @staticmethod
    def rational(q) -> "Expr":
        q = Q(q)
        num = {(): q} if q else {}
        return Expr(num, dict(_ONE_POLY), _canonical=True)

    @staticmethod
    def atom(a: Atom) -> "Expr":
        e = _ATOM_CACHE.get(a)
        if e is None:
            e = Expr({((a, 1),): Q(1)}, dict(_ONE_POLY), _canonical=True)
            _ATOM_CACHE[a] = e
        return e

    # -- predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def is_rational(self) -> bool:
        return self.den == _ONE_POLY and (
            not self.num or set(self.num) == {()}
        )

    def as_rational(self) -> Q:
        if not self.is_rational():
            raise ValueError(f"not a rational constant: {self}")
        return self.num.get((), Q(0))

    def is_polynomial(self) -> bool:
        return self.den == _ONE_POLY

    def atoms(self) -> Iterator[Atom]:
        seen = set()
        for p in (self.num, self.den):
            for m in p:
                for a, _ in m:
                    if a not in seen:
                        seen.add(a)
                        yield a

    def numerator_expr(self) -> "Expr":
        return Expr(dict(self.num), dict(_ONE_POLY), _canonical=True)

    def denominator_expr(self) -> "Expr":
        return Expr(dict(self.den), dict(_ONE_POLY), _canonical=True)

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other) -> "Expr":
        other = as_expr(other)
        if self.den == other.den:
            return Expr(p_add(self.num, other.num), dict(self.den))
        return Expr(
            p_add(p_mul(self.num, other.den), p_mul(other.num, self.den)),
            p_mul(self.den, other.den),
        )

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr(p_neg(self.num), dict(self.den), _canonical=True)

    def __sub__(self, other) -> "Expr":
        return self + (-as_expr(other))

    def __rsub__(self, other) -> "Expr":
        return as_expr(other) + (-self)

    def __mul__(self, other) -> "Expr":
        other = as_expr(other)
        return Expr(p_mul(self.num, other.num), p_mul(self.den, other.den))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Expr":
        other = as_expr(other)
        return Expr(p_mul(self.num, other.den), p_mul(self.den, other.num))

    def __rtruediv__(self, other) -> "Expr":
        return as_expr(other) / self

    def __pow__(self, n: int) -> "Expr":
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n == 0:
            return ONE
        if n < 0:
            return Expr(p_pow(self.den, -n), p_pow(self.num, -n))
        return Expr(p_pow(self.num, n), p_pow(self.den, n))

    # -- identity ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Expr):
            if isinstance(other, (int, Q)):
                return self.is_rational() and self.as_rational() == other
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(
                (
                    frozenset(self.num.items()),
                    frozenset(self.den.items()),
                )
            )
            self._hash = h
        return h

    def __str__(self) -> str:
        from .render import expr_str

        return expr_str(self)

    def __repr__(self) -> str:  # pragma: no cover - debug aid
        return f"Expr({self})"

    def __bool__(self) -> bool:
        return not self.is_zero()


def _canonicalize(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    if not den:
        raise DivisionByZeroExpr("denominator is the zero polynomial")
    if not num:
        return {}, dict(_ONE_POLY)
    # Cancel shared monomial content.
    if den != _ONE_POLY:
        cn = _poly_content(num)
        if cn:
            cd = _poly_content(den)
            common = {}
            for a, e in cn.items():
                d = cd.get(a, 0)
                if d:
                    common[a] = min(e, d)
            if common:
                num = {_mono_strip(m, common): c for m, c in num.items()}
                den = {_mono_strip(m, common): c for m, c in den.items()}
    # Scale: leading denominator coefficient becomes 1.
    lc = den[max(den, key=mono_key)]
    if lc != 1:
        inv = 1 / lc
        num = p_scale(num, inv)
        den = p_scale(den, inv)
    return num, den


ZERO = None  # set below
ONE = None
_ATOM_CACHE: dict[Atom, Expr] = {}


def _init_constants():
    global _ONE_POLY, ZERO, ONE
    _ONE_POLY = {(): Q(1)}
    ZERO = Expr({}, dict(_ONE_POLY), _canonical=True)
    ONE = Expr(dict(_ONE_POLY), dict(_ONE_POLY), _canonical=True)


_init_constants()


ExprLike = Union["Expr", Atom, int, Q]


def as_expr(x: ExprLike) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, Atom):
        return Expr.atom(x)
    if isinstance(x, (int, Q)):
        return Expr.rational(x)
    raise TypeError(f"cannot coerce {x!r} to Expr")


def normalize(x: ExprLike) -> Expr:
    """Coerce/renormalize; idempotent on Exprs (they are born canonical)."""
    return as_expr(x)


def atom_expr(a: Atom) -> Expr:
    return Expr.atom(a)


# ---------------------------------------------------------------------------
# Differentiation.

def partial_diff(e: Expr, a: Atom) -> Expr:
    """Formal quotient-rule derivative in a single atom.

    All other atoms -- including ConstitPartial symbols -- are treated as
    constants; chain-rule expansion is total_derivative's job.
    """
    dn = p_diff(e.num, a)
    if e.den == _ONE_POLY:
        return Expr(dn, dict(_ONE_POLY))
    dd = p_diff(e.den, a)
    if not dd:
        return Expr(dn, dict(e.den))
    num = p_sub(p_mul(dn, e.den), p_mul(e.num, dd))
    return Expr(num, p_mul(e.den, e.den))


@dataclass(frozen=True)
class DiffContext:
    """Declarations a total derivative needs: the ordered independent
    variables and each constitutive symbol's ordered argument atoms."""

    indep: tuple[IndepVar, ...]
    args: Mapping[str, tuple[Atom, ...]] = field(default_factory=dict)

    def arg_atoms(self, name: str) -> tuple[Atom, ...]:
        try:
            return self.args[name]
        except KeyError:
            raise UnknownConstitSym(
                f"constitutive symbol '{name}' has no declaration"
            ) from None


def atom_total_derivative(a: Atom, iv_index: int, ctx: DiffContext) -> Expr:
    """D_iv applied to a single atom."""
    n = len(ctx.indep)
    if isinstance(a, IndepVar):
        return ONE if a is ctx.indep[iv_index] else ZERO
    if isinstance(a, JetVar):
        return Expr.atom(JetVar(a.field, mi_add(a.orders, mi_unit(n, iv_index))))
    if isinstance(a, ConstitSym):
        args = ctx.arg_atoms(a.name)
        total = ZERO
        for j, arg in enumerate(args):
            d_arg = atom_total_derivative(arg, iv_index, ctx)
            if d_arg.is_zero():
                continue
            cp = ConstitPartial(a.name, mi_unit(len(args), j))
            total = total + Expr.atom(cp) * d_arg
        return total
    if isinstance(a, ConstitPartial):
        args = ctx.arg_atoms(a.name)
        total = ZERO
        for j, arg in enumerate(args):
            d_arg = atom_total_derivative(arg, iv_index, ctx)
            if d_arg.is_zero():
                continue
            cp = ConstitPartial(a.name, mi_add(a.slots, mi_unit(len(args), j)))
            total = total + Expr.atom(cp) * d_arg
        return total
    raise TypeError(f"unknown atom kind: {a!r}")


def total_derivative(e: ExprLike, iv: IndepVar, ctx: DiffContext) -> Expr:
    """Total derivative along independent variable ``iv``.

    Jet variables prolong (multi-index bumped); constitutive symbols and
    their partials chain-expand over their declared arguments; Leibniz and
    quotient rules come from the underlying partial derivatives.
    """
    e = as_expr(e)
    try:
        iv_index = ctx.indep.index(iv)
    except ValueError:
        raise ValueError(f"{iv} is not an independent variable of the context")
    total = ZERO
    for a in e.atoms():
        da = atom_total_derivative(a, iv_index, ctx)
        if da.is_zero():
            continue
        total = total + partial_diff(e, a) * da
    return total


# ---------------------------------------------------------------------------
# Substitution.

@dataclass(frozen=True)
class SubstitutionMap:
    """Finite map Atom -> Expr.

    ``triangular`` asserts that no right-hand side contains any key atom,
    which makes one-pass substitution idempotent.  ``validate`` checks the
    flag by scanning.
    """

    pairs: Mapping[Atom, Expr]
    triangular: bool = True

    def validate(self) -> None:
        if not self.triangular:
            return
        keys = set(self.pairs)
        for k, rhs in self.pairs.items():
            bad = keys.intersection(rhs.atoms())
            if bad:
                raise ValueError(
                    f"map marked triangular but RHS of {k} contains {sorted(bad)[0]}"
                )

    def items(self):
        return self.pairs.items()

    def __len__(self):
        return len(self.pairs)

    def __contains__(self, a):
        return a in self.pairs


def eval_poly(
    p: Poly,
    lookup: Callable[[Atom], Expr],
) -> Expr:
    """Evaluate a polynomial with atoms mapped through ``lookup``."""
    total = ZERO
    powers: dict[tuple[Atom, int], Expr] = {}
    for m, c in p.items():
        term = Expr.rational(c)
        for a, e in m:
            key = (a, e)
            pw = powers.get(key)
            if pw is None:
                pw = lookup(a) ** e
                powers[key] = pw
            term = term * pw
        total = total + term
    return total


def substitute(
    e: ExprLike,
    m: Union[SubstitutionMap, Mapping[Atom, Expr]],
    simultaneous: bool = False,
) -> Expr:
    """Replace every key atom by its image, in one simultaneous pass.

    For triangular maps the result contains no key atom and the operation
    is idempotent.  ``simultaneous=True`` merely documents intent for
    non-triangular maps; the pass is always simultaneous.
    """
    e = as_expr(e)
    pairs = m.pairs if isinstance(m, SubstitutionMap) else m
    if not pairs:
        return e
    present = any(a in pairs for a in e.atoms())
    if not present:
        return e

    def lookup(a: Atom) -> Expr:
        r = pairs.get(a)
        return Expr.atom(a) if r is None else as_expr(r)

    num = eval_poly(e.num, lookup)
    den = eval_poly(e.den, lookup)
    return num / den


# ---------------------------------------------------------------------------
# Coefficient collection.

def monomial_expr(m: Monomial) -> Expr:
    e = ONE
    for a, k in m:
        e = e * Expr.atom(a) ** k
    return e


def monomial_atoms(m: Monomial) -> tuple[Atom, ...]:
    return tuple(a for a, _ in m)


def collect_coefficients(e: ExprLike, vars: Iterable[Atom]) -> dict[Monomial, Expr]:
    """Exact decomposition of the numerator over monomials in ``vars``.

    numerator(e) == sum(monomial * coefficient); coefficients are
    polynomial Exprs free of ``vars``; the unit monomial keys the constant
    part.  Raises NotPolynomialInVars if the denominator contains one of
    the variables.
    """
    e = as_expr(e)
    vset = set(vars)
    for m in e.den:
        for a, _ in m:
            if a in vset:
                raise NotPolynomialInVars(
                    f"denominator contains collection variable {a}", atom=a
                )
    groups: dict[Monomial, Poly] = {}
    for m, c in e.num.items():
        vpart = tuple((a, k) for a, k in m if a in vset)
        rest = tuple((a, k) for a, k in m if a not in vset)
        groups.setdefault(vpart, {})[rest] = c
    return {
        vm: Expr(p, dict(_ONE_POLY), _canonical=True) for vm, p in groups.items()
    }


# ---------------------------------------------------------------------------
# Exact numeric evaluation.

def eval_numeric(e: ExprLike, assignment: Mapping[Atom, Q]) -> Q:
    """Exact rational evaluation; every atom must be assigned."""
    e = as_expr(e)
    num = _eval_poly_numeric(e.num, assignment)
    den = _eval_poly_numeric(e.den, assignment)
    if den == 0:
        raise DenominatorVanishes("denominator evaluates to zero")
    return num / den


def _eval_poly_numeric(p: Poly, assignment: Mapping[Atom, Q]) -> Q:
    total = Q(0)
    for m, c in p.items():
        term = c
        for a, e in m:
            try:
                v = assignment[a]
            except KeyError:
                raise MissingAssignment(f"no value assigned to {a}") from None
            term = term * v**e
        total += term
    return total


# ---------------------------------------------------------------------------
# Exact polynomial division (used by the fraction-free linear solver).

def poly_divexact(p: Poly, q: Poly) -> Poly:
    """Divide ``p`` by ``q`` assuming the division is exact.

    Standard leading-term elimination under a graded-lex term order built
    over the atoms of the operands.  Raises ArithmeticError if a remainder
    survives (which would indicate a solver bug, not user error).
    """
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    if not p:
        return {}
    atoms = sorted({a for m in (*p, *q) for a, _ in m}, key=lambda a: a.key)
    index = {a: i for i, a in enumerate(atoms)}
    n = len(atoms)

    def dense(m):
        v = [0] * n
        for a, e in m:
            v[index[a]] = e
        return tuple(v)

    def grlex(v):
        return (sum(v), v)

    def sparse(v):
        return tuple((atoms[i], e) for i, e in enumerate(v) if e)

    r = {dense(m): c for m, c in p.items()}
    qd = {dense(m): c for m, c in q.items()}
    lq = max(qd, key=grlex)
    cq = qd[lq]
    out: Poly = {}
    while r:
        lr = max(r, key=grlex)
        diff = tuple(a - b for a, b in zip(lr, lq))
        if any(d < 0 for d in diff):
            raise ArithmeticError("inexact polynomial division")
        coeff = r[lr] / cq
        out[sparse(diff)] = coeff
        for mq, c in qd.items():
            m = tuple(a + b for a, b in zip(diff, mq))
            s = r.get(m)
            nc = (s if s is not None else 0) - coeff * c
            if nc:
                r[m] = nc
            elif s is not None:
                del r[m]
    return out
