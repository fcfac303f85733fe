"""Binding files: concrete candidate solutions for a model's unknowns.

A bindings file assigns expressions to constitutive symbols, or directly
to their partial derivatives.  Direct partial bindings exist so that
families with non-rational closed forms stay inside the rational kernel:
a logarithmic entropy cannot be written down here, but its partial
derivatives can.  Named scalar parameters are opaque constants, with an
optional rational test value.

Format, one statement per line (``#`` comments)::

    parameter gamma = 7/5
    parameter Cv
    bind p = (gamma - 1)*rho*eps
    bind deta/deps = Cv/eps
    bind q1 = 0

Checking substitutes the bindings into every constraint, deriving any
partial the constraints mention from the nearest bound value by slot
differentiation; a constraint passes when it normalizes to zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ._ratio import Q
from .atoms import Atom, ConstitPartial, ConstitSym, mi_dominates, mi_total
from .errors import ModelError, NonRationalBinding, UnboundSymbol
from .expr import Expr, substitute
from .liu import _arg_derivative
from .model import ModelDef
from .parser import CompileEnv, _Fail, compile_node, parse_expr_text
from .render import expr_str
from .split import ConstraintSystem

__all__ = [
    "BindingSet",
    "ConstraintCheck",
    "CheckReport",
    "parse_bindings",
    "binding_closure",
    "check_candidate",
    "sampled_production",
]

_TRANSCENDENTAL = {"log", "ln", "exp", "sin", "cos", "tan", "sqrt"}


@dataclass(frozen=True)
class BindingSet:
    parameters: tuple[tuple[str, Optional[Q]], ...]
    assignments: tuple[tuple[Atom, Expr], ...]

    def parameter_values(self) -> dict[Atom, Expr]:
        return {
            ConstitSym(name): Expr.rational(v)
            for name, v in self.parameters
            if v is not None
        }


@dataclass(frozen=True)
class ConstraintCheck:
    constraint: str
    value: str
    passed: bool


@dataclass(frozen=True)
class CheckReport:
    checks: tuple[ConstraintCheck, ...]
    residual: str                    # substituted residual, sign not judged
    parameters: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)


def _compile(node, env: CompileEnv) -> Expr:
    try:
        return compile_node(node, env)
    except _Fail as err:
        msg = str(err)
        if "unknown function" in msg:
            name = msg.split("'")[1] if "'" in msg else ""
            if name in _TRANSCENDENTAL:
                raise NonRationalBinding(
                    f"'{name}' is outside the rational fragment; bind the "
                    f"partial derivatives you need instead of the function"
                ) from err
        if "unknown identifier" in msg or "unknown function" in msg:
            raise UnboundSymbol(msg) from err
        raise ModelError(msg) from err


def parse_bindings(
    text: str, m: ModelDef, filename: str = "<bindings>"
) -> BindingSet:
    params: list[tuple[str, Optional[Q]]] = []
    assigns: list[tuple[Atom, Expr]] = []
    env = CompileEnv(
        indep=m.indep,
        fields=m.fields,
        decls={d.name: d for d in m.decls},
        extended=True,
    )
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "parameter":
            name, eq, valtext = rest.partition("=")
            name = name.strip()
            if not name.isidentifier():
                raise ModelError(f"{filename}:{lineno}: bad parameter name {name!r}")
            value = None
            if eq:
                try:
                    value = Q(valtext.strip())
                except (ValueError, ZeroDivisionError) as err:
                    raise NonRationalBinding(
                        f"{filename}:{lineno}: parameter test values must be "
                        f"rational, got {valtext.strip()!r}"
                    ) from err
            params.append((name, value))
            env = CompileEnv(
                indep=env.indep,
                fields=env.fields,
                decls=env.decls,
                extended=True,
                parameters=env.parameters | {name},
            )
            continue
        if head == "bind":
            target_text, eq, value_text = rest.partition("=")
            if not eq:
                raise ModelError(f"{filename}:{lineno}: bind needs '='")
            try:
                target_node = parse_expr_text(
                    target_text.strip(), filename=filename, lineno=lineno
                )
                value_node = parse_expr_text(
                    value_text.strip(), filename=filename, lineno=lineno
                )
            except _Fail as err:
                raise ModelError(str(err)) from err
            target = _compile(target_node, env)
            atoms = list(target.atoms())
            if (
                len(atoms) != 1
                or not isinstance(atoms[0], (ConstitSym, ConstitPartial))
                or target != Expr.atom(atoms[0])
            ):
                raise ModelError(
                    f"{filename}:{lineno}: bind target must be a constitutive "
                    f"symbol or a single partial of one"
                )
            if isinstance(atoms[0], ConstitSym) and atoms[0].name in env.parameters:
                raise ModelError(
                    f"{filename}:{lineno}: cannot bind the parameter "
                    f"'{atoms[0].name}'"
                )
            assigns.append((atoms[0], _compile(value_node, env)))
            continue
        raise ModelError(
            f"{filename}:{lineno}: expected 'bind' or 'parameter', got {head!r}"
        )
    return BindingSet(parameters=tuple(params), assignments=tuple(assigns))


def binding_closure(
    m: ModelDef,
    bs: BindingSet,
    needed: set[Atom],
    use_parameter_values: bool = False,
) -> dict[Atom, Expr]:
    """Substitution map covering ``needed``: direct assignments plus any
    partials derivable from a bound value by slot differentiation."""
    args_of = {d.name: d.args for d in m.decls}
    out: dict[Atom, Expr] = dict(bs.assignments)

    def derive(x: ConstitPartial) -> Optional[Expr]:
        args = args_of.get(x.name)
        if args is None:
            return None
        base: Optional[Atom] = None
        base_slots = tuple(0 for _ in args)
        if ConstitSym(x.name) in out:
            base = ConstitSym(x.name)
        for k in out:
            if (
                isinstance(k, ConstitPartial)
                and k.name == x.name
                and k is not x
                and mi_dominates(x.slots, k.slots)
                and (base is None or mi_total(k.slots) > mi_total(base_slots))
            ):
                base, base_slots = k, k.slots
        if base is None:
            return None
        v = out[base]
        for j, a in enumerate(args):
            for _ in range(x.slots[j] - base_slots[j]):
                v = _arg_derivative(v, a, args_of)
        return v

    frontier = set(needed)
    for _ in range(16):
        new: dict[Atom, Expr] = {}
        for x in frontier:
            if x in out or not isinstance(x, ConstitPartial):
                continue
            v = derive(x)
            if v is not None:
                new[x] = v
        if not new:
            break
        out.update(new)
        frontier = {a for v in new.values() for a in v.atoms()}
    if use_parameter_values:
        vals = bs.parameter_values()
        if vals:
            out = {k: substitute(v, vals) for k, v in out.items()}
            out.update(vals)
    return out


def _close_subst(e: Expr, sub: dict[Atom, Expr]) -> Expr:
    for _ in range(16):
        if not any(a in sub for a in e.atoms()):
            return e
        e = substitute(e, sub)
    return e


def sampled_production(
    m: ModelDef, cs: ConstraintSystem, bs: BindingSet, trials: int, seed: int
) -> tuple[Q, ...]:
    """Entropy-production numerator under the bindings at random exact
    rational points, one value per trial."""
    import random

    from .expr import eval_numeric

    needed: set[Atom] = set(cs.reconstruction().atoms())
    sub = binding_closure(m, bs, needed, use_parameter_values=True)
    num = _close_subst(cs.reconstruction(), sub)
    out = []
    atoms = sorted(num.atoms(), key=lambda a: a.key)
    for trial in range(trials):
        rnd = random.Random(seed * 1000003 + trial)
        point = {a: Q(rnd.randint(1, 9), rnd.randint(1, 9)) for a in atoms}
        out.append(eval_numeric(num, point))
    return tuple(out)


def check_candidate(
    m: ModelDef, cs: ConstraintSystem, bs: BindingSet
) -> CheckReport:
    """Evaluate every constraint under the bindings; pass = exactly zero."""
    needed: set[Atom] = set()
    for c in list(cs.constraints) + [cs.residual_numerator, cs.denominator]:
        needed.update(c.atoms())
    sub = binding_closure(m, bs, needed, use_parameter_values=True)
    rc = m.render_ctx()
    checks = []
    for c in cs.constraints:
        v = _close_subst(c, sub)
        checks.append(
            ConstraintCheck(
                constraint=expr_str(c, rc),
                value=expr_str(v, rc),
                passed=v.is_zero(),
            )
        )
    residual = _close_subst(cs.residual, sub)
    return CheckReport(
        checks=tuple(checks),
        residual=expr_str(residual, rc),
        parameters=tuple(n for n, _v in bs.parameters),
    )
