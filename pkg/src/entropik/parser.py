"""Line-oriented model DSL: parsing, diagnostics, formatting.

Grammar (one directive per line, ``#`` starts a comment):

.. code-block:: text

    independent <name>+
    field <name>+
    constitutive <name>(<arg>, ...) [symmetric (<arg>, <arg>) ...]
    equation <label>: <expr> = <expr>
    entropy: <expr> >= 0
    leading: <derivative>, ...
    assume nonzero: <expr>, ...
    max_order: <int>

Expressions use rationals, names, ``+ - * / ^``, parentheses, and one
derivative operator per independent variable (``dt``, ``dx``, ...),
arbitrarily nested.  ``^`` binds tighter than unary minus.  The *extended*
grammar (used by assumption flags and bindings files, and accepted on
``assume`` lines) additionally allows first-order constitutive partials
``d<sym>/d<arg>`` and jet-suffix names such as ``rho_t``.

The parser is total: any input yields either a ModelDef or at least one
error diagnostic with a source span.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

from ._ratio import Q
from .ast_nodes import BinOp, Call, Name, Neg, Node, Num, PartialRef, to_text
from .atoms import Atom, ConstitPartial, ConstitSym, IndepVar, JetVar
from .errors import DivisionByZeroExpr, EngineError, ModelError
from .expr import DiffContext, Expr, total_derivative
from .model import ConstitDecl, Equation, ModelDef

__all__ = [
    "SourceSpan",
    "ParseDiagnostic",
    "ParseResult",
    "parse_model",
    "format_model",
    "ModelBuilder",
    "CompileEnv",
    "compile_node",
    "parse_expr_text",
]


# ---------------------------------------------------------------------------
# Diagnostics.

@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    col_start: int
    col_end: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col_start}"


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str  # "error" | "warning"
    message: str
    span: SourceSpan
    hint: Optional[str] = None

    def __str__(self) -> str:
        s = f"{self.span}: {self.severity}: {self.message}"
        if self.hint:
            s += f" ({self.hint})"
        return s


class _Fail(Exception):
    """Internal: abort the current directive, carrying a diagnostic."""

    def __init__(self, message: str, span: SourceSpan, hint: Optional[str] = None):
        super().__init__(message)
        self.diag = ParseDiagnostic("error", message, span, hint)


# ---------------------------------------------------------------------------
# Lexer.

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<num>\d+)|(?P<op>>=|[-+*/^(),:=.]))"
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # name | num | op | end
    text: str
    col: int  # 1-based


def _lex(line: str, lineno: int, filename: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(line):
        m = _TOKEN_RE.match(line, pos)
        if not m:
            stripped = line[pos:].lstrip()
            if not stripped:
                break
            col = len(line) - len(stripped) + 1
            raise _Fail(
                f"unexpected character {stripped[0]!r}",
                SourceSpan(filename, lineno, col, col + 1),
            )
        if m.lastgroup:
            toks.append(_Tok(m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup) + 1))
        pos = m.end()
    toks.append(_Tok("end", "", len(line) + 1))
    return toks


class _Cursor:
    def __init__(self, toks: list[_Tok], lineno: int, filename: str):
        self.toks = toks
        self.i = 0
        self.lineno = lineno
        self.filename = filename

    def peek(self, ahead: int = 0) -> _Tok:
        j = min(self.i + ahead, len(self.toks) - 1)
        return self.toks[j]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        if t.kind != "end":
            self.i += 1
        return t

    def span(self, tok: _Tok) -> SourceSpan:
        return SourceSpan(
            self.filename, self.lineno, tok.col, tok.col + max(len(tok.text), 1)
        )

    def expect(self, kind: str, text: Optional[str] = None) -> _Tok:
        t = self.peek()
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            raise _Fail(f"expected '{want}', found {t.text!r}", self.span(t))
        return self.next()

    def at_end(self) -> bool:
        return self.peek().kind == "end"


# ---------------------------------------------------------------------------
# Expression grammar (tokens -> AST).

def _parse_expr(c: _Cursor, extended: bool) -> Node:
    return _parse_sum(c, extended)


def _parse_sum(c: _Cursor, extended: bool) -> Node:
    node = _parse_product(c, extended)
    while c.peek().kind == "op" and c.peek().text in "+-":
        op = c.next().text
        rhs = _parse_product(c, extended)
        node = BinOp(op, node, rhs)
    return node


def _parse_product(c: _Cursor, extended: bool) -> Node:
    node = _parse_unary(c, extended)
    while c.peek().kind == "op" and c.peek().text in "*/":
        op = c.next().text
        rhs = _parse_unary(c, extended)
        node = BinOp(op, node, rhs)
    return node


def _parse_unary(c: _Cursor, extended: bool) -> Node:
    t = c.peek()
    if t.kind == "op" and t.text == "-":
        c.next()
        return Neg(_parse_unary(c, extended), span=c.span(t))
    return _parse_power(c, extended)


def _parse_power(c: _Cursor, extended: bool) -> Node:
    node = _parse_primary(c, extended)
    if c.peek().kind == "op" and c.peek().text == "^":
        c.next()
        exp = _parse_exponent(c)
        node = BinOp("^", node, exp)
    return node


def _parse_exponent(c: _Cursor) -> Node:
    t = c.peek()
    if t.kind == "num":
        c.next()
        return Num(Q(t.text), span=c.span(t))
    raise _Fail("exponent must be a nonnegative integer literal", c.span(t))


def _looks_like_partial(c: _Cursor) -> bool:
    t = c.peek()
    return (
        t.kind == "name"
        and len(t.text) > 1
        and t.text[0] == "d"
        and c.peek(1).kind == "op"
        and c.peek(1).text == "/"
        and c.peek(2).kind == "name"
        and len(c.peek(2).text) > 1
        and c.peek(2).text[0] == "d"
    )


def _parse_primary(c: _Cursor, extended: bool) -> Node:
    t = c.peek()
    if t.kind == "num":
        c.next()
        return Num(Q(t.text), span=c.span(t))
    if t.kind == "name":
        if extended and _looks_like_partial(c):
            sym_tok = c.next()
            c.next()  # '/'
            head = sym_tok.text[1:]
            digits = ""
            while head and head[0].isdigit():
                digits += head[0]
                head = head[1:]
            args = [c.next().text[1:]]
            while c.peek().kind == "op" and c.peek().text == ".":
                c.next()
                arg_tok = c.expect("name")
                if len(arg_tok.text) < 2 or arg_tok.text[0] != "d":
                    raise _Fail(
                        "each partial denominator factor must be d<arg>",
                        c.span(arg_tok),
                    )
                args.append(arg_tok.text[1:])
            if digits and int(digits) != len(args):
                raise _Fail(
                    f"partial order {digits} does not match "
                    f"{len(args)} denominator factor(s)",
                    c.span(sym_tok),
                )
            if not head:
                raise _Fail(
                    "partial reference names no constitutive symbol",
                    c.span(sym_tok),
                )
            return PartialRef(head, tuple(args), span=c.span(sym_tok))
        c.next()
        if c.peek().kind == "op" and c.peek().text == "(":
            c.next()
            args = [_parse_expr(c, extended)]
            while c.peek().kind == "op" and c.peek().text == ",":
                c.next()
                args.append(_parse_expr(c, extended))
            c.expect("op", ")")
            return Call(t.text, tuple(args), span=c.span(t))
        return Name(t.text, span=c.span(t))
    if t.kind == "op" and t.text == "(":
        c.next()
        node = _parse_expr(c, extended)
        c.expect("op", ")")
        return node
    raise _Fail(f"expected an expression, found {t.text!r}", c.span(t))


def parse_expr_text(
    text: str, extended: bool = True, filename: str = "<expr>", lineno: int = 1
) -> Node:
    """Parse a standalone expression (extended grammar by default)."""
    c = _Cursor(_lex(text, lineno, filename), lineno, filename)
    node = _parse_expr(c, extended)
    t = c.peek()
    if not c.at_end():
        raise _Fail(f"unexpected trailing input {t.text!r}", c.span(t))
    return node


# ---------------------------------------------------------------------------
# Compilation (AST -> Expr).

@dataclass
class CompileEnv:
    indep: tuple[IndepVar, ...]
    fields: tuple[str, ...]
    decls: dict[str, ConstitDecl]
    extended: bool = False
    parameters: frozenset[str] = frozenset()

    def __post_init__(self):
        self.indep_by_name = {v.name: v for v in self.indep}
        self.diff_ctx = DiffContext(
            indep=self.indep, args={n: d.args for n, d in self.decls.items()}
        )
        self.deriv_ops = {"d" + v.name: v for v in self.indep}

    def arg_label(self, a: Atom) -> str:
        if isinstance(a, JetVar) and any(a.orders):
            return a.field + "_" + a.suffix(tuple(v.name for v in self.indep))
        return str(a)

    def resolve_jet_suffix(self, ident: str) -> Optional[JetVar]:
        if "_" not in ident:
            return None
        base, _, suffix = ident.partition("_")
        if base not in self.fields:
            return None
        orders = [0] * len(self.indep)
        names = [v.name for v in self.indep]
        rest = suffix
        while rest:
            for i, n in enumerate(names):
                if rest.startswith(n):
                    orders[i] += 1
                    rest = rest[len(n) :]
                    break
            else:
                return None
        return JetVar(base, tuple(orders))


def _err(node: Node, message: str, hint: Optional[str] = None) -> _Fail:
    span = node.span or SourceSpan("<expr>", 1, 1, 2)
    return _Fail(message, span, hint)


def compile_node(node: Node, env: CompileEnv) -> Expr:
    if isinstance(node, Num):
        return Expr.rational(node.value)
    if isinstance(node, Name):
        ident = node.ident
        iv = env.indep_by_name.get(ident)
        if iv is not None:
            return Expr.atom(iv)
        if ident in env.fields:
            return Expr.atom(JetVar(ident, (0,) * len(env.indep)))
        if ident in env.decls or ident in env.parameters:
            return Expr.atom(ConstitSym(ident))
        if env.extended:
            jv = env.resolve_jet_suffix(ident)
            if jv is not None:
                return Expr.atom(jv)
        raise _err(node, f"unknown identifier '{ident}'")
    if isinstance(node, PartialRef):
        decl = env.decls.get(node.sym)
        if decl is None:
            raise _err(node, f"unknown constitutive symbol '{node.sym}'")
        labels = [env.arg_label(a) for a in decl.args]
        slots = [0] * decl.arity
        for arg in node.args:
            if arg not in labels:
                raise _err(
                    node,
                    f"'{node.sym}' has no argument '{arg}'",
                    hint=f"arguments are: {', '.join(labels)}",
                )
            slots[labels.index(arg)] += 1
        return Expr.atom(ConstitPartial(node.sym, tuple(slots)))
    if isinstance(node, Call):
        iv = env.deriv_ops.get(node.func)
        if iv is not None:
            if len(node.args) != 1:
                raise _err(node, f"derivative operator {node.func} takes one argument")
            inner = compile_node(node.args[0], env)
            return total_derivative(inner, iv, env.diff_ctx)
        decl = env.decls.get(node.func)
        if decl is not None:
            if len(node.args) != decl.arity:
                raise _err(
                    node,
                    f"'{node.func}' declared with {decl.arity} argument(s), "
                    f"used with {len(node.args)}",
                )
            for given, declared in zip(node.args, decl.args):
                g = compile_node(given, env)
                if g != Expr.atom(declared):
                    raise _err(
                        node,
                        f"'{node.func}' argument mismatch: expected "
                        f"{env.arg_label(declared)}",
                    )
            return Expr.atom(ConstitSym(node.func))
        raise _err(node, f"unknown function '{node.func}'")
    if isinstance(node, Neg):
        return -compile_node(node.operand, env)
    if isinstance(node, BinOp):
        left = compile_node(node.left, env)
        if node.op == "^":
            assert isinstance(node.right, Num)
            return left ** int(node.right.value)
        right = compile_node(node.right, env)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if node.op == "/":
            try:
                return left / right
            except DivisionByZeroExpr:
                raise _err(node, "division by an expression that normalizes to zero")
        raise _err(node, f"unknown operator {node.op!r}")
    raise TypeError(f"not an AST node: {node!r}")


# ---------------------------------------------------------------------------
# The model parser.

@dataclass
class ParseResult:
    model: Optional[ModelDef]
    diagnostics: list[ParseDiagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.model is not None and not any(
            d.severity == "error" for d in self.diagnostics
        )

    def raise_on_error(self) -> ModelDef:
        if not self.ok:
            msgs = "\n".join(str(d) for d in self.diagnostics)
            raise ModelError(f"model did not parse:\n{msgs}")
        return self.model


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def _split_top(
    c: _Cursor, op_text: str
) -> Optional[int]:
    """Index of the first top-level occurrence of an operator token."""
    depth = 0
    for j in range(c.i, len(c.toks)):
        t = c.toks[j]
        if t.kind != "op":
            continue
        if t.text == "(":
            depth += 1
        elif t.text == ")":
            depth -= 1
        elif t.text == op_text and depth == 0:
            return j
    return None


def parse_model(text: str, filename: str = "<model>") -> ParseResult:
    diags: list[ParseDiagnostic] = []

    # Directive lines, comment-stripped, with their numbers.
    lines: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = _strip_comment(raw)
        if body.strip():
            lines.append((lineno, body))

    def fail_diag(e: _Fail):
        diags.append(e.diag)

    # -- pass 1: declarations -------------------------------------------
    indep: list[IndepVar] = []
    fields: list[str] = []
    decl_lines: list[tuple[int, _Cursor]] = []
    other_lines: list[tuple[str, int, _Cursor]] = []
    max_order = 4

    for lineno, body in lines:
        try:
            toks = _lex(body, lineno, filename)
        except _Fail as e:
            fail_diag(e)
            continue
        c = _Cursor(toks, lineno, filename)
        head = c.peek()
        if head.kind != "name":
            diags.append(
                ParseDiagnostic("error", "expected a directive", c.span(head))
            )
            continue
        kw = head.text
        c.next()
        try:
            if kw == "independent":
                while not c.at_end():
                    t = c.expect("name")
                    if any(v.name == t.text for v in indep):
                        raise _Fail(
                            f"duplicate independent variable '{t.text}'", c.span(t)
                        )
                    indep.append(IndepVar(t.text))
            elif kw == "field":
                while not c.at_end():
                    t = c.expect("name")
                    if t.text in fields:
                        raise _Fail(f"duplicate field '{t.text}'", c.span(t))
                    fields.append(t.text)
            elif kw == "constitutive":
                decl_lines.append((lineno, c))
            elif kw == "max_order":
                c.expect("op", ":")
                t = c.expect("num")
                max_order = int(t.text)
            elif kw in ("equation", "entropy", "leading", "assume"):
                other_lines.append((kw, lineno, c))
            else:
                raise _Fail(
                    f"unknown directive '{kw}'",
                    c.span(head),
                    hint="expected independent, field, constitutive, equation, "
                    "entropy, leading, assume, or max_order",
                )
        except _Fail as e:
            fail_diag(e)

    if not indep:
        diags.append(
            ParseDiagnostic(
                "error",
                "model declares no independent variables",
                SourceSpan(filename, 1, 1, 2),
            )
        )
    if not fields:
        diags.append(
            ParseDiagnostic(
                "error", "model declares no fields", SourceSpan(filename, 1, 1, 2)
            )
        )
    if diags and (not indep or not fields):
        return ParseResult(None, diags)

    indep_t = tuple(indep)
    fields_t = tuple(fields)
    zero = (0,) * len(indep_t)

    # Environment without constitutive declarations: for argument lists.
    arg_env = CompileEnv(indep=indep_t, fields=fields_t, decls={})

    decls: dict[str, ConstitDecl] = {}
    for lineno, c in decl_lines:
        try:
            name_tok = c.expect("name")
            name = name_tok.text
            if name in decls:
                raise _Fail(
                    f"duplicate constitutive declaration '{name}'", c.span(name_tok)
                )
            if name in fields or any(v.name == name for v in indep_t):
                raise _Fail(
                    f"'{name}' is already a field or independent variable",
                    c.span(name_tok),
                )
            c.expect("op", "(")
            args: list[Atom] = []
            while True:
                node = _parse_expr(c, extended=False)
                e = compile_node(node, arg_env)
                atom = _single_jet_atom(e)
                if atom is None:
                    raise _err(node, "constitutive argument must be a field derivative")
                if atom in args:
                    raise _err(node, "repeated constitutive argument")
                args.append(atom)
                if c.peek().text == ",":
                    c.next()
                    continue
                break
            c.expect("op", ")")
            symmetric: list[tuple[int, int]] = []
            if c.peek().kind == "name" and c.peek().text == "symmetric":
                c.next()
                while c.peek().text == "(":
                    c.next()
                    n1 = _parse_expr(c, extended=False)
                    c.expect("op", ",")
                    n2 = _parse_expr(c, extended=False)
                    c.expect("op", ")")
                    a1 = _single_jet_atom(compile_node(n1, arg_env))
                    a2 = _single_jet_atom(compile_node(n2, arg_env))
                    if a1 not in args or a2 not in args:
                        raise _err(n1, "symmetric pair must name declared arguments")
                    symmetric.append((args.index(a1), args.index(a2)))
            if not c.at_end():
                raise _Fail(
                    f"unexpected trailing input {c.peek().text!r}", c.span(c.peek())
                )
            decls[name] = ConstitDecl(name, tuple(args), tuple(symmetric))
        except _Fail as e:
            fail_diag(e)

    env = CompileEnv(indep=indep_t, fields=fields_t, decls=decls)
    ext_env = CompileEnv(indep=indep_t, fields=fields_t, decls=decls, extended=True)

    # -- pass 2: equations, entropy, leading, assumptions ----------------
    equations: list[Equation] = []
    entropy: Optional[Expr] = None
    entropy_ast: Optional[Node] = None
    entropy_count = 0
    leading: list[JetVar] = []
    nonzero: list[Expr] = []
    nonzero_asts: list[Node] = []

    for kw, lineno, c in other_lines:
        try:
            if kw == "equation":
                label_tok = c.expect("name")
                c.expect("op", ":")
                if _split_top(c, "=") is None:
                    raise _Fail(
                        "equation needs '<expr> = <expr>'", c.span(c.peek())
                    )
                lhs_ast = _parse_expr(c, extended=False)
                c.expect("op", "=")
                rhs_ast = _parse_expr(c, extended=False)
                if not c.at_end():
                    raise _Fail(
                        f"unexpected trailing input {c.peek().text!r}",
                        c.span(c.peek()),
                    )
                if any(eq.label == label_tok.text for eq in equations):
                    raise _Fail(
                        f"duplicate equation label '{label_tok.text}'",
                        c.span(label_tok),
                    )
                lhs = compile_node(lhs_ast, env) - compile_node(rhs_ast, env)
                equations.append(
                    Equation(label_tok.text, lhs, lhs_ast=lhs_ast, rhs_ast=rhs_ast)
                )
            elif kw == "entropy":
                c.expect("op", ":")
                lhs_ast = _parse_expr(c, extended=False)
                t = c.expect("op", ">=")
                zero_node = _parse_expr(c, extended=False)
                z = compile_node(zero_node, env)
                if not z.is_zero():
                    raise _Fail(
                        "entropy inequality must compare against 0", c.span(t)
                    )
                entropy_count += 1
                if entropy_count > 1:
                    raise _Fail(
                        "model requires exactly one entropy inequality",
                        c.span(t),
                        hint="a previous entropy line exists",
                    )
                entropy = compile_node(lhs_ast, env)
                entropy_ast = lhs_ast
            elif kw == "leading":
                c.expect("op", ":")
                while True:
                    node = _parse_expr(c, extended=True)
                    e = compile_node(node, ext_env)
                    atom = _single_jet_atom(e)
                    if atom is None or not any(atom.orders):
                        raise _err(node, "leading entry must be a field derivative")
                    leading.append(atom)
                    if c.peek().text == ",":
                        c.next()
                        continue
                    break
                if not c.at_end():
                    raise _Fail(
                        f"unexpected trailing input {c.peek().text!r}",
                        c.span(c.peek()),
                    )
            elif kw == "assume":
                t = c.expect("name")
                if t.text != "nonzero":
                    raise _Fail("expected 'assume nonzero:'", c.span(t))
                c.expect("op", ":")
                while True:
                    node = _parse_expr(c, extended=True)
                    nonzero.append(compile_node(node, ext_env))
                    nonzero_asts.append(node)
                    if c.peek().text == ",":
                        c.next()
                        continue
                    break
        except _Fail as e:
            fail_diag(e)

    if entropy is None and entropy_count == 0:
        diags.append(
            ParseDiagnostic(
                "error",
                "model requires exactly one entropy inequality",
                SourceSpan(filename, lines[-1][0] if lines else 1, 1, 2),
                hint="add a line: entropy: <expr> >= 0",
            )
        )
    if not leading:
        diags.append(
            ParseDiagnostic(
                "error",
                "model requires a 'leading:' line",
                SourceSpan(filename, lines[-1][0] if lines else 1, 1, 2),
            )
        )
    if any(d.severity == "error" for d in diags):
        return ParseResult(None, diags)

    model = ModelDef(
        indep=indep_t,
        fields=fields_t,
        decls=tuple(decls.values()),
        equations=tuple(equations),
        entropy_lhs=entropy,
        leading=tuple(leading),
        nonzero=tuple(nonzero),
        max_order=max_order,
        entropy_ast=entropy_ast,
        nonzero_asts=tuple(nonzero_asts),
    )
    try:
        model.validate()
    except ModelError as e:
        diags.append(
            ParseDiagnostic("error", str(e), SourceSpan(filename, 1, 1, 2))
        )
        return ParseResult(None, diags)
    return ParseResult(model, diags)


def _single_jet_atom(e: Expr) -> Optional[JetVar]:
    atoms = list(e.atoms())
    if len(atoms) == 1 and isinstance(atoms[0], JetVar) and e == Expr.atom(atoms[0]):
        return atoms[0]
    return None


# ---------------------------------------------------------------------------
# Formatting.

def _jet_call_text(jv: JetVar, indep_names: tuple[str, ...]) -> str:
    s = jv.field
    for name, k in zip(indep_names, jv.orders):
        for _ in range(k):
            s = f"d{name}({s})"
    return s


def format_model(m: ModelDef) -> str:
    """Canonical source form; parses back to an equal ModelDef."""
    names = m.indep_names
    out = [f"independent {' '.join(names)}", f"field {' '.join(m.fields)}"]
    env = CompileEnv(indep=m.indep, fields=m.fields, decls={})
    for d in m.decls:
        args = ", ".join(_arg_text(a, names) for a in d.args)
        line = f"constitutive {d.name}({args})"
        if d.symmetric:
            pairs = " ".join(
                f"({_arg_text(d.args[i], names)}, {_arg_text(d.args[j], names)})"
                for i, j in d.symmetric
            )
            line += f" symmetric {pairs}"
        out.append(line)
    for eq in m.equations:
        if eq.lhs_ast is None or eq.rhs_ast is None:
            raise ValueError(
                f"equation {eq.label} has no source form to format"
            )
        out.append(
            f"equation {eq.label}: {to_text(eq.lhs_ast)} = {to_text(eq.rhs_ast)}"
        )
    if m.entropy_ast is None:
        raise ValueError("entropy inequality has no source form to format")
    out.append(f"entropy: {to_text(m.entropy_ast)} >= 0")
    out.append(
        "leading: " + ", ".join(_jet_call_text(ld, names) for ld in m.leading)
    )
    if m.nonzero_asts:
        out.append(
            "assume nonzero: " + ", ".join(to_text(a) for a in m.nonzero_asts)
        )
    elif m.nonzero:
        raise ValueError("nonzero assumptions have no source form to format")
    if m.max_order != 4:
        out.append(f"max_order: {m.max_order}")
    return "\n".join(out) + "\n"


def _arg_text(a: Atom, indep_names: tuple[str, ...]) -> str:
    if isinstance(a, JetVar):
        if not any(a.orders):
            return a.field
        return _jet_call_text(a, indep_names)
    return str(a)


# ---------------------------------------------------------------------------
# Programmatic construction, mirroring the DSL one to one.

class ModelBuilder:
    """Build a ModelDef programmatically with DSL expression syntax.

    The builder assembles canonical source text and runs it through the
    parser, so programmatic and file-based models cannot drift apart.
    """

    def __init__(self):
        self._lines: list[str] = []

    def independent(self, *names: str) -> "ModelBuilder":
        self._lines.append("independent " + " ".join(names))
        return self

    def field(self, *names: str) -> "ModelBuilder":
        self._lines.append("field " + " ".join(names))
        return self

    def constitutive(
        self,
        name: str,
        *args: str,
        symmetric: Iterable[tuple[str, str]] = (),
    ) -> "ModelBuilder":
        line = f"constitutive {name}({', '.join(args)})"
        pairs = " ".join(f"({a}, {b})" for a, b in symmetric)
        if pairs:
            line += f" symmetric {pairs}"
        self._lines.append(line)
        return self

    def equation(self, label: str, lhs: str, rhs: str = "0") -> "ModelBuilder":
        self._lines.append(f"equation {label}: {lhs} = {rhs}")
        return self

    def entropy(self, lhs: str) -> "ModelBuilder":
        self._lines.append(f"entropy: {lhs} >= 0")
        return self

    def leading(self, *derivs: str) -> "ModelBuilder":
        self._lines.append("leading: " + ", ".join(derivs))
        return self

    def assume_nonzero(self, *exprs: str) -> "ModelBuilder":
        self._lines.append("assume nonzero: " + ", ".join(exprs))
        return self

    def max_order(self, n: int) -> "ModelBuilder":
        self._lines.append(f"max_order: {n}")
        return self

    def source(self) -> str:
        return "\n".join(self._lines) + "\n"

    def build(self) -> ModelDef:
        return parse_model(self.source(), filename="<builder>").raise_on_error()
