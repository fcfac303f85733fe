"""Model-file parsing, diagnostics, and round-trip formatting."""

import pytest

from entropik.atoms import ConstitPartial, ConstitSym, JetVar
from entropik.parser import (
    CompileEnv,
    ModelBuilder,
    compile_node,
    format_model,
    parse_expr_text,
    parse_model,
)
from entropik.render import expr_str

from conftest import MODELS, load_model

ALL_MODELS = ["gas1d", "fluid2d", "nonsimple2d", "granular2d"]


@pytest.mark.parametrize("name", ALL_MODELS)
def test_format_parse_fixpoint(name):
    m = load_model(name)
    text = format_model(m)
    m2 = parse_model(text, filename="<roundtrip>").raise_on_error()
    assert format_model(m2) == text
    # semantic equality, not just textual
    assert m2.equations == m.equations
    assert m2.entropy_lhs == m.entropy_lhs
    assert m2.leading == m.leading
    assert m2.nonzero == m.nonzero
    assert m2.decls == m.decls


def test_parse_gas_shapes(gas):
    assert gas.indep_names == ("t", "x")
    assert gas.fields == ("rho", "u", "eps")
    assert [d.name for d in gas.decls] == ["p", "q1", "eta", "Phi1"]
    assert [eq.label for eq in gas.equations] == ["mass", "momentum", "energy"]
    assert gas.leading == (
        JetVar("rho", (1, 0)), JetVar("u", (1, 0)), JetVar("eps", (1, 0)),
    )


def test_unknown_directive_is_located():
    pr = parse_model("independent t\nfield a\nnonsense: 1\n", filename="f.epk")
    assert not pr.ok
    d = next(x for x in pr.diagnostics if x.severity == "error")
    assert d.span.file == "f.epk"
    assert d.span.line == 3


def test_undeclared_symbol_in_equation():
    text = (
        "independent t x\nfield rho\n"
        "equation mass: dt(rho) + dx(mystery) = 0\n"
        "entropy: dt(rho) >= 0\nleading: dt(rho)\n"
    )
    pr = parse_model(text, filename="f.epk")
    assert not pr.ok
    assert any("mystery" in d.message for d in pr.diagnostics)


def test_raise_on_error():
    pr = parse_model("field\n", filename="f.epk")
    with pytest.raises(Exception):
        pr.raise_on_error()


def test_symmetric_pair_declaration(granular):
    d = granular.decl_map()["T11"]
    assert d.symmetric  # the dy(u)/dx(v) argument pair


def test_extended_grammar_jet_suffix(fluid):
    env = CompileEnv(
        indep=fluid.indep,
        fields=fluid.fields,
        decls=fluid.decl_map(),
        extended=True,
    )
    e = compile_node(parse_expr_text("theta_xy"), env)
    assert e == __import__("entropik").Expr.atom(JetVar("theta", (0, 1, 1)))


def test_partial_ref_compiles_to_partial(gas):
    env = CompileEnv(
        indep=gas.indep, fields=gas.fields, decls=gas.decl_map(), extended=True
    )
    e = compile_node(parse_expr_text("deta/deps"), env)
    atoms = list(e.atoms())
    assert atoms == [ConstitPartial("eta", (0, 1))]


@pytest.mark.parametrize("name", ALL_MODELS)
def test_expression_render_reparse(name):
    # every constraint the engine prints must re-parse to the same Expr
    from conftest import solution_run

    m = load_model(name)
    run = solution_run(name)
    env = CompileEnv(
        indep=m.indep, fields=m.fields, decls=m.decl_map(), extended=True
    )
    rc = m.render_ctx()
    for c in list(run.system.constraints)[:40]:
        for part in (c.numerator_expr(), c.denominator_expr()):
            text = expr_str(part, rc)
            back = compile_node(parse_expr_text(text), env)
            assert back == part, text


def test_model_builder_matches_file(gas):
    b = (
        ModelBuilder()
        .independent("t", "x")
        .field("rho", "u", "eps")
        .constitutive("p", "rho", "eps")
        .constitutive("q1", "rho", "eps")
        .constitutive("eta", "rho", "eps")
        .constitutive("Phi1", "rho", "eps")
        .equation("mass", "dt(rho) + dx(rho*u)")
        .equation("momentum", "rho*(dt(u) + u*dx(u)) + dx(p)")
        .equation("energy", "rho*(dt(eps) + u*dx(eps)) + dx(q1) + p*dx(u)")
        .entropy("rho*(dt(eta) + u*dx(eta)) + dx(Phi1) >= 0")
        .leading("dt(rho)", "dt(u)", "dt(eps)")
        .assume_nonzero("rho")
    )
    m = b.build()
    assert format_model(m) == format_model(gas)


def test_fingerprint_tracks_canonical_model(gas):
    from entropik.report import model_fingerprint

    # reparsing the canonical text reproduces the fingerprint
    m2 = parse_model(format_model(gas)).raise_on_error()
    assert model_fingerprint(m2) == model_fingerprint(gas)
    # a changed side condition changes it
    text = format_model(gas).replace("assume nonzero: rho\n", "")
    m3 = parse_model(text).raise_on_error()
    assert model_fingerprint(m3) != model_fingerprint(gas)


def test_higher_order_partial_round_trip(fluid):
    env = CompileEnv(
        indep=fluid.indep,
        fields=fluid.fields,
        decls=fluid.decl_map(),
        extended=True,
    )
    e = compile_node(parse_expr_text("d2eps/drho.dtheta"), env)
    assert list(e.atoms()) == [ConstitPartial("eps", (1, 1))]
    e2 = compile_node(parse_expr_text("d2eps/dtheta.dtheta"), env)
    assert list(e2.atoms()) == [ConstitPartial("eps", (0, 2))]


def test_partial_order_mismatch_rejected():
    with pytest.raises(Exception, match="order"):
        parse_expr_text("d3eps/drho.dtheta")
