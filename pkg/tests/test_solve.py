"""Leading-derivative solve and differential-consequence closure."""

import dataclasses

import pytest

from entropik.atoms import JetVar
from entropik.errors import NonlinearInLeading, OrderCapExceeded, SingularSystem
from entropik.parser import parse_model
from entropik.render import atom_str
from entropik.solve import close_consequences, solve_leading, verify_solved

from conftest import load_model, solution_run

ALL_MODELS = ["gas1d", "fluid2d", "nonsimple2d", "granular2d"]


@pytest.mark.parametrize("name", ALL_MODELS)
def test_solved_system_triangular(name):
    m = load_model(name)
    s = solution_run(name).solved
    assert s.is_triangular(m)
    # every leading derivative got a value
    for ld in m.leading:
        assert ld in s.keys()


@pytest.mark.parametrize("name", ALL_MODELS)
def test_back_substitution_residues_vanish(name):
    m = load_model(name)
    rep = verify_solved(m, solution_run(name).solved)
    assert rep.all_zero, [e.name for e in rep.failures()]


def test_gas_needs_no_consequences(gas):
    s = solution_run("gas1d").solved
    assert s.consequence_log == ()
    assert set(s.keys()) == set(gas.leading)


def test_nonsimple_closure_keys(nonsimple):
    # entropy depends on dt(rho), so substitution forces exactly the
    # derivatives of the mass/momentum equations that reach it
    s = solution_run("nonsimple2d").solved
    rc = nonsimple.render_ctx()
    keys = {atom_str(st.key, rc) for st in s.consequence_log}
    assert keys == {"rho_tx", "rho_ty", "rho_tt", "u_tx", "v_ty"}


def test_granular_closure_adds_momentum_consequences(granular):
    s = solution_run("granular2d").solved
    rc = granular.render_ctx()
    keys = [atom_str(st.key, rc) for st in s.consequence_log]
    assert sorted(keys) == ["u_tx", "u_ty", "v_tx", "v_ty"]
    sources = {st.source for st in s.consequence_log}
    assert sources == {"momentum1", "momentum2"}


def test_consequences_solved_not_guessed(nonsimple):
    s = solution_run("nonsimple2d").solved
    m = nonsimple
    for key in s.keys():
        assert isinstance(key, JetVar)
        assert key in m.leading or m.is_consequence(key)


def test_order_cap_enforced(nonsimple):
    m = dataclasses.replace(nonsimple, max_order=1)
    s = solve_leading(m)
    with pytest.raises(OrderCapExceeded):
        close_consequences(m, s, m.entropy_lhs)


def test_nonlinear_leading_rejected():
    text = (
        "independent t x\nfield a\nequation sq: dt(a)*dt(a) = 0\n"
        "entropy: dt(a) >= 0\nleading: dt(a)\n"
    )
    m = parse_model(text).raise_on_error()
    with pytest.raises(NonlinearInLeading):
        solve_leading(m)


def test_singular_system_rejected():
    text = (
        "independent t x\nfield a b\n"
        "equation one: dt(a) + dt(b) = 0\n"
        "equation two: 2*dt(a) + 2*dt(b) = 0\n"
        "entropy: dt(a) >= 0\nleading: dt(a), dt(b)\n"
    )
    m = parse_model(text).raise_on_error()
    with pytest.raises(SingularSystem):
        solve_leading(m)


def test_pivot_determinant_certified(fluid):
    s = solution_run("fluid2d").solved
    # every pivot factor is backed by a declared nonzero side condition
    # or is a pure rational; the determinant collects them
    assert not s.determinant.is_zero()
