"""Lagrange-multiplier identities and the comparison with the
solution-manifold constraints."""

import pytest

from entropik.atoms import ConstitSym
from entropik.expr import Expr, substitute
from entropik.liu import (
    compare,
    eliminate_multipliers,
    liu_extended,
    liu_split,
    multiplier_symbols,
)
from entropik.render import atom_str, expr_str
from entropik.split import entropy_on_solutions

from conftest import liu_run, load_model, solution_run


def test_multiplier_symbols_per_equation(gas):
    assert [s.name for s in multiplier_symbols(gas)] == [
        "Lam_mass", "Lam_momentum", "Lam_energy",
    ]


def test_gas_multipliers_solved(gas):
    run = liu_run("gas1d")
    rc = gas.render_ctx()
    solved = {
        lam.name: expr_str(v, rc) for lam, v in run.solved_multipliers.items()
    }
    assert solved == {
        "Lam_momentum": "0",
        "Lam_mass": "rho*deta/drho",
        "Lam_energy": "deta/deps",
    }
    assert run.unsolved == ()


def test_split_coefficients_free_of_split_atoms(gas):
    lr = liu_run("gas1d").result
    split_set = set(lr.split_atoms)
    for _, coeff in lr.table:
        assert not (set(coeff.atoms()) & split_set)


def test_extended_inequality_consistency(gas):
    # substituting the solved multipliers into the extended inequality and
    # then the lead solutions reproduces the entropy rate on solutions
    run = liu_run("gas1d")
    srun = solution_run("gas1d")
    e = liu_extended(gas, run.result.multiplier_dep)
    e = substitute(e, dict(run.solved_multipliers))
    e = substitute(e, srun.solved.substitution)
    target = entropy_on_solutions(gas, srun.solved)
    assert (e - target).is_zero()


@pytest.mark.parametrize("name", ["gas1d", "fluid2d"])
def test_identical_verdict(name):
    rep = compare(liu_run(name).result, solution_run(name).system)
    assert rep.verdict == "identical"
    assert not rep.liu_only
    assert not rep.solution_only


def test_nonsimple_over_restriction(nonsimple):
    rep = compare(liu_run("nonsimple2d").result, solution_run("nonsimple2d").system)
    assert rep.verdict == "liu-over-restricts"
    assert not rep.solution_only
    rc = nonsimple.render_ctx()
    extras = {expr_str(e, rc) for e in rep.liu_only}
    # flux constancy in the dependency slots the multipliers cannot see,
    # plus the vanishing shear stress
    assert extras == {
        "T12",
        "dq1/drho", "dq1/dtheta", "dq2/drho", "dq2/dtheta",
        "dPhi1/drho", "dPhi1/dtheta", "dPhi2/drho", "dPhi2/dtheta",
    }
    gens = {atom_str(a, rc) for a in rep.generic_assumptions}
    assert gens  # the over-restriction is flagged as generic-branch only


def test_nonsimple_split_is_linear(nonsimple):
    # the extended inequality stays linear in the splitting set even
    # though the entropy sees dt(rho)
    lr = liu_run("nonsimple2d").result
    assert lr.identities  # did not raise NonlinearExtendedInequality


def test_eliminate_multipliers_back_substitutes(fluid):
    run = liu_run("fluid2d")
    solved, physical, unsolved = (
        run.solved_multipliers, run.physical, run.unsolved,
    )
    for e in physical:
        for a in e.atoms():
            assert not (
                isinstance(a, ConstitSym) and a.name.startswith("Lam_")
            )
        for lam in solved:
            assert a is not lam


def test_multiplier_dep_recorded(gas):
    lr = liu_run("gas1d").result
    rc = gas.render_ctx()
    assert {atom_str(a, rc) for a in lr.multiplier_dep} == {"rho", "eps"}


def test_custom_multiplier_dep(nonsimple):
    from entropik.report import run_liu

    # restricting the postulated dependence changes the derived zeros
    rho = nonsimple.decl_map()["T11"].args[0]
    run = run_liu(nonsimple, (rho,))
    assert run.result.multiplier_dep == (rho,)
