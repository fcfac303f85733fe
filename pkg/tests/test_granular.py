"""The granular-solid model: the large desk-scale stress test."""

import time

from entropik.expr import monomial_expr
from entropik.render import atom_str
from entropik.solve import verify_solved

from conftest import solution_run


def test_granular_pipeline_within_budget(granular):
    from entropik.report import run_solution_set

    t0 = time.perf_counter()
    run = run_solution_set(granular)
    elapsed = time.perf_counter() - t0
    assert elapsed < 600.0
    assert run.system.constraints


def test_granular_momentum_consequences(granular):
    s = solution_run("granular2d").solved
    rc = granular.render_ctx()
    keys = sorted(atom_str(st.key, rc) for st in s.consequence_log)
    assert keys == ["u_tx", "u_ty", "v_tx", "v_ty"]


def test_granular_symmetrization_every_declared_pair(granular):
    cs = solution_run("granular2d").system
    with_pairs = [d for d in granular.decls if d.symmetric]
    assert len(with_pairs) == len(granular.decls)  # all twelve declare one
    touched = set()
    for e in cs.symmetrization:
        touched.update(a.name for a in e.atoms())
    assert touched == {d.name for d in with_pairs}
    for e in cs.symmetrization:
        assert e in cs.constraints


def test_granular_reconstruction_exact(granular):
    cs = solution_run("granular2d").system
    total = cs.residual_numerator
    for mono, coeff in cs.table:
        total = total + coeff * monomial_expr(mono)
    assert total == cs.reconstruction()


def test_granular_residual_nonzero(granular):
    cs = solution_run("granular2d").system
    assert not cs.residual_numerator.is_zero()


def test_granular_back_substitution(granular):
    rep = verify_solved(granular, solution_run("granular2d").solved)
    assert rep.all_zero
