"""End-to-end command-line behaviour and exit codes."""

import json

import pytest
from click.testing import CliRunner

from entropik.cli import main

from conftest import MODELS


def model(name):
    return str(MODELS / f"{name}.epk")


def bind(name):
    return str(MODELS / f"{name}.bind")


@pytest.fixture()
def runner():
    return CliRunner()


def test_analyze_text(runner):
    r = runner.invoke(main, ["analyze", model("gas1d")])
    assert r.exit_code == 0
    assert "rho^2*deta/drho + p*deta/deps = 0" in r.output
    assert "residual: 0 >= 0" in r.output


def test_analyze_json_validates(runner):
    r = runner.invoke(main, ["analyze", model("fluid2d"), "--output", "json"])
    assert r.exit_code == 0
    doc = json.loads(r.output)
    assert doc["schema"] == "report-v1"
    assert len(doc["system"]["constraints"]) == 8


def test_analyze_json_deterministic(runner):
    args = ["analyze", model("gas1d"), "--output", "json"]
    a = json.loads(runner.invoke(main, args).output)
    b = json.loads(runner.invoke(main, args).output)
    a.pop("timings"), b.pop("timings")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_analyze_latex(runner):
    r = runner.invoke(main, ["analyze", model("gas1d"), "--output", "latex"])
    assert r.exit_code == 0
    assert r.output.count("{") == r.output.count("}")
    assert "\\documentclass" in r.output


def test_analyze_mueller_liu(runner):
    r = runner.invoke(main, ["analyze", model("gas1d"), "--method", "mueller-liu"])
    assert r.exit_code == 0
    assert "Lam_energy = deta/deps" in r.output
    assert "Lam_momentum = 0" in r.output


def test_parse_error_exits_1(runner, tmp_path):
    bad = tmp_path / "bad.epk"
    bad.write_text("independent t\nfield a\nwhatever: 1\n")
    r = runner.invoke(main, ["analyze", str(bad)])
    assert r.exit_code == 1
    assert "bad.epk:3" in r.output


def test_engine_error_exits_2_with_code(runner):
    r = runner.invoke(
        main, ["analyze", model("nonsimple2d"), "--max-order", "1"]
    )
    assert r.exit_code == 2
    assert "error[E022]" in r.output


def test_compare_identical(runner):
    r = runner.invoke(main, ["compare", model("fluid2d")])
    assert r.exit_code == 0
    assert "verdict: identical" in r.output


def test_compare_over_restriction(runner):
    r = runner.invoke(main, ["compare", model("nonsimple2d")])
    assert r.exit_code == 0
    assert "verdict: liu-over-restricts" in r.output
    assert "multiplier-only: T12 = 0" in r.output


def test_compare_unknown_dep_label(runner):
    r = runner.invoke(
        main, ["compare", model("gas1d"), "--multiplier-dep", "bogus"]
    )
    assert r.exit_code == 2
    assert "unknown dependency" in r.output


def test_split_tree(runner):
    r = runner.invoke(main, ["split", model("gas1d")])
    assert r.exit_code == 0
    assert "4 leaves" in r.output
    assert "case deta/deps = 0:" in r.output


def test_split_with_assumption(runner):
    r = runner.invoke(
        main, ["split", model("gas1d"), "--assume", "deta/deps = 0"]
    )
    assert r.exit_code == 0
    assert "1 leaves" in r.output


def test_split_contradictory_assumptions(runner):
    r = runner.invoke(
        main,
        [
            "split", model("gas1d"),
            "--assume", "deta/deps = 0",
            "--assume", "deta/deps != 0",
        ],
    )
    assert r.exit_code == 0
    assert "0 leaves, 1 closed" in r.output


def test_split_force_residual_zero_json(runner):
    r = runner.invoke(
        main,
        ["split", model("fluid2d"), "--force-residual-zero",
         "--output", "json"],
    )
    assert r.exit_code == 0
    doc = json.loads(r.output)
    assert doc["leaf_count"] == 4


def test_verify(runner):
    r = runner.invoke(
        main, ["verify", model("gas1d"), "--trials", "25", "--seed", "7"]
    )
    assert r.exit_code == 0
    assert "identity 25/25" in r.output
    assert "on-variety 25/25" in r.output


def test_verify_with_bindings(runner):
    r = runner.invoke(
        main,
        ["verify", model("gas1d"), "--trials", "10", "--seed", "1",
         "--bindings", bind("gas1d_ideal")],
    )
    assert r.exit_code == 0
    assert "zero at 10/10 points" in r.output


def test_check_passes(runner):
    r = runner.invoke(
        main, ["check", model("nonsimple2d"), bind("nonsimple2d_family")]
    )
    assert r.exit_code == 0
    assert "passes all 23 constraints" in r.output


def test_check_fails_on_bad_candidate(runner, tmp_path):
    text = (MODELS / "nonsimple2d_family.bind").read_text()
    bad = tmp_path / "bad.bind"
    bad.write_text(text.replace("bind T12 = 0", "bind T12 = 5"))
    r = runner.invoke(main, ["check", model("nonsimple2d"), str(bad)])
    assert r.exit_code == 1
    assert "FAIL T12*deta/dtheta" in r.output


def test_check_unbound_symbol_code(runner, tmp_path):
    bad = tmp_path / "bad.bind"
    bad.write_text("bind p = shrug\n")
    r = runner.invoke(main, ["check", model("gas1d"), str(bad)])
    assert r.exit_code == 2
    assert "error[E050]" in r.output


def test_check_transcendental_code(runner, tmp_path):
    bad = tmp_path / "bad.bind"
    bad.write_text("bind eta = log(eps)\n")
    r = runner.invoke(main, ["check", model("gas1d"), str(bad)])
    assert r.exit_code == 2
    assert "error[E051]" in r.output


def test_version(runner):
    r = runner.invoke(main, ["--version"])
    assert r.exit_code == 0
    assert "0.1.0" in r.output
