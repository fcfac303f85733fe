"""Report serialization: round-trip, determinism, schema, goldens."""

import json
import pathlib

import jsonschema
import pytest

from entropik.report import (
    SCHEMA_VERSION,
    AnalysisReport,
    build_report,
    model_fingerprint,
    run_liu,
    run_solution_set,
)

from conftest import liu_run, load_model, solution_run

HERE = pathlib.Path(__file__).resolve().parent
SCHEMA = json.loads(
    (HERE.parents[0] / "src" / "entropik" / "schema" / "report-v1.schema.json")
    .read_text()
)

ALL_MODELS = ["gas1d", "fluid2d", "nonsimple2d", "granular2d"]
METHODS = ["solution-set", "mueller-liu"]


def _report(name, method):
    run = solution_run(name) if method == "solution-set" else liu_run(name)
    return build_report(run, name=name)


@pytest.mark.parametrize("name", ALL_MODELS)
@pytest.mark.parametrize("method", METHODS)
def test_json_round_trip_is_equal(name, method):
    rep = _report(name, method)
    assert AnalysisReport.from_json(rep.to_json()) == rep


@pytest.mark.parametrize("name", ALL_MODELS)
@pytest.mark.parametrize("method", METHODS)
def test_schema_validates(name, method):
    jsonschema.validate(json.loads(_report(name, method).to_json()), SCHEMA)


def test_schema_rejects_malformed():
    doc = json.loads(_report("gas1d", "solution-set").to_json())
    doc["method"] = "guesswork"
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(doc, SCHEMA)


def test_reports_are_deterministic(gas):
    # two fresh runs serialize byte-identically outside the timing block
    a = build_report(run_solution_set(gas), name="gas1d")
    b = build_report(run_solution_set(gas), name="gas1d")
    assert a.digest() == b.digest()
    assert json.dumps(a.digest_payload(), sort_keys=True) == json.dumps(
        b.digest_payload(), sort_keys=True
    )


def test_timings_excluded_from_digest(gas):
    rep = build_report(run_solution_set(gas), name="gas1d")
    other = AnalysisReport(
        schema=rep.schema,
        engine_version=rep.engine_version,
        model=rep.model,
        method=rep.method,
        solved=rep.solved,
        system=rep.system,
        timings={"solve": 99.0},
    )
    assert other.digest() == rep.digest()


def test_schema_version_field():
    rep = _report("gas1d", "solution-set")
    assert rep.schema == SCHEMA_VERSION == "report-v1"


@pytest.mark.parametrize("name", ALL_MODELS)
@pytest.mark.parametrize("method", METHODS)
def test_golden_reports(name, method):
    golden = json.loads((HERE / "golden" / f"{name}.{method}.json").read_text())
    assert _report(name, method).digest_payload() == golden


def test_fingerprint_is_content_digest(gas, fluid):
    assert model_fingerprint(gas) != model_fingerprint(fluid)
    assert len(model_fingerprint(gas)) == 64


def test_liu_report_carries_multiplier_labels():
    rep = _report("nonsimple2d", "mueller-liu")
    # multiplier partial derivatives print with their dependency labels
    text = json.dumps(rep.system)
    assert "dLam_energy/drho_t" in text
