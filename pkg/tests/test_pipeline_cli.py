import json

import pytest

from sextic_cm import cli, pipeline
from sextic_cm.errors import Indeterminate, NotFound, ValidationError
from sextic_cm.pipeline import RunConfig, contains_Qi, dumps_report, field_flag, run_pipeline

from conftest import DATA, LABELS, bare, load


def test_config_validation():
    RunConfig()
    RunConfig(precision=60, threshold="1e-30")
    with pytest.raises(ValidationError):
        RunConfig(precision=20)
    with pytest.raises(ValidationError):
        RunConfig(precision=100, threshold="1e-10")
    with pytest.raises(ValidationError):
        RunConfig(threshold="abc")
    with pytest.raises(ValidationError):
        RunConfig(threshold="-1e-60")
    with pytest.raises(ValidationError):
        RunConfig(mode="guess")


def test_contains_Qi(fields):
    for lab in LABELS:
        assert contains_Qi(fields[lab]) == (lab == "6.0.153664.1")


def test_field_flag():
    assert field_flag([0], [1], False) == "mixed"
    assert field_flag([0], [], True) == "hyperelliptic"
    assert field_flag([0], [], False) == "exceptional hyperelliptic"
    assert field_flag([], [0], False) == "non-hyperelliptic"
    assert field_flag([], [], False) == "non-hyperelliptic"


@pytest.mark.slow
def test_report_is_deterministic(zeta7_run):
    rep, _ = zeta7_run
    again = run_pipeline(bare("6.0.16807.1"), RunConfig(mode="enumerate"))
    assert dumps_report(rep) == dumps_report(again)


def test_report_shape(zeta7_run):
    rep, _ = zeta7_run
    assert rep["schema_version"] == pipeline.SCHEMA_VERSION
    assert set(rep) >= {"field", "config", "galois", "cm_types", "class_groups", "units", "shimura", "triples", "classification"}
    t = rep["triples"][0]
    assert len(t["tau"]["entries"]) == 9
    assert len(t["verdict"]["magnitudes"]) == 36
    json.loads(dumps_report(rep))


def test_bad_record_reports_stage():
    rec = dict(bare("6.0.16807.1"), disc="-16808")
    with pytest.raises(ValidationError) as info:
        run_pipeline(rec)
    assert info.value.stage == "field_core"
    assert info.value.partial["field"]["label"] == "6.0.16807.1"


def test_cli_cmtypes(capsys):
    assert cli.main(["cmtypes", "--kind", "6T3"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["kind"] == "D6"
    assert doc["equivalence_classes"] == 4 and doc["primitive_classes"] == 3 and doc["galois_classes"] == 2
    assert cli.main(["cmtypes", "--kind", "6T99"]) == 2


def test_cli_bad_input(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["classify", "--field", str(bad)]) == 2
    rec = dict(bare("6.0.16807.1"), disc="1")
    p = tmp_path / "rec.json"
    p.write_text(json.dumps(rec))
    out = tmp_path / "out.json"
    assert cli.main(["classify", "--field", str(p), "--out", str(out)]) == 2
    doc = json.loads(out.read_text())
    assert doc["error"]["stage"] == "field_core" and doc["error"]["exit_code"] == 2
    assert cli.main(["classify", "--field", str(p), "--threshold", "1e-5"]) == 2


@pytest.mark.parametrize("exc, code", [(Indeterminate("near threshold"), 3), (NotFound("no pair"), 4)])
def test_cli_exit_codes(monkeypatch, tmp_path, exc, code):
    def boom(record, config):
        raise exc

    monkeypatch.setattr(cli, "run_pipeline", boom)
    out = tmp_path / "o.json"
    assert cli.main(["classify", "--field", str(DATA / "6.0.16807.1.json"), "--out", str(out)]) == code
    assert json.loads(out.read_text())["error"]["exit_code"] == code


def test_cli_batch(monkeypatch, tmp_path):
    calls = []

    def fake(record, config):
        calls.append(record["label"])
        return {"classification": {"flag": "non-hyperelliptic"}, "field": {"label": record["label"]}}

    monkeypatch.setattr(cli, "run_pipeline", fake)
    for lab in LABELS[:2]:
        (tmp_path / f"{lab}.json").write_text(json.dumps(load(lab)))
    assert cli.main(["batch", "--list", str(tmp_path), "--out", str(tmp_path / "r")]) == 0
    assert sorted(calls) == sorted(LABELS[:2])
    assert len(list((tmp_path / "r").glob("*.report.json"))) == 2
    assert cli.main(["batch", "--list", str(tmp_path / "missing")]) == 2


@pytest.mark.slow
def test_verify_suite_passes(contexts):
    from sextic_cm.verify import verify_suite

    led = verify_suite(load("6.0.309123.1"), RunConfig(precision=60, threshold="1e-30"))
    assert led["checks"]
    assert all(c["status"] == "pass" for c in led["checks"]), [c for c in led["checks"] if c["status"] != "pass"]
