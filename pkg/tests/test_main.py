import csv
import json

import pytest

from src.criteria import VERDICT_ENTANGLED
from src.ghz_core import state_to_document, uniform_state, werner_state
from src.main import run
from src.symmetric_family import CSV_HEADER, V_B


def _write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def test_help_exits_cleanly():
    assert run(["--help"]) == 0


def test_bad_flag_is_a_usage_error():
    assert run(["family", "landmarks", "--bogus"]) == 1
    assert run(["criteria", "frobnicate"]) == 1


def test_criteria_check(tmp_path):
    state = _write(tmp_path / "werner.json", state_to_document(werner_state(0.3)))
    out = tmp_path / "report.json"
    assert run(["criteria", "check", "--state", state, "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["verdict"] == VERDICT_ENTANGLED
    assert report["I"]["margin"] == pytest.approx(0.7 / 8 - 0.15)


def test_missing_state_file(tmp_path):
    assert run(["state", "show", "--state", str(tmp_path / "missing.json")]) == 1
    assert run(["state", "show"]) == 1


def test_state_show_adds_t_vector(tmp_path):
    state = _write(tmp_path / "state.json", {"correlations": [0.0] * 15})
    out = tmp_path / "shown.json"
    assert run(["state", "show", "--state", state, "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["T"]) == 16
    assert sum(doc["probs"]) == pytest.approx(1.0)


def test_witness_optimize_without_correlations_fails(tmp_path):
    state = _write(tmp_path / "uniform.json", state_to_document(uniform_state()))
    assert run(["witness", "optimize", "--state", state, "--multistarts", "2"]) == 2


def test_witness_eval(tmp_path):
    state = _write(tmp_path / "werner.json", state_to_document(werner_state(0.5)))
    witness = _write(tmp_path / "witness.json", {"M": [0] * 6 + [2, 1] + [-1] * 6 + [1]})
    out = tmp_path / "eval.json"
    assert run(["witness", "eval", "--state", state, "--witness", witness, "--samples", "2000", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["L"] == pytest.approx(0.4)
    assert doc["sampled_min_slack"] > -1e-9


def test_family_landmarks(tmp_path):
    out = tmp_path / "landmarks.json"
    assert run(["family", "landmarks", "--p16", "0", "--format", "json", "--out", str(out)]) == 0
    rows = {row["label"]: row for row in json.loads(out.read_text())}
    assert rows["B"]["v"] == pytest.approx(V_B)
    assert rows["B"]["check"] == "pass"
    assert rows["C"]["check"] == "pass"


def test_family_boundary_csv(tmp_path):
    out = tmp_path / "boundary.csv"
    assert run(["family", "boundary", "--p16", "0.3", "--n", "4", "--out", str(out)]) == 0
    with open(out) as f:
        rows = list(csv.reader(f))
    assert tuple(rows[0]) == CSV_HEADER
    assert len(rows) == 1 + 10 * 4


def test_family_regime_error():
    assert run(["family", "boundary", "--p16", "0.1"]) == 1


def test_family_state_needs_coordinates():
    assert run(["family", "state", "--v", "0.5"]) == 1
    assert run(["family", "state", "--v", "0.5", "--alpha", "6"]) == 1


def test_construct_verify_segment(tmp_path):
    out = tmp_path / "construct.json"
    assert run(["construct", "verify", "--segment", "AB", "--n", "3", "--format", "json", "--out", str(out)]) == 0
    records = json.loads(out.read_text())
    assert len(records) == 3
    assert {r["status"] for r in records} <= {"ok", "infeasible"}
    assert records[1]["status"] == "ok"
    assert run(["construct", "verify", "--segment", "XY", "--n", "3"]) == 1


def test_config_file_is_read(tmp_path):
    config = tmp_path / "custom.yml"
    config.write_text("criteria:\n  tau_points: 2000\n")
    state = _write(tmp_path / "werner.json", state_to_document(werner_state(0.1)))
    assert run(["criteria", "check", "--state", state, "--config", str(config), "--out",
                str(tmp_path / "r.json")]) == 0


def test_reproduce_landmarks(tmp_path):
    out = tmp_path / "landmarks.json"
    assert run(["reproduce", "landmarks", "--format", "json", "--out", str(out)]) == 0
    rows = json.loads(out.read_text())
    assert {row["check"] for row in rows if "check" in row} == {"pass"}


def test_reproduce_second_layout_csv(tmp_path):
    out = tmp_path / "second.csv"
    assert run(["reproduce", "second-layout", "--n", "3", "--out", str(out)]) == 0
    with open(out) as f:
        rows = list(csv.reader(f))
    assert tuple(rows[0]) == CSV_HEADER
    assert {row[0] for row in rows[1:]} == {"AB", "BC", "CD", "DE", "EF", "FG", "GH", "HI", "IJ", "AJ"}


def test_criteria_cross_check(tmp_path):
    state = _write(tmp_path / "werner.json", state_to_document(werner_state(0.15)))
    out = tmp_path / "report.json"
    assert run(["criteria", "check", "--state", state, "--cross-check", "--out", str(out)]) == 0
    assert "IV" in json.loads(out.read_text())


@pytest.mark.parametrize("alias,target", [("figure1", "first-layout"), ("figure2", "second-layout"),
                                          ("figure3", "tangency")])
def test_reproduce_aliases(tmp_path, alias, target):
    outputs = []
    for name in (alias, target):
        out = tmp_path / f"{name}.json"
        assert run(["reproduce", name, "--n", "2", "--format", "json", "--out", str(out)]) == 0
        outputs.append(json.loads(out.read_text()))
    assert outputs[0] == outputs[1]


def test_reproduce_asymmetric_gap_alias(tmp_path):
    config = tmp_path / "quick.yml"
    config.write_text("optimizer:\n  polish_top: 1\n")
    out = tmp_path / "gap.json"
    assert run(["reproduce", "appendix-e", "--multistarts", "2", "--config", str(config), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert set(doc) == {"symmetric", "asymmetric", "asymmetric_better"}
    assert run(["reproduce", "bogus-target"]) == 1


def test_scan_uses_the_grid_flag(tmp_path):
    config = tmp_path / "quick.yml"
    config.write_text("optimizer:\n  scan_multistarts: 2\n  polish_top: 1\n")
    out = tmp_path / "scan.csv"
    assert run(["scan", "--grid", "2", "--config", str(config), "--out", str(out)]) == 0
    with open(out) as f:
        rows = list(csv.reader(f))
    assert len(rows) == 1 + 3
