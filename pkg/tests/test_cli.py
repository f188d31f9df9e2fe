import json
import subprocess
import sys

import pytest

from kgkms import fixtures as F
from kgkms.cli import main


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr().out
    return code, out


def fx(name):
    return str(F.path(name))


def test_validate_ok_and_errors(capsys, tmp_path):
    code, out = run(capsys, "--input", fx("four_vertex"), "--command", "validate")
    assert code == 0 and json.loads(out)["ok"]
    code, out = run(capsys, "--input", fx("four_vertex_concrete"), "--command", "validate")
    assert code == 0 and json.loads(out)["squares"] == 324
    code, out = run(capsys, "--input", fx("non_commuting"), "--command", "validate")
    doc = json.loads(out)
    assert code == 1 and doc["error"]["code"] == "non_commuting" and doc["error"]["violations"]
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, out = run(capsys, "--input", str(bad), "--command", "validate")
    assert code == 1 and json.loads(out)["error"]["code"] == "parse_error"


def test_report_four_vertex(capsys):
    code, out = run(capsys, "--input", fx("four_vertex"), "--command", "report")
    assert code == 0
    doc = json.loads(out)
    (one,) = [r for r in doc["report"]["regimes"] if r["provenance"] == "dominant_plus_lifted"]
    m = one["simplex"]["dominant_state"]["m"]
    assert m["u"] == pytest.approx(0.125, abs=1e-14)
    assert m["v"] == pytest.approx(1 / 24, abs=1e-14)
    assert m["w"] == pytest.approx(0.5, abs=1e-14)
    assert m["x"] == pytest.approx(1 / 3, abs=1e-14)
    assert doc["report"]["status"] == "COMPLETE"


def test_report_is_deterministic(capsys):
    _, a = run(capsys, "--input", fx("four_vertex"), "--command", "report", "--beta", "1.5")
    _, b = run(capsys, "--input", fx("four_vertex"), "--command", "report", "--beta", "1.5")
    assert a == b
    assert "at_beta" in json.loads(a)


def test_report_single_and_three(capsys):
    _, out = run(capsys, "--input", fx("single_vertex"), "--command", "report")
    assert len(json.loads(out)["report"]["regimes"]) == 1
    _, out = run(capsys, "--input", fx("three_component"), "--command", "report")
    assert json.loads(out)["report"]["status"] == "INCOMPLETE"


def test_hypothesis_exit_code(capsys, tmp_path):
    p = tmp_path / "cycle.json"
    p.write_text(json.dumps({"k": 2, "matrices": [[[1]], [[1]]]}))
    code, out = run(capsys, "--input", str(p), "--command", "report")
    assert code == 2 and json.loads(out)["error"]["code"] == "cycle_graph"


def test_verify_four_vertex_concrete(capsys):
    code, out = run(capsys, "--input", fx("four_vertex_concrete"), "--command", "verify", "--samples", "60")
    doc = json.loads(out)
    assert code == 0 and doc["ok"]
    assert doc["negative_control"]["detected"]
    assert not doc["gap_projection"]["failures"]


def test_verify_corrupted_state_fails(capsys, tmp_path):
    raw = F.load_raw("four_vertex_concrete")
    raw["state"] = {"beta": 1.0, "m": [3 / 24 - 0.05, 1 / 24, 12 / 24, 8 / 24 + 0.05]}
    p = tmp_path / "bad_state.json"
    p.write_text(json.dumps(raw))
    code, out = run(capsys, "--input", str(p), "--command", "verify", "--samples", "20")
    doc = json.loads(out)
    assert code == 3 and not doc["ok"]
    assert doc["kms_spot_check"][0]["max_violation"] > 1e-2


def test_verify_skeleton_only(capsys):
    code, out = run(capsys, "--input", fx("four_vertex"), "--command", "verify")
    doc = json.loads(out)
    assert code == 0 and "skipped" in doc["notes"][0]
    assert all(c["pass"] for c in doc["series_vs_closed_form"])


def test_text_format_and_bad_config(capsys):
    code, out = run(capsys, "--input", fx("dumbbell"), "--command", "validate", "--format", "text")
    assert code == 0 and "ok: True" in out
    code, out = run(capsys, "--input", fx("dumbbell"), "--command", "validate", "--tol", "-1")
    assert code == 1


def test_module_entry_point_and_logging():
    proc = subprocess.run([sys.executable, "-m", "kgkms", "--input", fx("dumbbell"), "--command", "validate"],
                          capture_output=True, text=True, env={"KGKMS_LOG": "INFO", "PATH": ""})
    assert proc.returncode == 0
    assert "loaded 2 vertices" in proc.stderr
