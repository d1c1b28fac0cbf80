import csv
import io
import json

import pytest

from twisted_sutherland.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_roots_a_even(capsys):
    code, doc = run_json(capsys, "roots", "--family", "a-even", "--n", "1")
    assert code == 0
    assert doc["readable"]["positive_roots"] == ["e1"]
    assert sorted(doc["readable"]["positive_weights"]) == ["2*e1", "e1"]
    assert doc["rho_norm"] == "2"
    assert doc["verification"]["passed"] is True


def test_roots_d(capsys):
    code, doc = run_json(capsys, "roots", "--family", "d", "--n", "2")
    assert code == 0
    assert sorted(doc["readable"]["positive_roots"]) == ["e1", "e1 + e2", "e1 - e2", "e2"]


def test_roots_invalid_rank(capsys):
    code, _, err = run(capsys, "roots", "--family", "d", "--n", "0")
    assert code == 2 and "usage error" in err


def test_spectrum_twisted(capsys):
    code, doc = run_json(capsys, "spectrum", "--twisted", "--N", "3", "--k", "1", "--cutoff", "30")
    assert code == 0
    assert [e["eigenvalue"] for e in doc["entries"]] == ["8/3", "32/3", "68/3"]


def test_spectrum_standard(capsys):
    code, doc = run_json(capsys, "spectrum", "--standard", "--N", "2", "--gamma", "1", "--cutoff", "30")
    assert code == 0
    assert [e["eigenvalue"] for e in doc["entries"]] == ["4", "9", "16", "25"]


def test_spectrum_empty_case_explains(capsys):
    code, doc = run_json(capsys, "spectrum", "--twisted", "--N", "4", "--k", "1")
    assert code == 0
    assert doc["entries"] == [] and doc["note"]


def test_verify_passes(capsys):
    code, doc = run_json(capsys, "verify", "--N", "3", "--k", "1", "--levels", "5", "--grid", "16384")
    assert code == 0
    assert doc["passed"] and doc["max_relative_error"] <= 1e-4


def test_verify_printed_variant_fails_with_offset(capsys):
    code, doc = run_json(capsys, "verify", "--N", "3", "--k", "1", "--variant", "printed", "--grid", "4096")
    assert code == 1
    assert doc["offset_mean"] == pytest.approx(-1 / 6, abs=1e-3)
    assert doc["offset_spread"] < 1e-3


def test_verify_both_variants_table(capsys):
    code, out, _ = run(capsys, "verify", "--N", "3", "--k", "1", "--variant", "both", "--grid", "4096", "--format", "table")
    assert code == 0
    assert "verdict: 1/(2n+1) convention reproduces" in out


def test_verify_untwisted(capsys):
    code, doc = run_json(capsys, "verify", "--N", "2", "--untwisted", "--gamma", "1", "--grid", "4096")
    assert code == 0
    assert [lv["predicted"] for lv in doc["levels"]] == ["4", "9", "16", "25", "36"]


def test_verify_usage_errors(capsys):
    assert run(capsys, "verify", "--N", "4", "--k", "1")[0] == 2
    assert run(capsys, "verify", "--N", "3")[0] == 2
    assert run(capsys, "verify", "--N", "3", "--k", "1", "--variant", "literal")[0] == 2


def test_weyl(capsys):
    code, doc = run_json(capsys, "weyl", "--N", "5", "--trials", "20", "--k", "2")
    assert code == 0
    assert doc["order"] == 32 and doc["invariance"]["passed"]


def test_dims(capsys):
    code, doc = run_json(capsys, "dims", "--N", "5", "--k", "5", "--bruteforce")
    assert code == 0
    assert doc["dim"] == 6 == doc["bruteforce_dim"]


def test_pieri(capsys):
    code, doc = run_json(capsys, "pieri", "--N", "3", "--weight", "1,0", "--k", "1")
    assert code == 0 and doc == [[2, 0], [0, 1]]
    assert run(capsys, "pieri", "--N", "3", "--weight", "1,x", "--k", "1")[0] == 2


def test_csv_output(capsys):
    code, out, _ = run(capsys, "spectrum", "--N", "3", "--k", "2", "--cutoff", "20", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["eigenvalue"] for r in rows] == ["8/3", "20/3", "32/3", "50/3"]


def test_deterministic_output(capsys):
    argv = ("spectrum", "--N", "5", "--k", "2", "--cutoff", "25")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"command": "dims", "N": 6, "k": 4}))
    code, doc = run_json(capsys, "--config", str(cfg))
    assert code == 0 and doc["dim"] == 6
    cfg.write_text(json.dumps({"command": "dims", "N": 6, "k": 4, "bogus": 1}))
    assert run(capsys, "--config", str(cfg))[0] == 2


def test_output_dir_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("TWISTED_SUTHERLAND_OUTPUT_DIR", str(tmp_path))
    code, out, _ = run(capsys, "weyl", "--N", "4")
    assert code == 0 and out == ""
    assert json.loads((tmp_path / "weyl.json").read_text())["order"] == 16


def test_explicit_output_path(tmp_path, capsys):
    target = tmp_path / "sub" / "dims.json"
    assert run(capsys, "dims", "--N", "3", "--k", "4", "--output", str(target))[0] == 0
    assert json.loads(target.read_text())["dim"] == 3


def test_check_all_subset(capsys):
    code, doc = run_json(capsys, "check-all", "--only", "1,3")
    assert code == 0
    assert [c["criterion"] for c in doc["criteria"]] == [1, 3]
    assert run(capsys, "check-all", "--only", "12")[0] == 2


def test_missing_command(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "nonsense")[0] == 2
