import csv
import io
import json
import subprocess
import sys

import pytest

from pidkit.cli import main
from pidkit.io import save_distribution
from props import random_system


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_pid_table(capsys):
    code, out, _ = run(capsys, "pid", "--example", "and")
    assert code == 0
    lines = {ln.split()[0]: ln.split() for ln in out.splitlines() if ln and not ln.startswith("#")}
    assert lines["{1}{2}"][2] == "0.1038"
    assert lines["{12}"][2] == "0.2925"
    assert "converged=True" in out


def test_pid_csv_full_precision(capsys):
    code, out, _ = run(capsys, "pid", "--example", "rdnunqxor", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [r["node"] for r in rows] == ["{1}{2}", "{1}", "{2}", "{12}"]
    assert float(rows[3]["I_cap"]) == pytest.approx(4.0, abs=1e-12)


def test_pid_json_pointwise(capsys):
    code, out, _ = run(capsys, "pid", "--example", "sum", "--format", "json", "--pointwise")
    doc = json.loads(out)
    assert code == 0 and doc["measure"] == "iccs_game"
    rows = doc["pointwise"]["{1}{2}"]
    assert [r["outcome"] for r in rows] == [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 2]]
    assert doc["solver"]["{1}{2}"]["converged"] is True


def test_pointwise_table_has_no_negative_zero(capsys):
    _, out, _ = run(capsys, "pid", "--example", "sum", "--pointwise")
    assert "pointwise terms for {1}{2}" in out and "-0.0000" not in out


@pytest.mark.parametrize("measure", ["imin", "broja", "mmi"])
def test_other_measures(capsys, measure):
    code, out, _ = run(capsys, "pid", "--example", "wb-a", "--measure", measure, "--format", "json")
    assert code == 0 and json.loads(out)["measure"] == measure


def test_decision_variant(capsys):
    code, out, _ = run(capsys, "pid", "--example", "reducedor", "--variant", "decision", "--format", "json")
    assert code == 0 and json.loads(out)["measure"] == "iccs_decision"


def test_input_file_and_output(tmp_path, capsys):
    src = tmp_path / "sys.json"
    save_distribution(random_system(1), src)
    dest = tmp_path / "out.csv"
    code, out, _ = run(capsys, "pid", "--input", str(src), "--format", "csv", "--output", str(dest))
    assert code == 0 and out == "" and dest.read_text().startswith("node,I_cap,I_partial")


def test_exit_codes(tmp_path, capsys, caplog):
    assert run(capsys, "pid", "--example", "nope")[0] == 1
    assert run(capsys, "pid", "--input", str(tmp_path / "missing.txt"))[0] == 3
    bad = tmp_path / "bad.txt"
    bad.write_text("vars 1\ncards 2\n0 0.3\n")
    assert run(capsys, "pid", "--input", str(bad))[0] == 1
    assert "sum to" in caplog.text
    assert run(capsys, "pid", "--example", "giantbit", "--measure", "broja")[0] == 1
    hard = tmp_path / "hard.txt"
    save_distribution(random_system(7, (3, 3, 3), 0.3), hard)
    code, out, _ = run(capsys, "pid", "--input", str(hard), "--max-iter", "1")
    assert code == 2 and "converged=False" in out


def test_sweep_predpred(capsys):
    code, out, _ = run(capsys, "sweep", "predpred")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 10
    assert list(rows[0])[:5] == ["c", "iccs_red", "iccs_unq1", "iccs_unq2", "iccs_syn"]
    assert float(rows[0]["c"]) == -0.8 and float(rows[-1]["c"]) == pytest.approx(0.1)
    assert run(capsys, "sweep", "predpred", "--start", "-1")[0] == 1


def test_sweep_gaussian(capsys):
    code, out, _ = run(capsys, "sweep", "gaussian", "--a", "0.4", "--c", "0.6", "--points", "3",
                       "--samples", "20000", "--format", "json")
    rows = json.loads(out)
    assert code == 0 and len(rows) == 3
    assert {"b", "joint_mi", "mmi_unq1", "iccs_red", "iccs_red_se"} <= set(rows[0])
    code, out, _ = run(capsys, "sweep", "gaussian", "--b-grid", "0.2,2.0", "--samples", "5000")
    assert code == 0 and len(out.strip().splitlines()) == 2


def test_game(capsys):
    code, out, _ = run(capsys, "game", "--example", "reducedor", "--setter", "1", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and float(rows[0]["gap"]) == pytest.approx(0.25)
    code, out, _ = run(capsys, "game", "--example", "reducedor-broja", "--format", "json")
    assert [g["gap"] for g in json.loads(out)["games"]] == [pytest.approx(0, abs=1e-12)] * 2
    assert run(capsys, "game", "--example", "sum")[0] == 1


def test_examples_and_convert(tmp_path, capsys):
    code, out, _ = run(capsys, "examples")
    assert code == 0 and "rdnunqxor" in out and "predpred(c)" in out
    txt = tmp_path / "and.txt"
    txt.write_text("vars 3\ncards 2 2 2\n0 0 0 0.25\n0 1 0 0.25\n1 0 0 0.25\n1 1 1 0.25\n")
    js = tmp_path / "and.json"
    assert run(capsys, "convert", str(txt), "--output", str(js))[0] == 0
    code, out, _ = run(capsys, "convert", str(js))
    assert code == 0 and out.splitlines()[:2] == ["vars 3", "cards 2 2 2"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pidkit", "examples"], capture_output=True, text=True)
    assert proc.returncode == 0 and "xorcopy" in proc.stdout
