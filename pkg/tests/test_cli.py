import csv
import io
import json
import subprocess
import sys

import pytest
from gmpy2 import mpq

from treemono.cli import CSV_COLUMNS, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_sweep_bounded(capsys):
    code, out, _ = run(capsys, "sweep", "--model", "bounded3", "--p", "2", "--kmax", "5", "--functional", "G,W,N")
    assert code == 0
    assert out.splitlines()[0] == ",".join(CSV_COLUMNS)
    table = rows(out)
    assert {r["value_exact"] for r in table if r["functional"] == "G"} == {"2"}
    w5 = mpq(2 * 5 - 4) + mpq(8, 32) - mpq(4, 1024)
    assert [r for r in table if r["functional"] == "W"][-1]["value_exact"] == str(w5)


def test_sweep_constant_zero(capsys):
    code, out, _ = run(capsys, "sweep", "--model", "constant", "--c", "0", "--kmax", "4", "--functional", "G,N")
    assert code == 0
    assert {r["value_exact"] for r in rows(out)} == {"0"}


def test_sweep_random_thirty_rows(capsys):
    code, out, _ = run(capsys, "sweep", "--model", "random", "--seed", "42", "--d", "4", "--p", "2", "--kmax", "10")
    table = rows(out)
    assert code == 0 and len(table) == 30
    assert all(r["monotone_ok"] == "true" for r in table)


def test_sweep_json_header(capsys):
    code, out, _ = run(capsys, "sweep", "--model", "needweight3", "--kmax", "3", "--format", "json")
    doc = json.loads(out)
    assert doc["header"] == {"d": 3, "p": "2", "mode": "exact", "seed": 0, "model": "needweight3"}
    assert set(doc["rows"][0]) == set(CSV_COLUMNS)


def test_sweep_float_mode(capsys):
    code, out, _ = run(capsys, "sweep", "--model", "double_half3", "--p", "1.5", "--mode", "float",
                       "--kmax", "6", "--functional", "G,N")
    assert code == 0
    assert all(r["monotone_ok"] == "true" for r in rows(out))


def test_sweep_aggregates_and_d2_weiss(capsys):
    code, out, _ = run(capsys, "sweep", "--model", "linear2", "--a", "2", "--b", "1", "--kmax", "3",
                       "--functional", "W,aggregates")
    assert code == 0
    table = rows(out)
    assert [r["value_exact"] for r in table if r["functional"] == "W"][1] == "15/4"
    assert {r["functional"] for r in table} == {"W", "D", "H", "C", "R", "Nk"}


@pytest.mark.parametrize("argv", [
    ["sweep", "--model", "bounded3", "--p", "1.5"],
    ["sweep", "--model", "bounded3", "--p", "0"],
    ["sweep", "--model", "nosuch"],
    ["sweep"],
    ["sweep", "--model", "bounded3", "--functional", "Q"],
    ["sweep", "--model", "bounded3", "--d", "4"],
    ["sweep", "--model-file", "/nonexistent.json"],
])
def test_config_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 1


def test_verify_needweight(capsys):
    code, out, _ = run(capsys, "verify", "--model", "needweight3", "--kmax", "10")
    doc = json.loads(out)
    assert code == 0 and doc["ok"]
    names = {c["check"] for c in doc["checks"]}
    assert {"child_sum", "monotone_W", "monotone_G_p2", "monotone_N_p3", "almgren_root_step"} <= names


def test_verify_perturbed(capsys):
    code, out, _ = run(capsys, "verify", "--model", "needweight3", "--kmax", "5", "--perturb")
    doc = json.loads(out)
    assert code == 2 and not doc["ok"]
    assert doc["checks"][0]["check"] == "child_sum"
    assert doc["checks"][0]["status"] == "fail"


def test_verify_linear(capsys):
    code, out, _ = run(capsys, "verify", "--model", "linear2", "--a", "1", "--b", "1", "--kmax", "50")
    doc = json.loads(out)
    assert code == 0
    assert any(c["check"] == "w2_limit" and c["status"] == "pass" for c in doc["checks"])


def test_verify_model_file(capsys, tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({
        "d": 4, "K": 6, "name": "filemodel",
        "root": {"u0": "1", "children": ["2", "0", "3", "-1"]},
        "splitter": {"kind": "random", "seed": 9},
    }))
    code, out, _ = run(capsys, "verify", "--model-file", str(path), "--samples", "50")
    assert code == 0
    assert json.loads(out)["model"] == "filemodel"


def test_oracle_diff_ok(capsys):
    code, out, err = run(capsys, "oracle-diff", "--model", "bounded3", "--p", "2", "--kmax", "20")
    assert code == 0 and err == ""
    assert {r["diff"] for r in rows(out)} == {"0"}


def test_oracle_diff_double_half_p3(capsys):
    code, out, _ = run(capsys, "oracle-diff", "--model", "double_half3", "--p", "3", "--kmax", "12")
    table = rows(out)
    assert code == 0
    assert min(int(r["k"]) for r in table) == 1


@pytest.mark.parametrize("argv", [
    ["--model", "bounded3", "--d", "4"],
    ["--model", "random"],
    ["--model", "double_half3", "--p", "5"],
])
def test_oracle_diff_config_errors(capsys, argv):
    assert run(capsys, "oracle-diff", "--kmax", "3", *argv)[0] == 1


def test_plot_data_bounded_W(capsys):
    code, out, _ = run(capsys, "plot-data", "--model", "bounded3", "--functional", "W", "--kmax", "10")
    data = [l.split("\t") for l in out.splitlines() if l and not l.startswith("#")]
    assert code == 0 and len(data) == 10
    values = [float(v) for _, v in data]
    assert values == sorted(values) and len(set(values)) == 10


def test_plot_data_energy_approaches_three(capsys):
    _, out, _ = run(capsys, "plot-data", "--model", "needweight3", "--functional", "E", "--kmax", "30")
    last = [l for l in out.splitlines() if l and not l.startswith("#")][-1]
    assert abs(float(last.split("\t")[1]) - 3) < 1e-8


def test_plot_data_linear_limit(capsys):
    _, out, _ = run(capsys, "plot-data", "--model", "linear2", "--a", "1", "--b", "2", "--functional", "W",
                    "--kmax", "40")
    data = [l.split("\t") for l in out.splitlines() if l and not l.startswith("#")]
    for k, v in data:
        assert float(v) == pytest.approx(1 - 4 / int(k) ** 2, rel=1e-14, abs=1e-14)


def test_depth_error_exit_three(capsys, tmp_path):
    path = tmp_path / "t.json"
    path.write_text(json.dumps({
        "d": 3, "K": 1, "root": {"u0": "0", "children": ["1", "-1", "0"]},
        "splitter": {"kind": "table", "table": []},
    }))
    assert run(capsys, "sweep", "--model-file", str(path), "--kmax", "3")[0] == 3


def test_out_file_and_determinism(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"o{i}.json"
        assert main(["sweep", "--model", "random", "--seed", "7", "--d", "5", "--kmax", "6",
                     "--format", "json", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "treemono", "sweep", "--model", "bounded3", "--kmax", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.startswith("k,functional")
