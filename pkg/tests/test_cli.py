import json
import subprocess
import sys

import pytest

from edl.cli import dumps, main
from edl.graph import from_edge_list, write_graph
from edl.shifting import SetSystem, write_set_system


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def run_json(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 0, err
    doc = json.loads(out)
    assert doc["schema"] == "1"
    return doc


def test_bound(capsys):
    doc = run_json(["bound", "--r", "3", "--s", "3", "--p", "0.5"], capsys)
    assert doc["value"] == pytest.approx(0.125, abs=1e-12)
    assert doc["family"] == "Q" and doc["t"] == pytest.approx(0.5, abs=1e-12)
    assert doc["q"] == pytest.approx(0.5, abs=1e-12)


def test_maxmin(capsys):
    doc = run_json(["maxmin", "--r", "3"], capsys)
    assert doc["rho"] == pytest.approx(0.65270, abs=1e-5)


def test_threshold_command(tmp_path, capsys):
    path = tmp_path / "p4.txt"
    write_graph(from_edge_list(4, [(1, 2), (2, 3), (3, 4)]), path)
    doc = run_json(["threshold", "--in", str(path)], capsys)
    assert doc["threshold"] is False and doc["order"] is None
    write_graph(from_edge_list(3, [(1, 2)]), path)
    doc = run_json(["threshold", "--in", str(path)], capsys)
    assert doc["threshold"] is True and len(doc["order"]) == 3


def test_curve_csv(capsys):
    code, out, _ = run(["curve", "--r", "3", "--s", "3", "--steps", "3", "--format", "csv"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "theta,family,q_density,p_density"
    assert "0.5,Q,0.5,0.125" in lines
    assert len(lines) == 7


def test_curve_json_with_models(tmp_path, capsys):
    prof = tmp_path / "p.json"
    prof.write_text(json.dumps({"x": [0.5], "y": [0.5]}))
    step = tmp_path / "m.json"
    step.write_text(json.dumps({"x": 0.5, "breaks": [0.0, 1.0], "vals": [0.0]}))
    doc = run_json(["curve", "--r", "3", "--s", "3", "--steps", "401",
                    "--profile", str(prof), "--step-model", str(step)], capsys)
    assert doc["points"][0] == {"source": "profile", "q_density": 0.5, "p_density": 0.125}
    assert doc["points"][1]["q_density"] == pytest.approx(0.5)
    assert doc["intersection"]["p_density"] == pytest.approx(0.27807, abs=1e-4)


def test_optimize(capsys):
    doc = run_json(["optimize", "--a", "1", "--b", "1", "--r", "3", "--s", "3", "--k", "2",
                    "--starts", "8", "--seed", "1"], capsys)
    assert doc["value"] == pytest.approx(0.278066, abs=1e-6)
    assert set(doc["profile"]) == {"x", "y"} and doc["support"] in ("Q", "Qbar")


def test_shift_sets_text(tmp_path, capsys):
    src = tmp_path / "f.txt"
    write_set_system(SetSystem.from_sets(3, [{1, 2}, {2, 3}]), src)
    out_path = tmp_path / "g.txt"
    code, out, _ = run(["shift", "--in", str(src), "--kind", "sets", "--u", "2", "--v", "1",
                        "--format", "text", "--out", str(out_path)], capsys)
    assert code == 0 and out == "3 2\n1 2\n1 3\n"
    assert out_path.read_text() == out


def test_shift_graph_fixpoint(tmp_path, capsys):
    src = tmp_path / "c4.txt"
    write_graph(from_edge_list(4, [(1, 2), (2, 3), (3, 4), (1, 4)]), src)
    doc = run_json(["shift", "--in", str(src), "--fixpoint"], capsys)
    assert doc["shifted"] is True and doc["changed"] is True and len(doc["edges"]) == 4


def test_shift_usage_errors(tmp_path, capsys):
    src = tmp_path / "c4.txt"
    write_graph(from_edge_list(2, [(1, 2)]), src)
    assert run(["shift", "--in", str(src)], capsys)[0] == 2
    assert run(["shift", "--in", str(src), "--fixpoint", "--u", "1", "--v", "2"], capsys)[0] == 2
    assert run(["shift", "--in", str(src), "--u", "1"], capsys)[0] == 2
    code, _, err = run(["shift", "--in", str(src), "--u", "1", "--v", "5"], capsys)
    assert code == 1 and "outside" in err


def test_verify_json_and_csv(capsys):
    doc = run_json(["verify", "--suite", "goodman", "--max-n", "6"], capsys)
    assert doc["violations"] == 0 and doc["reports"][0]["suite"] == "goodman"
    code, out, _ = run(["verify", "--suite", "threshold", "--max-n", "4", "--format", "csv"], capsys)
    assert code == 0 and out.splitlines()[0] == "suite,trials,violations"


def test_verify_is_deterministic(capsys):
    argv = ["verify", "--suite", "copies", "--trials", "40", "--seed", "9"]
    assert run(argv, capsys)[1] == run(argv, capsys)[1]


@pytest.mark.parametrize("argv", [
    ["bound", "--r", "1", "--s", "3", "--p", "0.5"],
    ["bound", "--r", "3", "--s", "3", "--p", "1.5"],
    ["bound", "--r", "3", "--s", "3", "--p", "nan"],
    ["bound", "--r", "3", "--s", "3"],
    ["maxmin", "--r", "3", "--bogus"],
    ["optimize", "--a", "0", "--b", "1", "--r", "3", "--s", "3"],
    ["optimize", "--a", "1", "--b", "1", "--r", "3", "--s", "3", "--k", "9"],
    ["verify", "--suite", "nope"],
    ["--threads", "0", "maxmin", "--r", "3"],
    [],
])
def test_usage_errors(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 2 and out == "" and "error" in err


def test_usage_error_names_flag(capsys):
    _, _, err = run(["bound", "--r", "1", "--s", "3", "--p", "0.5"], capsys)
    assert "--r" in err


def test_domain_errors(tmp_path, capsys):
    assert run(["threshold", "--in", str(tmp_path / "missing.txt")], capsys)[0] == 1
    bad = tmp_path / "bad.txt"
    bad.write_text("3 1\n1 1\n")
    code, _, err = run(["threshold", "--in", str(bad)], capsys)
    assert code == 1 and "self-loop" in err


def test_byte_identical_output(capsys):
    argv = ["optimize", "--a", "2", "--b", "3", "--r", "3", "--s", "4", "--k", "2", "--starts", "4"]
    assert run(argv, capsys)[1] == run(argv, capsys)[1]


def test_float_format():
    text = dumps({"v": 0.1, "w": [1e-300, float("inf")], "n": 3, "b": True})
    assert '"v": 0.10000000000000001' in text
    doc = json.loads(text)
    assert doc["w"][0] == 1e-300 and doc["w"][1] is None and doc["b"] is True


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "edl", "maxmin", "--r", "4"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["schema"] == "1"
    assert proc.stderr == ""


def test_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("EDL_THREADS", "2")
    assert run_json(["maxmin", "--r", "3"], capsys)["value"] > 0
