import json
import subprocess
import sys

import pytest

from conecert.cli import main, run_command


@pytest.fixture
def tiny_file(tmp_path):
    doc = {
        "dimensions": {"p": 1, "q": 1, "r": 1},
        "points": [
            {"label": "a", "f": [[0]], "g": [[0]], "h": [[0]]},
            {"label": "b", "f": [[1]], "g": [[0]], "h": [[0]]},
        ],
    }
    p = tmp_path / "tiny.json"
    p.write_text(json.dumps(doc))
    return str(p)


@pytest.fixture(scope="module")
def example_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("ex") / "ex21.json"
    assert main(["example21", "-o", str(path)]) == 0
    return str(path)


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.startswith("{") else out)


def test_example21_then_classify(capsys, example_file):
    code, rep = run(capsys, ["classify", example_file, "--claim", "subconvexlike"])
    assert code == 1
    w = rep["result"]["verdicts"]["subconvexlike"]["witness"]
    assert w is not None and set(w) == {"p1", "p2", "lambda", "midpoint"}
    code, rep = run(capsys, ["classify", example_file, "--claim", "presubconvexlike"])
    assert code == 2
    assert rep["result"]["verdicts"]["presubconvexlike"]["status"] == "NoCounterexampleFound"
    assert rep["parameters"]["pairs"] == 10000


def test_certify_tiny(capsys, tiny_file):
    code, rep = run(capsys, ["certify", tiny_file, "--xbar", "a"])
    assert code == 0
    assert rep["result"]["certificate"]["xi"] == [1.0]
    assert rep["result"]["certificate"]["normalization"] == "N1"
    assert all(rep["clauses"].values())


def test_unknown_flag_is_an_input_error(capsys, tiny_file):
    assert main(["certify", tiny_file, "--bogus"]) == 3
    assert main(["nosuchcommand"]) == 3


def test_bad_files_exit_3(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["feasible", str(bad)]) == 3
    assert main(["feasible", str(tmp_path / "missing.json")]) == 3
    bad.write_text(json.dumps({"dimensions": {"p": 1, "q": 1, "r": 0},
                               "points": [{"label": "a", "f": [[0]], "g": [[0, 1]]}]}))
    assert main(["feasible", str(bad)]) == 3
    assert "g[0]" in capsys.readouterr().err


def test_infeasible_xbar_is_an_input_error(tmp_path, capsys):
    doc = {"dimensions": {"p": 1, "q": 1, "r": 0},
           "points": [{"label": "a", "f": [[0]], "g": [[1]]}, {"label": "b", "f": [[0]], "g": [[-1]]}]}
    p = tmp_path / "i.json"
    p.write_text(json.dumps(doc))
    assert main(["certify", str(p), "--xbar", "a"]) == 3
    assert main(["certify", str(p), "--xbar", "zz"]) == 3


@pytest.mark.parametrize(
    "argv,code",
    [
        (["feasible"], 0),
        (["cq", "--xbar", "a", "--nnamcq"], 1),
        (["cq", "--xbar", "a", "--scq", "--directions", "40"], 1),
        (["scalarize", "--xi", "1"], 0),
        (["vector-lagrangian", "--xbar", "a", "--directions", "20"], 0),
        (["characterize", "--xbar", "a", "--directions", "20"], 2),
        (["certify"], 0),
        (["certify", "--xbar", "b"], 1),
    ],
)
def test_commands_and_verify(capsys, tmp_path, tiny_file, argv, code):
    saved = tmp_path / "report.json"
    got, rep = run(capsys, [argv[0], tiny_file, *argv[1:], "--save-report", str(saved), "--pairs", "300"])
    assert got == code
    assert rep["exit_code"] == code
    assert rep["instance_digest"] and rep["schema"] == "conecert/1"
    vcode, vrep = run(capsys, ["verify", "--report", str(saved)])
    assert vcode == 0, vrep["result"]["checks"]


def test_verify_detects_tampering(capsys, tmp_path, tiny_file):
    saved = tmp_path / "r.json"
    run(capsys, ["certify", tiny_file, "--xbar", "a", "--save-report", str(saved), "--pairs", "300"])
    rep = json.loads(saved.read_text())
    rep["result"]["certificate"]["xi"] = [2.0]
    saved.write_text(json.dumps(rep))
    code, out = run(capsys, ["verify", "--report", str(saved)])
    assert code == 1
    assert not out["result"]["checks"]["result"]


def test_verify_classify_witness(capsys, tmp_path, example_file):
    saved = tmp_path / "c.json"
    run(capsys, ["classify", example_file, "--pairs", "500", "--save-report", str(saved)])
    code, out = run(capsys, ["verify", "--report", str(saved)])
    assert code == 0
    assert out["result"]["checks"]["subconvexlike_witness"]


def test_json_is_byte_identical_modulo_clock(capsys, tiny_file):
    outs = []
    for _ in range(2):
        main(["characterize", tiny_file, "--xbar", "a", "--directions", "30", "--pairs", "300"])
        rep = json.loads(capsys.readouterr().out)
        rep.pop("wall_clock_s")
        outs.append(json.dumps(rep, sort_keys=True))
    assert outs[0] == outs[1]


def test_text_and_json_carry_the_same_facts(capsys, tiny_file):
    _, rep = run(capsys, ["scalarize", tiny_file, "--xi", "1"])
    _, text = run(capsys, ["scalarize", tiny_file, "--xi", "1", "--format", "text"])
    assert "result.argmin: ['a']" in text
    assert f"instance_digest: {rep['instance_digest']}" in text
    assert "status: solved" in text


def test_global_flags_echoed(capsys, tiny_file):
    _, rep = run(capsys, ["--tol", "1e-8", "feasible", tiny_file, "--margin", "1e-6"])
    assert rep["parameters"]["tol"] == 1e-8 and rep["parameters"]["margin"] == 1e-6


def test_lambda_grid_flag(capsys, tiny_file):
    _, rep = run(capsys, ["classify", tiny_file, "--lambda-grid", "0.5", "--pairs", "50"])
    assert rep["parameters"]["lambda_grid"] == [0.5]
    assert main(["classify", tiny_file, "--lambda-grid", "1.5"]) == 3


def test_campaign_command(capsys):
    code, rep = run(capsys, ["campaign", "--seeds", "0..9", "--family", "chain"])
    assert code == 0
    assert rep["result"]["results"]["necessity"]["cases"] == 10
    code, rep = run(capsys, ["campaign", "--seeds", "0..19", "--family", "general"])
    assert code == 0 and rep["result"]["suite"] == "exclusivity"


def test_run_command_returns_report(tiny_file):
    code, rep = run_command(["feasible", tiny_file])
    assert code == 0 and rep["result"]["domain"] == ["a", "b"]


def test_module_entry_point(tiny_file):
    proc = subprocess.run([sys.executable, "-m", "conecert", "feasible", tiny_file],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["command"] == "feasible"
