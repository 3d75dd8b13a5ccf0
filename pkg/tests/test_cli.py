import json
import subprocess
import sys

import pytest

from herdability.cli import main
from herdability.generators import two_level_tree
from herdability.matrix import RationalMatrix
from herdability.report import ModelError, dump_report, load_report, model_to_dict, parse_model, verify_report
from conftest import two_level_rows


def write_model(tmp_path, data, name="model.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def two_level_model(a, b, c):
    return {"n": 6, "A": two_level_rows(a, b, c), "B": {"leaders": [1]}, "metadata": {"name": "two-level"}}


def run(argv, capsys):
    code = main(argv)
    return code, capsys.readouterr()


def strip_timing(text):
    data = json.loads(text)
    data.pop("timing", None)
    return data


def test_parse_model_small():
    pair = parse_model('{"n":2,"A":[[0,"1/2"],[1,0]],"B":{"leaders":[1]}}')
    assert pair.A == RationalMatrix([[0, "1/2"], [1, 0]])
    assert pair.leaders == (0,)
    assert pair.B == RationalMatrix([[1], [0]])


def test_parse_model_two_level_block_form():
    pair = parse_model(json.dumps(two_level_model(1, 1, 1)))
    assert pair.A == two_level_tree(1, 1, 1).A
    assert pair.B == two_level_tree(1, 1, 1).B


@pytest.mark.parametrize("text, path", [
    ('{"n":2,"A":[[0,"0.5"],[1,0]],"B":{"leaders":[1]}}', "A[0][1]"),
    ('{"n":2,"A":[[0,0.5],[1,0]],"B":{"leaders":[1]}}', "A[0][1]"),
    ('{"n":2,"A":[[0,1,2],[1,0]],"B":{"leaders":[1]}}', "A[0]"),
    ('{"n":2,"A":[[0,1]],"B":{"leaders":[1]}}', "A"),
    ('{"n":2,"A":[[0,1],[1,0]],"B":{"leaders":[3]}}', "B.leaders[0]"),
    ('{"n":2,"A":[[0,1],[1,0]],"B":{"leaders":[2,1]}}', "B.leaders"),
    ('{"n":2,"A":[[0,"1/0"],[1,0]],"B":{"leaders":[1]}}', "A[0][1]"),
    ('{"n":2,"A":[[0,1],[1,0]]}', "B"),
])
def test_parse_model_errors_name_the_field(text, path):
    with pytest.raises(ModelError) as info:
        parse_model(text)
    assert info.value.path == path
    assert path in str(info.value)


def test_parse_model_syntax_error_has_line():
    with pytest.raises(ModelError) as info:
        parse_model('{"n": 2,\n "A": [[0, 1],\n [1, 0]\n')
    assert info.value.line is not None


def test_model_round_trip():
    pair = parse_model(json.dumps(two_level_model(-3, 2, "5/2")))
    again = parse_model(json.dumps(model_to_dict(pair)))
    assert again == pair


def test_check_exit_codes(tmp_path, capsys):
    assert run(["check", write_model(tmp_path, two_level_model(1, 1, 1))], capsys)[0] == 0
    code, out = run(["check", write_model(tmp_path, two_level_model(1, 1, -1))], capsys)
    assert code == 3
    assert "not herdable" in out.out


def test_balance_all_positive(tmp_path, capsys):
    model = {"n": 3, "A": [[0, 1, 0], [1, 0, 2], [0, 2, 0]], "B": {"leaders": [1]}}
    code, out = run(["balance", "--format", "json", write_model(tmp_path, model)], capsys)
    assert code == 0
    block = json.loads(out.out)["balance"]["clustering"]
    assert block["clusters"] == [[1, 2, 3]] and block["single_cluster"]


def test_tree_command(tmp_path, capsys):
    model = {"n": 3, "A": [[0, 1, 0], [1, 0, 1], [0, 1, 0]], "B": {"leaders": [2]}}
    code, out = run(["tree", "--leader", "2", "--format", "json", write_model(tmp_path, model)], capsys)
    assert code == 0
    tree = json.loads(out.out)["tree"]
    assert tree["layers"] == [[1, 3]] and tree["depth"] == 1


def test_tree_rejects_non_tree(tmp_path, capsys):
    model = {"n": 3, "A": [[0, 1, 1], [1, 0, 1], [1, 1, 0]], "B": {"leaders": [1]}}
    assert run(["tree", "--leader", "1", write_model(tmp_path, model)], capsys)[0] == 2


def test_input_errors_exit_2(tmp_path, capsys):
    assert run(["check", str(tmp_path / "missing.json")], capsys)[0] == 2
    bad = write_model(tmp_path, {"n": 1, "A": [["0.5"]], "B": {"leaders": [1]}})
    code, out = run(["check", bad], capsys)
    assert code == 2 and "A[0][0]" in out.err


def test_unknown_command_and_flag(capsys):
    with pytest.raises(SystemExit) as info:
        main(["herd"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["check", "--bogus", "x.json"])
    assert info.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_report_determinism(tmp_path, capsys):
    model = write_model(tmp_path, two_level_model(1, 1, 1))
    for cmd in (["check"], ["criteria"], ["design", "--max-size", "2"], ["synthesize"]):
        first = run(cmd + ["--format", "json", model], capsys)[1].out
        second = run(cmd + ["--format", "json", model], capsys)[1].out
        assert strip_timing(first) == strip_timing(second)
        assert "timing" in json.loads(first)


def test_report_file_matches_stdout(tmp_path, capsys):
    model = write_model(tmp_path, two_level_model(1, 1, 1))
    report_path = tmp_path / "r.json"
    out = run(["criteria", "--format", "json", "--report", str(report_path), model], capsys)[1].out
    assert strip_timing(report_path.read_text()) == strip_timing(out)
    report = load_report(report_path.read_text())
    assert report == json.loads(dump_report(report))
    assert report["consistent"] is True
    assert [c["criterion"] for c in report["criteria"]][-1] in ("tree-depth2", "diagonal-pair")


@pytest.mark.parametrize("cmd", [["check"], ["criteria"], ["design", "--max-size", "2"], ["synthesize", "--h", "3/2"]])
def test_verify_report_accepts_own_reports(tmp_path, capsys, cmd):
    for c in (1, -1):
        model = write_model(tmp_path, two_level_model(1, 1, c))
        report_path = str(tmp_path / "r.json")
        run(cmd + ["--report", report_path, model], capsys)
        code, out = run(["verify-report", report_path, model], capsys)
        assert code == 0, out.out


def test_verify_report_catches_tampering(tmp_path, capsys):
    model = write_model(tmp_path, two_level_model(1, 1, 1))
    report_path = tmp_path / "r.json"
    run(["check", "--report", str(report_path), model], capsys)
    report = json.loads(report_path.read_text())
    report["certificates"][0]["vector"] = ["0"] * len(report["certificates"][0]["vector"])
    report_path.write_text(json.dumps(report))
    assert run(["verify-report", str(report_path), model], capsys)[0] == 4


def test_verify_report_catches_wrong_plan(tmp_path, capsys):
    model = write_model(tmp_path, two_level_model(1, 1, 1))
    report_path = tmp_path / "r.json"
    run(["synthesize", "--report", str(report_path), model], capsys)
    report = json.loads(report_path.read_text())
    report["plan"]["inputs"][-1] = ["0"]
    failures = verify_report(report, parse_model(json.dumps(two_level_model(1, 1, 1))))
    assert failures


def test_synthesize_with_x0(tmp_path, capsys):
    model = write_model(tmp_path, {"n": 1, "A": [[1]], "B": {"leaders": [1]}})
    x0 = tmp_path / "x0.json"
    x0.write_text('[-5]')
    code, out = run(["synthesize", "--x0", str(x0), "--h", "2", "--format", "json", model], capsys)
    assert code == 0
    plan = json.loads(out.out)["plan"]
    assert plan["inputs"] == [["7"]] and plan["predicted_final_state"] == ["2"]
    x0.write_text('[0.5]')
    assert run(["synthesize", "--x0", str(x0), model], capsys)[0] == 2


def test_synthesize_not_herdable(tmp_path, capsys):
    assert run(["synthesize", write_model(tmp_path, two_level_model(1, 1, -1))], capsys)[0] == 3


def test_design_text(tmp_path, capsys):
    model = write_model(tmp_path, {"n": 2, "A": [[1, 0], [0, 1]], "B": {"leaders": [1]}})
    code, out = run(["design", model], capsys)
    assert code == 0
    assert "{1, 2}" in out.out


def test_fuzz(capsys):
    code, out = run(["fuzz", "--seed", "7", "--count", "30", "--format", "json"], capsys)
    data = json.loads(out.out)
    assert code == 0 and data["failures"] == [] and data["count"] == 30


def test_module_entry_point(tmp_path):
    model = write_model(tmp_path, two_level_model(1, 1, 1))
    proc = subprocess.run([sys.executable, "-m", "herdability", "check", model], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("verdict: herdable")
