import json

import pytest

from isocalc.cli import main

GAUSS = {"kind": "quadratic", "t": 0, "q": 1}


def run(capsys, argv, payload=None, tmp_path=None):
    if payload is not None:
        path = tmp_path / "in.json"
        path.write_text(json.dumps(payload))
        argv = argv + ["-i", str(path)]
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


def test_order_mul(capsys, tmp_path):
    code, doc = run(capsys, ["order", "--op", "mul"], {"order": GAUSS, "x": {"a": "1", "b": "1"}, "y": {"a": "1", "b": "-1"}}, tmp_path)
    assert code == 0 and doc["ok"]
    assert doc["result"] == {"a": "2", "b": "0"}
    assert doc["schema_version"] == 1


def test_det_and_dual(capsys, tmp_path):
    m = {"order": {"kind": "rational"}, "entries": [["1", "-1"], ["0", "2"]]}
    code, doc = run(capsys, ["det"], m, tmp_path)
    assert code == 0 and doc["ker_cardinality"] == "4" and doc["rank"] == 2
    code, doc = run(capsys, ["dual", "--check-kernel"], m, tmp_path)
    assert code == 0 and doc["alpha"] == "2"
    assert doc["kernel_count"] == doc["det_norm"] == "4"


def test_saturate_and_degree(capsys, tmp_path):
    psi = {"order": {"kind": "rational"}, "entries": [["1", "0", "3", "1"], ["0", "1", "5", "0"]]}
    code, doc = run(capsys, ["saturate"], {"psi": psi}, tmp_path)
    assert code == 0 and doc["verified"] is True
    # n rounds for each of the two repaired columns
    assert doc["J"] == [0, 1, 2, 3] and len(doc["trace"]) == 4
    code, doc = run(capsys, ["saturate", "--for-H", "1"], {"order": {"kind": "rational"}, "entries": [["1", "0"], ["0", "1"]]}, tmp_path)
    assert code == 0 and doc["verified"] is True
    assert doc["T"]["entries"] != [["1", "0"], ["0", "1"]]
    code, doc = run(capsys, ["degree"], {"psi": {"order": {"kind": "rational"}, "entries": [["2", "0"], ["0", "1"]]}}, tmp_path)
    # pullback of O_2 by diag(2,1): 2! * norm(2) = 8
    assert code == 0 and doc["degree"] == "8"


def test_bound_example(capsys):
    code, doc = run(capsys, ["bound", "--kind", "thm2", "--N", "3", "--n", "2", "--d", "1", "--degH", "8", "--degV", "10"])
    assert code == 0 and doc["ok"]
    assert doc["value"].startswith("8.543389425429278992920637831")
    assert doc["conditional_on"] == "c0"
    assert [s["name"] for s in doc["derivation"]][:2] == ["kappa", "c1"]


def test_pipeline_random(capsys):
    argv = ["pipeline", "--random", "3", "2", "--d", "1", "--degV", "10", "--seed", "3"]
    code, first = run(capsys, argv)
    code2, second = run(capsys, argv)
    assert code == code2 == 0
    assert first == second and first["ok"]


def test_verify(capsys):
    code, doc = run(capsys, ["verify", "--seed", "7", "--trials", "10"])
    assert code == 0 and doc["ok"]
    assert set(doc["checks"]) == {"saturation", "dual", "kernel_count", "degrees"}


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["bound", "--N", "3"],
        ["det"],
        ["det", "-i", "/nonexistent/file.json"],
        ["bound", "--N", "3", "--n", "2", "--d", "1", "--degV", "2", "--precision", "4"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, doc = run(capsys, argv)
    assert code == 2 and doc["error"] == "usage" and not doc["ok"]


def test_domain_errors_exit_1(capsys, tmp_path):
    code, doc = run(capsys, ["bound", "--N", "3", "--n", "2", "--d", "2", "--degV", "2", "--degH", "2"])
    assert code == 1 and doc["error"] == "InvalidParams"
    singular = {"order": {"kind": "rational"}, "entries": [["1", "1"], ["1", "1"]]}
    code, doc = run(capsys, ["dual"], singular, tmp_path)
    assert code == 1 and not doc["ok"]
    phi = {"order": {"kind": "rational"}, "entries": [["1", "-1", "0"], ["0", "1", "0"], ["0", "0", "1"]]}
    code, doc = run(capsys, ["pipeline", "--d", "1", "--degV", "0"], {"phi": phi, "n": 2}, tmp_path)
    assert code == 1 and doc["stage"] == "bound"


def test_bad_json_is_usage_error(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    code, doc = run(capsys, ["det", "-i", str(path)])
    assert code == 2
