import io
import json
import subprocess
import sys

import pytest

from framization import RuleSystem, presentation, reduce
from framization import verify as verify_module
from framization.cli import main
from framization.verify import Item


def run(*argv, env=None):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, _ = run("--format", "json", *argv)
    return code, json.loads(out)


def test_reduce_prints_canonical_text():
    assert run("reduce", "--algebra", "bmw", "--n", "2", "g1*h1")[:2] == (0, "(1/l)*h1\n")


def test_bound():
    assert run("bound", "--d", "1", "--n", "2")[:2] == (0, "3\n")
    assert run_json("bound", "--d", "2", "--n", "2")[1]["bound"] == 28


def test_quartic_suite_exit_zero():
    code, doc = run_json("suite", "QUARTIC", "--algebra", "fbmw", "--d", "2")
    assert code == 0 and doc["passed"]
    assert all(item["verified"] for item in doc["items"])


def test_verify_exit_codes():
    assert run("verify", "--algebra", "bmw", "--n", "3", "h1*g2*h1", "l*h1")[0] == 0
    code, doc = run_json("verify", "--algebra", "bmw", "--n", "2", "g1", "h1")
    assert code == 1 and doc["verified"] is False and doc["residual"] == "-h1 + g1"


def test_failing_suite_item_gives_exit_one(monkeypatch):
    monkeypatch.setattr(verify_module, "_e_idempotent",
                        lambda d: [Item("forced failure", False, [], "g1")])
    code, doc = run_json("suite", "E_IDEMPOTENT", "--d", "2")
    assert code == 1
    assert doc["items"] == [{"name": "forced failure", "verified": False, "steps": [], "residual": "g1"}]


@pytest.mark.parametrize("argv", [
    ["reduce", "--algebra", "bmw", "--n", "2", "g3"],
    ["reduce", "--algebra", "bmw", "--n", "2", "g1 +"],
    ["reduce", "--algebra", "nope", "g1"],
    ["reduce", "--algebra", "bmw", "--d", "2", "g1"],
    ["reduce", "--algebra", "hb_cyc", "--n", "2", "T"],
    ["suite", "NOPE"],
    ["frob"],
    [],
    ["bound", "--d", "1"],
    ["reduce", "--param", "oops", "g1"],
])
def test_usage_errors_exit_two(argv):
    code, _, err = run(*argv)
    assert code == 2
    assert err.startswith("framization: error:")


def test_usage_errors_are_json_in_json_mode():
    code, out, err = run("--format", "json", "reduce", "--algebra", "bmw", "--n", "2", "g3")
    assert code == 2 and err == ""
    doc = json.loads(out)
    assert doc["kind"] == "usage" and "out of range" in doc["error"]


def test_exhaustion_exit_three(monkeypatch):
    code, doc = run_json("reduce", "--d", "2", "--n", "2", "--max-steps", "1", "g1*g1*g1")
    assert code == 3 and doc["exhausted"] is True
    monkeypatch.setenv("FRAMIZATION_MAX_STEPS", "1")
    assert run("reduce", "--d", "2", "--n", "2", "g1*g1*g1")[0] == 3
    monkeypatch.setenv("FRAMIZATION_MAX_STEPS", "x")
    assert run("reduce", "--d", "2", "--n", "2", "g1")[0] == 2


def test_env_cap_does_not_break_presentation(monkeypatch):
    monkeypatch.setenv("FRAMIZATION_MAX_STEPS", "3")
    assert run("presentation", "--algebra", "fbmw", "--d", "2", "--n", "3")[0] == 0


def test_trace_output():
    code, doc = run_json("reduce", "--algebra", "bmw", "--n", "2", "--trace", "g1*h1")
    assert code == 0
    assert [s["rule"] for s in doc["steps"]] == ["gh-absorb[g1 h1]"]
    assert doc["result"] == "(1/l)*h1"


def test_parameters_are_substituted():
    code, out, _ = run("reduce", "--algebra", "hecke", "--n", "2", "--param", "q=2", "g1*g1")
    assert (code, out) == (0, "2 + g1\n")


def test_nf_and_span():
    assert run("nf", "--d", "2", "--n", "3", "g1*t1")[:2] == (0, "t2^1*g1\n")
    code, doc = run_json("nf", "--d", "2", "--n", "2", "t2*t1")
    assert code == 0 and doc["framings"] == [1, 1] and doc["braid"] == "1"
    code, out, _ = run("span", "--d", "2", "--n", "3", "g2*t1*h1*t1*g2")
    assert (code, out) == (0, "G1*t2^1*h2*t2^1*G1\n")
    code, doc = run_json("span", "--d", "1", "--n", "2", "--enumerate")
    assert code == 0 and sorted(doc["elements"]) == ["1", "g1", "h1"] and doc["candidates"] == 3


def test_presentation_export(tmp_path):
    path = tmp_path / "hb.json"
    code, _, _ = run("presentation", "--algebra", "hb", "--n", "2", "--export", str(path))
    assert code == 0
    sys_ = RuleSystem.loads(path.read_text())
    assert sys_.to_json() == presentation("HB", 2).to_json()
    assert any(r["lhs"] == "T*T" and r["rhs"] == "Q + (Q - 1)*T" for r in json.loads(path.read_text())["rules"])
    x = sys_.ctx
    assert reduce(presentation("HB", 2).rules[0].rhs, sys_).final.ctx == x


def test_pairs_report_validates():
    from framization import validate_critical_pair_report

    code, doc = run_json("pairs", "--algebra", "fbmw", "--d", "2", "--n", "2")
    assert code == 0
    validate_critical_pair_report(doc)


def test_json_output_is_byte_identical():
    argv = ["--format", "json", "suite", "SPAN_CASES", "--d", "2", "--no-timing"]
    first, second = run(*argv)[1], run(*argv)[1]
    assert first == second
    assert "wall_time_ms" not in first
    argv = ["--format", "json", "reduce", "--d", "3", "--n", "3", "--trace", "g2*h1*t1^2*g2*h1"]
    assert run(*argv)[1] == run(*argv)[1]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "framization", "bound", "--d", "2", "--n", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == "28\n"
