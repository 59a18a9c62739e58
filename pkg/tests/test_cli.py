import io
import json
import subprocess
from fractions import Fraction
import sys
from pathlib import Path

import pytest

from multicontext.cli import main, parse_bindings
from multicontext.document import load_document, parse_model, serialize
from multicontext.errors import ValidationError
from multicontext.model import Assignment

MODELS = Path(__file__).resolve().parent.parent / "models"


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, json.loads(out.getvalue())


def var(n):
    return {"name": n, "values": ["0", "1"]}


def ctx(cid, scope, rows):
    return {"id": cid, "scope": scope,
            "table": [{"assign": dict(zip(scope, k)), "p": p} for k, p in rows.items()]}


def write(tmp_path, doc, name="m.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def uniform(cid, scope):
    n = 2 ** len(scope)
    keys = [format(i, f"0{len(scope)}b") for i in range(n)]
    return ctx(cid, scope, {k: f"1/{n}" for k in keys})


def test_parse_bindings():
    assert parse_bindings("x=1, y=0") == Assignment.of(x="1", y="0")
    assert parse_bindings("") == Assignment()
    with pytest.raises(ValidationError):
        parse_bindings("x")
    with pytest.raises(ValidationError):
        parse_bindings("x=1,x=0")


def test_query_disjoint_document():
    code, doc = run("query", MODELS / "disjoint.json", "--target", "y=1", "--evidence", "x=1")
    assert code == 0
    assert doc == {
        "lower": "2/3", "upper": "1", "lower_approx": 0.6667, "upper_approx": 1.0,
        "identified": ["y", "x"], "method": "closed_form_disjoint", "notes": [],
    }


def test_negated_target_respects_duality():
    _, pos = run("query", MODELS / "disjoint.json", "--target", "y=1", "--evidence", "x=1")
    _, neg = run("query", MODELS / "disjoint.json", "--target", "y=1", "--negate-target", "--evidence", "x=1")
    assert (neg["lower"], neg["upper"]) == ("0", "1/3")
    assert Fraction(pos["upper"]) == 1 - Fraction(neg["lower"])


def test_check_oracle_flag():
    code, doc = run("query", MODELS / "overlap.json", "--target", "x=1", "--evidence", "y=1,z=1",
                    "--check-oracle")
    assert code == 0 and doc["oracle_agrees"] is True
    assert doc["lower"] == "6/7" and doc["method"] == "closed_form_overlap"
    assert "closed-form result agrees with the full-joint LP" in doc["notes"]


def test_modes_and_methods():
    code, doc = run("query", MODELS / "chained.json", "--target", "x=1", "--evidence", "y=1,r=1",
                    "--mode", "min", "--method", "lp")
    assert code == 0 and doc["lower"] == "3/4" and doc["upper"] is None and doc["method"] == "lp"
    _, doc = run("query", MODELS / "chained.json", "--target", "x=1", "--evidence", "y=1,r=1",
                 "--method", "closed-form")
    assert doc["method"] == "chained" and doc["lower"] == "3/4"


def test_identify_and_marginalize():
    code, doc = run("identify", MODELS / "overlap.json", "--target", "x=1", "--evidence", "y=1")
    assert code == 0 and doc["identified"] == ["x", "y", "z"] and doc["atoms"] == 8
    code, doc = run("marginalize", MODELS / "chained.json", "--context", "A", "--vars", "r")
    assert code == 0
    assert doc["table"] == [{"assign": {"r": "0"}, "p": "1/2"}, {"assign": {"r": "1"}, "p": "1/2"}]
    code, doc = run("marginalize", MODELS / "chained.json", "--context", "Q", "--vars", "r")
    assert code == 2


def test_plan_order_commands():
    code, doc = run("plan-order", "--scope", "a,b", "--scope", "c,d", "--scope", "b,c")
    assert code == 0 and doc["order"] == ["a,b", "b,c", "c,d"]
    code, doc = run("plan-order", "--scope", "x,y", "--scope", "y,z", "--scope", "x,z")
    assert code == 0 and doc == {"exists": False, "order": None, "message": "none exists"}
    code, doc = run("plan-order", MODELS / "chained.json")
    assert doc["order"] == ["A", "B"]


def test_consistency_command(tmp_path):
    assert run("consistency", MODELS / "overlap.json") == (0, {"feasible": True})
    code, doc = run("consistency", MODELS / "triangle.json")
    assert code == 3 and doc["witness"] == ["A", "B", "C"]


def test_authored_inconsistent_model_exit_code():
    code, doc = run("validate", MODELS / "triangle.json")
    assert code == 3 and doc["error"]["code"] == "inconsistent"


def test_generative_failure_names_position(tmp_path):
    doc = {"variables": [var("x"), var("y"), var("z")], "mode": "generative",
           "contexts": [uniform("A", ["x", "y"]), uniform("B", ["y", "z"]), uniform("C", ["x", "z"])]}
    code, out = run("validate", write(tmp_path, doc))
    assert code == 2
    (msg,) = out["error"]["messages"]
    assert msg.startswith("free-assignment violated at context 3: induced part spans multiple contexts")
    assert out["error"]["code"] == "free_assignment_spanning"


def test_mismatch_and_tolerance(tmp_path):
    b = ctx("B", ["y", "z"], {"11": "51/200", "10": "1/4", "01": "1/4", "00": "49/200"})
    doc = {"variables": [var("x"), var("y"), var("z")], "contexts": [uniform("A", ["x", "y"]), b]}
    path = write(tmp_path, doc)
    code, out = run("validate", path)
    assert code == 2 and out["error"]["code"] == "free_assignment_mismatch"
    assert run("validate", path, "--tolerance", "1/100")[0] == 0
    assert run("validate", path, "--tolerance", "-1")[0] == 2


def test_table_issues_are_reported_with_atoms(tmp_path):
    bad = {"id": "A", "scope": ["x", "y"], "table": [
        {"assign": {"x": "1", "y": "1"}, "p": "1/2"},
        {"assign": {"x": "1", "y": "1"}, "p": "1/4"},
        {"assign": {"x": "0", "y": "0"}, "p": "1/4"},
    ]}
    code, out = run("validate", write(tmp_path, {"variables": [var("x"), var("y")], "contexts": [bad]}))
    assert code == 2
    codes = {(i["code"], json.dumps(i.get("atom"), sort_keys=True)) for i in out["error"]["issues"]}
    assert ("duplicate_atom", '{"x": "1", "y": "1"}') in codes
    assert ("missing_atom", '{"x": "0", "y": "1"}') in codes
    assert ("missing_atom", '{"x": "1", "y": "0"}') in codes


def test_float_probability_rejected(tmp_path):
    doc = {"variables": [var("x")], "contexts": [
        {"id": "A", "scope": ["x"], "table": [{"assign": {"x": "1"}, "p": 0.5}, {"assign": {"x": "0"}, "p": "1/2"}]}]}
    code, out = run("validate", write(tmp_path, doc))
    assert code == 2 and out["error"]["issues"][0]["code"] == "binary_float"


def test_syntax_errors(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert run("validate", path)[0] == 2
    assert run("validate", tmp_path / "missing.json")[0] == 2


def test_decimal_parsed_exactly():
    mcm = parse_model((MODELS / "disjoint.json").read_text())
    assert mcm.context("X").table[("1",)] == Fraction(3, 5)
    doc = {"variables": [var("x")], "contexts": [ctx("A", ["x"], {"1": "0.25", "0": "0.75"})]}
    assert parse_model(json.dumps(doc)).context("A").table[("1",)] == Fraction(1, 4)


@pytest.mark.parametrize("name", ["disjoint.json", "overlap.json", "chained.json"])
def test_parse_serialize_round_trip(name):
    text = (MODELS / name).read_text()
    first = load_document(text)
    second = load_document(serialize(first))
    assert second == first
    assert serialize(second) == serialize(first)


def test_impossible_evidence_and_budget_exit_codes(tmp_path):
    doc = {"variables": [var("x"), var("y")], "contexts": [
        ctx("A", ["x"], {"1": "1", "0": "0"}), ctx("B", ["y"], {"1": "1/2", "0": "1/2"})]}
    path = write(tmp_path, doc)
    code, out = run("query", path, "--target", "y=1", "--evidence", "x=0")
    assert code == 4 and out["error"]["code"] == "impossible_evidence"
    code, out = run("query", path, "--target", "y=1", "--evidence", "x=1", "--method", "lp", "--atom-budget", "2")
    assert code == 5


def test_unknown_query_variable_exit_code():
    code, out = run("query", MODELS / "disjoint.json", "--target", "w=1")
    assert code == 2


def test_output_is_deterministic_across_processes():
    argv = [sys.executable, "-m", "multicontext", "query", str(MODELS / "overlap.json"),
            "--target", "x=1", "--evidence", "y=1", "--check-oracle"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second
    assert json.loads(first)["method"] == "lp"
