from __future__ import annotations

import json
import subprocess
import sys

import pytest

from costreach import rprs
from costreach.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_bounded(capsys, basic_path):
    code, out, err = run(capsys, "check", "--system", basic_path, "--from", "a*a", "--to", "")
    assert code == 0
    assert out == '{"verdict":"bounded","bound":2}\n'
    assert err == ""


def test_check_unbounded(capsys, basic, tmp_path):
    path = tmp_path / "minus.rprs"
    path.write_text(basic.without("b", "a").to_text())
    code, out, _ = run(capsys, "check", "--system", str(path), "--from", "a*a", "--to", "")
    assert code == 1
    data = json.loads(out)
    assert data["verdict"] == "unbounded"
    assert set(data["counterexample"]) <= {"a"}


def test_check_text_format(capsys, basic_path):
    code, out, _ = run(capsys, "check", "--system", basic_path, "--from", "a", "--to", "", "--format", "text")
    assert code == 0 and out.startswith("bounded")


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "--from", "a", "--to", ""],
        ["check", "--system", "SYS", "--from", "(a", "--to", ""],
        ["check", "--system", "SYS", "--from", "c", "--to", ""],
        ["mincost", "--system", "SYS", "--pair", "c", ""],
        ["check", "--system", "/nonexistent", "--from", "a", "--to", ""],
        ["eval", "--formula", "forall x. x = x"],
        ["eval", "--system", "SYS", "--formula", "!R(x)"],
        ["frobnicate"],
    ],
)
def test_usage_errors(capsys, basic_path, argv):
    argv = [basic_path if a == "SYS" else a for a in argv]
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == ""
    assert err


def test_bad_system_file(capsys, tmp_path):
    p = tmp_path / "bad.rprs"
    p.write_text("alphabet: a\ncounters: c\nrule: a -> b [i]\n")
    code, out, err = run(capsys, "mincost", "--system", str(p), "--pair", "a", "")
    assert code == 2 and "unknown symbol" in err and "line 3" in err


@pytest.mark.parametrize("u,v,value", [("aaa", "", 2), ("b", "a", 0), ("", "a", "inf")])
def test_mincost(capsys, basic_path, u, v, value):
    code, out, _ = run(capsys, "mincost", "--system", basic_path, "--pair", u, v)
    assert code == 0
    assert json.loads(out) == {"value": value}


def test_mincost_no_refl(capsys, basic_path):
    _, out, _ = run(capsys, "mincost", "--system", basic_path, "--pair", "a", "a", "--no-refl")
    assert json.loads(out) == {"value": 1}


def test_eval_system_sentence(capsys, basic_path):
    code, out, _ = run(
        capsys,
        "eval",
        "--system", basic_path,
        "--set", "Abar=(|(a|b)*b(a|b)*)",
        "--set", "B=",
        "--formula", "forall x. exists y. Abar(x) | (B(y) & Reach(x,y))",
    )
    assert code == 0
    assert json.loads(out) == {"finite": True, "value": 2}


def test_eval_free_variables(capsys, basic_path):
    code, out, _ = run(
        capsys, "eval", "--system", basic_path, "--set", "B=", "--formula", "exists y. B(y) & Reach(x, y)", "--bind", "x=aaa"
    )
    data = json.loads(out)
    assert code == 0 and data["value"] <= 2 <= data["value"] + data["slack"]
    code, _, err = run(capsys, "eval", "--system", basic_path, "--formula", "Reach(x, y)", "--bind", "x=a")
    assert code == 2 and "missing" in err


def test_eval_structure(capsys, tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({
        "universe": ["u", "v"],
        "relations": {"R": {"arity": 2, "entries": [[["u", "v"], 3], [["v", "u"], 1]]}},
    }))
    code, out, _ = run(capsys, "eval", "--structure", str(p), "--formula", "forall x. exists y. R(x, y)")
    assert code == 0 and json.loads(out) == {"value": 3}
    code, out, _ = run(capsys, "eval", "--structure", str(p), "--formula", "R(x, y)", "--bind", "x=v", "--bind", "y=u")
    assert json.loads(out) == {"value": 1}
    code, out, _ = run(capsys, "eval", "--structure", str(p), "--formula", "exists x. R(x, x)", "--format", "text")
    assert out.strip() == "value: inf"


def test_export(capsys, basic_path, tmp_path):
    code, out, _ = run(capsys, "export", "--system", basic_path, "--what", "transducer", "--format", "dot")
    assert code == 0 and out.startswith("digraph") and out.rstrip().endswith("}")
    code, out, _ = run(capsys, "export", "--system", basic_path, "--what", "approx", "--format", "json")
    data = json.loads(out)
    assert len(data["transitions"]) == 1330
    target = tmp_path / "sat.dot"
    code, out, _ = run(capsys, "export", "--system", basic_path, "--what", "saturation", "-o", str(target))
    assert code == 0 and out == "" and target.read_text().startswith("digraph")
    code, _, err = run(capsys, "export", "--system", basic_path, "--what", "saturation", "--format", "json")
    assert code == 2


def test_deterministic_output(basic_path):
    cmd = [sys.executable, "-m", "costreach", "export", "--system", basic_path, "--what", "approx", "--format", "json"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b


def test_module_entry_point_exit_codes(basic_path):
    ok = subprocess.run([sys.executable, "-m", "costreach", "mincost", "--system", basic_path, "--pair", "b", "a"], capture_output=True, text=True)
    assert ok.returncode == 0 and ok.stdout == '{"value":0}\n'
    bad = subprocess.run([sys.executable, "-m", "costreach", "check", "--system", basic_path, "--from", "(", "--to", ""], capture_output=True, text=True)
    assert bad.returncode == 2 and bad.stdout == "" and "error" in bad.stderr


def test_example_system_file_matches(basic_path):
    assert rprs.load_system(basic_path) == rprs.example_system()
