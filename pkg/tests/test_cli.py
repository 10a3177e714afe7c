import json
from pathlib import Path

import pytest

from pssm.cli import main
from pssm.exact import parse_ratfunc, ratfunc_equal
from pssm.model import builtin_names, builtin_source

FIXTURES = Path(__file__).parent / "fixtures"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# ---------------------------------------------------------------- solve

def test_solve_complete_problem(capsys):
    code, out, _ = run(capsys, "solve", "--problem", "burgers-stationary")
    assert code == 0
    obj = json.loads(out)
    assert obj["schema"] == 1
    assert obj["table"]["a_3"] == "(a_0^2*a_1 + nu*a_1^2)/(6*nu^2)"


def test_solve_partial_problem_exports_the_rest(capsys):
    code, out, _ = run(capsys, "solve", "--problem", "boundary-layer")
    assert code == 2
    obj = json.loads(out)
    assert obj["complete"] is False and len(obj["unresolved"]) == 3


def test_solve_assumption_violated(capsys):
    code, out, err = run(capsys, "solve", "--problem", "burgers-stationary", "--set", "nu=0")
    assert code == 1 and out == ""
    assert "assumption violated" in err


def test_even_branch_table(capsys):
    code, out, _ = run(capsys, "solve", "--problem", "kdv", "--set", "a_1=0", "--format", "text")
    assert code == 0
    lines = dict(line.split(" = ", 1) for line in out.splitlines() if " = " in line)
    assert lines["a_3"] == "0" and lines["a_5"] == "0"
    assert ratfunc_equal(parse_ratfunc(lines["a_4"]), parse_ratfunc("-(6*a_0*a_2 - c*a_2)/(12*k^2)"))


def test_output_is_byte_identical(capsys):
    outs = {run(capsys, "solve", "--problem", "coupled-kdv")[1] for _ in range(3)}
    assert len(outs) == 1


@pytest.mark.parametrize("name", builtin_names())
def test_file_and_problem_are_interchangeable(capsys, tmp_path, name):
    path = tmp_path / f"{name}.pde"
    path.write_text(builtin_source(name))
    a = run(capsys, "export-system", "--problem", name)
    b = run(capsys, "export-system", "--file", str(path))
    assert a == b


def test_csv_and_out(capsys, tmp_path):
    target = tmp_path / "t.csv"
    code, out, _ = run(capsys, "solve", "--problem", "burgers-stationary", "--format", "csv", "--out", str(target))
    assert code == 0 and out == ""
    rows = target.read_text().splitlines()
    assert rows[0] == "symbol,value" and rows[1] == 'a_2,"a_0*a_1/(2*nu)"'
    assert len(rows) == 10


# ---------------------------------------------------------------- overrides and usage errors

def test_order_seeds_and_match_overrides(capsys):
    code, out, _ = run(capsys, "solve", "--problem", "kdv", "--order", "6", "--seeds", "U[0] U[1]",
                       "--format", "json")
    assert code == 2
    obj = json.loads(out)
    # five unknowns against four reliable equations leave one free
    assert obj["knowns"] == ["k", "c", "a_0", "a_1"]
    assert len(obj["free"]) == 1 and obj["unresolved"] == []
    code, out, _ = run(capsys, "export-system", "--problem", "kdv", "--match", "total_degree 2")
    assert code == 0
    assert len(json.loads(out)["equations"]) == 3


@pytest.mark.parametrize("argv, fragment", [
    (["solve", "--problem", "kdv", "--set", "a_9=1"], "a_9"),
    (["solve", "--problem", "kdv", "--set", "a_0"], "name=value"),
    (["solve", "--problem", "kdv", "--seeds", "U[12]"], "U[12]"),
    (["solve", "--problem", "kdv", "--match", "total_degree 7"], "reliable"),
    (["solve", "--problem", "kdv", "--policy", "quadratic=maybe"], "quadratic"),
    (["solve", "--problem", "heat"], "heat"),
    (["solve"], "--problem"),
    (["solve", "--file", "/nonexistent.pde"], "cannot read"),
])
def test_usage_errors(capsys, argv, fragment):
    code, out, err = run(capsys, *argv)
    assert code == 1 and out == ""
    assert err.startswith("error: ") and fragment in err


def test_colored_diagnostics(capsys, monkeypatch):
    monkeypatch.setenv("PSSM_COLOR", "1")
    _, _, err = run(capsys, "solve", "--problem", "heat")
    assert err.startswith("\x1b[31merror:")


# ---------------------------------------------------------------- verify

def test_verify_fixture(capsys):
    code, out, _ = run(capsys, "verify", "--problem", "boundary-layer",
                       "--candidate", str(FIXTURES / "boundary_layer_candidate.json"))
    assert code == 0
    assert json.loads(out)["all_zero"] is True


def test_verify_corrupted_fixture(capsys, tmp_path):
    candidate = json.loads((FIXTURES / "boundary_layer_candidate.json").read_text())
    candidate["a_02"] = f"({candidate['a_02']}) + 1"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(candidate))
    code, out, err = run(capsys, "verify", "--problem", "boundary-layer", "--candidate", str(path),
                         "--format", "text")
    assert code == 2
    assert "nonzero residual at equation 0, monomial [" in err


def test_verify_partial_candidate_with_solver_fill(capsys):
    fixture = str(FIXTURES / "burgers_xt_a20.json")
    code, _, err = run(capsys, "verify", "--problem", "burgers-xt", "--candidate", fixture)
    assert code == 1 and "a_" in err
    code, _, _ = run(capsys, "verify", "--problem", "burgers-xt", "--candidate", fixture, "--fill-from-solver")
    assert code == 0


# ---------------------------------------------------------------- eval

def test_eval_against_tan_oracle(capsys):
    code, out, _ = run(capsys, "eval", "--problem", "burgers-stationary", "--set", "a_0=0,a_1=1,nu=1",
                       "--var", "x=-0.5:0.5:0.05", "--oracle", "tan")
    assert code == 0
    header, *rows = out.strip().splitlines()
    assert header == "x,series,oracle,abserr"
    assert len(rows) == 21
    assert max(float(r.split(",")[3]) for r in rows) <= 1e-4


def test_eval_single_point(capsys):
    code, out, _ = run(capsys, "eval", "--problem", "burgers-stationary", "--set", "a_0=0,a_1=1,nu=1",
                       "--var", "x=0")
    assert code == 0
    assert out.splitlines() == ["x,series", "0.0,0.0"]


def test_eval_with_zero_viscosity(capsys):
    code, _, err = run(capsys, "eval", "--problem", "burgers-stationary", "--set", "a_0=0,a_1=1,nu=0",
                       "--var", "x=0.1")
    assert code == 1 and "nu" in err


def test_eval_json_is_exact_mode_deterministic(capsys):
    argv = ("eval", "--problem", "burgers-xt", "--set", "a_00=1,a_01=0,a_10=1,a_11=0,nu=1",
            "--var", "x=0:1/2:1/4", "--var", "t=0:1:1/2", "--format", "json", "--workers", "2")
    first = run(capsys, *argv)
    assert first == run(capsys, *argv)
    assert len(json.loads(first[1])["rows"]) == 9


# ---------------------------------------------------------------- residual, export, list

def test_residual_subcommand(capsys):
    code, out, _ = run(capsys, "residual", "--problem", "kdv", "--format", "text")
    assert code == 0 and out.rstrip().endswith("all zero")


def test_export_text_and_csv(capsys):
    code, out, _ = run(capsys, "export-system", "--problem", "burgers-stationary", "--format", "text")
    assert code == 0
    assert out.rstrip().endswith("9 equations, 9 unknowns, 2 seeds, 1 parameters: square")
    code, out, _ = run(capsys, "export-system", "--problem", "burgers-stationary", "--format", "csv")
    assert out.splitlines()[0] == "equation,monomial,poly" and len(out.splitlines()) == 10


def test_list(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0 and out.split() == builtin_names()
    _, out, _ = run(capsys, "list", "--format", "json")
    assert json.loads(out) == builtin_names()
