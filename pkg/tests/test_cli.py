import io
import os
import subprocess
import sys
from pathlib import Path

import pytest

from strahler import cli

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"

# name -> argv (file arguments relative to the fixture directory)
CASES = {
    "strahler_term": ["strahler", "term", "example.term"],
    "strahler_adj": ["strahler", "adj", "small.adj"],
    "strahler_dag_paths": ["strahler", "dag", "example.dag", "--algo", "paths", "--k", "3"],
    "strahler_tslp_circuit": ["strahler", "tslp", "example.tslp", "--algo", "circuit", "--k", "3"],
    "balance": ["balance", "example.term"],
    "codegen": ["codegen", "balanced.expr"],
    "grammar_loop_max": ["grammar", "max-st", "loop.cnf"],
    "grammar_loop_acyclic": ["grammar", "acyclic-st", "loop.cnf"],
    "grammar_pair_acyclic_k": ["grammar", "acyclic-st", "pair.cnf", "--k", "2"],
    "gadget_majority": ["gadget", "majority", "0110"],
    "gadget_formula": ["gadget", "formula", "true.formula"],
    "gadget_circuit": ["gadget", "circuit", "false.circuit"],
    "gadget_qbf": ["gadget", "qbf", "true.qbf"],
    "gadget_x3hs": ["gadget", "x3hs", "hitting.x3hs"],
    "gadget_linegraph": ["gadget", "linegraph", "before.lg"],
    "gadget_dagreach": ["gadget", "dagreach", "reach.dr"],
    "gadget_dagreach_grammar": ["gadget", "dagreach", "reach.dr", "--grammar"],
    "circuit_build": ["circuit", "build", "example.tslp", "2"],
}


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    cwd = os.getcwd()
    os.chdir(FIXTURES)
    try:
        code = cli.run(argv, out, err)
    finally:
        os.chdir(cwd)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden_output(name):
    code, out, err = run(CASES[name])
    assert code == 0, err
    path = GOLDEN / f"{name}.out"
    if os.environ.get("STRAHLER_UPDATE_GOLDEN"):
        path.parent.mkdir(exist_ok=True)
        path.write_text(out)
    assert out == path.read_text()
    assert run(CASES[name])[1] == out  # deterministic


@pytest.mark.parametrize("kind,file", [("term", "example.term"), ("adj", "small.adj"),
                                       ("dag", "example.dag"), ("tslp", "example.tslp")])
def test_algorithms_agree(kind, file):
    outputs = {run(["strahler", kind, file, "--algo", a])[1] for a in ("naive", "lowspace", "balanced")}
    assert len(outputs) == 1
    value = int(outputs.pop().split("=")[1])
    for algo in ("circuit", "paths"):
        for k in range(value + 2):
            code, out, _ = run(["strahler", kind, file, "--algo", algo, "--k", str(k)])
            assert code == 0
            assert out == f"st >= {k}: {'true' if k <= value else 'false'}\n"


def test_example_values():
    assert run(["strahler", "term", "example.term"])[1] == "st = 3\n"
    assert run(["grammar", "max-st", "loop.cnf"])[1] == "st = infinity\n"
    assert run(["strahler", "term", "example.term", "--k", "2"])[1] == "st >= 2: true\n"


@pytest.mark.parametrize("argv", [
    ["strahler", "term", "bad.term"],
    ["strahler", "term", "missing.term"],
    ["strahler", "term", "example.term", "--algo", "circuit"],
    ["strahler", "tslp", "example.term"],
    ["circuit", "build", "example.tslp", "9"],
    ["gadget", "majority", "012"],
    ["gadget", "x3hs", "loop.cnf"],
    ["frobnicate"],
    [],
])
def test_malformed_input_exits_1(argv):
    code, out, err = run(argv)
    assert code == 1
    assert out == ""
    assert err.startswith("error:")


def test_limit_exceeded_exits_2(tmp_path):
    lines = ["start S", "L = a", "C0 = b(x,L)"]
    lines += [f"C{i} = C{i - 1}(C{i - 1}(x))" for i in range(1, 40)]
    lines.append("S = C39(L)")
    path = tmp_path / "huge.tslp"
    path.write_text("\n".join(lines) + "\n")
    code, _, err = run(["strahler", "tslp", str(path), "--algo", "naive"])
    assert code == 2 and "budget" in err
    assert run(["strahler", "tslp", str(path)])[1] == "st = 1\n"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "strahler", "strahler", "term", str(FIXTURES / "example.term")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "st = 3\n"
    proc = subprocess.run([sys.executable, "-m", "strahler", "strahler", "term", str(FIXTURES / "bad.term")],
                          capture_output=True, text=True)
    assert proc.returncode == 1 and proc.stderr
