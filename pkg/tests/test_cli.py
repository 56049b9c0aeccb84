import json
import subprocess
import sys

import pytest

from gmlsat import formula as fm
from gmlsat import kripke, tiling
from gmlsat.cli import run


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_solve_euclidean_blow_up(tmp_path, capsys):
    f = write(tmp_path, "f.gml", "dia>=16 p\n")
    out = str(tmp_path / "m.json")
    assert run(["solve", "--frames", "eucl", "--input", f, "--model-out", out]) == 0
    assert capsys.readouterr().out.strip() == "SAT"
    model = kripke.load(out)
    assert len(model.structure.worlds) >= 16
    assert run(["check", "--model", out, "--input", f]) == 0
    assert capsys.readouterr().out.strip() == "TRUE"


def test_solve_unsat(tmp_path, capsys):
    f = write(tmp_path, "f.gml", "p & ~p")
    assert run(["solve", "--frames", "tr", "--input", f]) == 1
    assert capsys.readouterr().out.strip() == "UNSAT"


def test_solve_unknown(capsys):
    assert run(["solve", "--frames", "sym", "-f", "dia>=1 p & dia<=0 p", "--cap", "3"]) == 2
    assert capsys.readouterr().out.strip() == "UNKNOWN"


@pytest.mark.parametrize("frames", ["", "rfl", "ser,tr", "sym", "rfl,sym,tr", "eucl,ser"])
def test_model_out_round_trips(tmp_path, capsys, frames):
    f = write(tmp_path, "f.gml", "dia>=2 p & dia>=1 ~p")
    out = str(tmp_path / "m.json")
    assert run(["solve", "--frames", frames, "--input", f, "--model-out", out]) == 0
    assert run(["check", "--model", out, "--input", f]) == 0
    lines = capsys.readouterr().out.split()
    assert lines == ["SAT", "TRUE"]


def test_check_canonical_model(tmp_path, capsys):
    t = write(tmp_path, "t.json", json.dumps({"colors": ["a"], "H": [["a", "a"]], "V": [["a", "a"]], "n": 1}))
    canon = str(tmp_path / "c.json")
    assert run(["tiling-gen", "--tiling", t, "--part", "gamma", "--canonical-out", canon]) == 0
    gamma = capsys.readouterr().out
    assert fm.parse(gamma) == tiling.gamma(1)
    f = write(tmp_path, "g.gml", gamma)
    assert run(["check", "--model", canon, "--input", f]) == 0
    assert capsys.readouterr().out.strip() == "TRUE"


def test_check_false_and_world(tmp_path, capsys):
    m = write(tmp_path, "m.json", json.dumps({"worlds": ["a", "b"], "edges": [["a", "b"]], "valuation": {"p": ["b"]}}))
    assert run(["check", "--model", m, "-f", "p"]) == 1
    assert run(["check", "--model", m, "-f", "p", "--world", "b"]) == 0
    assert capsys.readouterr().out.split() == ["FALSE", "TRUE"]
    assert run(["check", "--model", m, "-f", "p", "--world", "zz"]) == 3


def test_tiling_gen_subscripts(tmp_path, capsys):
    t = write(tmp_path, "t.json", json.dumps(
        {"colors": ["a", "b"], "H": [["a", "b"]], "V": [["b", "a"]], "n": 2, "initial": ["a", "b"]}
    ))
    assert run(["tiling-gen", "--tiling", t]) == 0
    f = fm.parse(capsys.readouterr().out)
    assert set(fm.subscripts(f)) <= {0, 1}


def test_nf(capsys):
    assert run(["nf", "-f", "dia>=2 p"]) == 0
    out = capsys.readouterr().out
    g = fm.parse(out)
    assert "p_0" in fm.letters(g)
    assert run(["nf", "-f", "dia>=2 p", "--parts"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "eta: p_0"
    assert "lower: p_0 -> dia>=2 p" in lines


def test_c1(capsys):
    assert run(["c1", "-f", "p"]) == 0
    assert capsys.readouterr().out.strip() == "(exists x. (p(x) & q_0(x)) & forall x. (q_1(x) -> q_2(x)))"


def test_minimize(tmp_path, capsys):
    edges = [[f"w{i}", f"w{j}"] for i in range(6) for j in range(6) if i < j]
    m = write(tmp_path, "m.json", json.dumps(
        {"worlds": [f"w{i}" for i in range(6)], "edges": edges, "valuation": {"p": ["w3", "w4", "w5"]}}
    ))
    out = str(tmp_path / "small.json")
    assert run(["minimize", "--model", m, "-f", "dia>=1 p", "--out", out]) == 0
    small = kripke.load(out)
    assert kripke.check(small.structure, small.world, fm.parse("dia>=1 p"))
    assert len(small.structure.worlds) < 6
    assert not any(name.startswith(("p_", "q_")) for name in small.structure.valuation)
    assert run(["minimize", "--model", m, "-f", "dia>=1 p"]) == 0
    assert kripke.from_json(capsys.readouterr().out) == small


def test_minimize_rejects_non_model(tmp_path):
    m = write(tmp_path, "m.json", json.dumps({"worlds": ["a"], "edges": []}))
    assert run(["minimize", "--model", m, "-f", "p"]) == 3


def test_oracle(capsys):
    assert run(["oracle", "-f", "dia>=2 p & dia<=1 true", "--max-size", "3"]) == 1
    assert capsys.readouterr().out.strip() == "NONE-UP-TO"
    assert run(["oracle", "-f", "dia>=1 p", "--frames", "rfl,tr"]) == 0


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["solve"],
        ["solve", "-f", "p &"],
        ["solve", "-f", "p", "--frames", "nope"],
        ["solve", "--input", "/nonexistent/file"],
        ["check", "-f", "p", "--model", "/nonexistent.json"],
        ["tiling-gen", "--tiling", "/nonexistent.json"],
        ["oracle", "-f", "p", "--max-size", "9"],
    ],
)
def test_errors_exit_3(argv):
    assert run(argv) == 3


def test_stdin_input(monkeypatch, capsys):
    import io

    monkeypatch.setattr(sys, "stdin", io.StringIO("dia>=1 p"))
    assert run(["solve", "--input", "-", "--frames", "tr"]) == 0


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "gmlsat", "solve", "--frames", "tr", "-f", "p & ~p"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 1
    assert proc.stdout.strip() == "UNSAT"
