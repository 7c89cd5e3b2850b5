import io
import json

import pytest

from bethewronski import cli


def call(*argv):
    out = io.StringIO()
    code = cli.run(list(argv), out)
    return code, out.getvalue()


def call_json(*argv):
    code, text = call(*argv)
    return code, json.loads(text)


def test_dim_sing_example():
    code, rep = call_json("dim-sing", "--M", "1,1,1", "--k", "1")
    assert code == 0
    assert rep == {"schema": 1, "formula": 2, "kernel": 2, "agree": True}


def test_schubert_example():
    code, rep = call_json("schubert", "--q", "1,1,1,1", "--d", "3", "--p", "2")
    assert code == 0
    assert (rep["pieri"], rep["formula"], rep["rep_oracle"]) == (2, 2, 2)


def test_k_too_large_is_usage_error(capsys):
    code, text = call("dim-sing", "--M", "1,1", "--k", "5")
    assert code == 2 and text == ""
    assert "k exceeds |M|/2" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["no-such-command"],
    ["dim-sing", "--M", "1,x", "--k", "1"],
    ["dim-sing", "--M", "1,1"],
    ["bethe-solve", "--M", "1,1", "--z=0,0", "--k", "1"],
    ["bethe-solve", "--M", "1,1", "--k", "1", "--tol", "-1"],
])
def test_usage_errors(argv, capsys):
    assert call(*argv)[0] == 2
    capsys.readouterr()


def test_bethe_solve_is_deterministic():
    argv = ["bethe-solve", "--M", "1,2,1", "--k", "2", "--seed", "5"]
    first, second = call(*argv), call(*argv)
    assert first == second
    code, rep = call_json(*argv)
    assert code == 0 and rep["schema"] == 1
    assert rep["orbit_count"] == rep["dim_sing"] and rep["agree"]


def test_rationals_and_complex_serialization():
    code, rep = call_json("wronski", "--M", "1,1", "--z", "0,1", "--k", "1")
    assert code == 0
    text = json.dumps(rep)
    assert '"1/2"' in text or "[0.5, 0.0]" in text
    assert cli.jsonable(complex(1, -2)) == [1.0, -2.0]
    from fractions import Fraction

    assert cli.jsonable(Fraction(-3, 4)) == "-3/4"
    assert cli.jsonable(Fraction(2)) == "2/1"


def test_slp_commands():
    code, rep = call_json("slp-dim", "--M", "1,1,1", "--k", "1,0")
    assert code == 0 and rep["kernel"] == rep["upper_bound"] == 2
    code, rep = call_json("slp-solve", "--M", "1,1,1", "--k", "1,0", "--seed", "3")
    assert code == 0 and rep["orbit_count"] == 2
    code, rep = call_json("fuchsian-check", "--M", "2,1", "--k", "1", "--p", "3")
    assert code == 0


def test_gaudin_verify():
    code, rep = call_json("gaudin-verify", "--M", "1,1,2", "--z", "0,1,3", "--k", "1")
    assert code == 0


def test_csv_and_pretty_outputs():
    code, text = call("dim-sing", "--M", "1,1,1", "--k", "1", "--output", "csv")
    assert code == 0
    rows = text.strip().splitlines()
    assert rows[0] == "key,value" and "formula,2" in rows
    code, text = call("dim-sing", "--M", "1,1,1", "--k", "1", "--output", "pretty")
    assert code == 0 and "formula" in text and "{" not in text


def test_falsified_claim_exits_one(monkeypatch, capsys):
    monkeypatch.setitem(cli.COMMANDS, "dim-sing", lambda args, cfg: ({"agree": False}, False))
    code, rep = call_json("dim-sing", "--M", "1,1", "--k", "1")
    assert code == 1 and rep == {"schema": 1, "agree": False}
    capsys.readouterr()
