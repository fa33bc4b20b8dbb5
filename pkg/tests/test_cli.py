import json
import subprocess
import sys

import pytest

from ncdef.cgg import e3_pair
from ncdef.cli import main
from ncdef.families import e3_bracket, e3_superpotential
from ncdef.multilinear import bracket_antisym
from ncdef.quadalg import QuadraticAlgebra


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_version():
    out = subprocess.run([sys.executable, "-m", "ncdef.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("ncdef ")


def test_hilbert_command(tmp_path, capsys):
    rel = write(tmp_path, "comm.json", QuadraticAlgebra.commutative(4).to_json())
    assert main(["hilbert", "--relations", rel, "--max-degree", "4", "--expect-polynomial"]) == 0
    assert json.loads(capsys.readouterr().out) == [1, 4, 10, 20, 35]
    free = write(tmp_path, "free.json", QuadraticAlgebra.free(4).to_json())
    assert main(["hilbert", "--relations", free, "--max-degree", "2", "--expect-polynomial"]) == 1


def test_bad_json_reports_line(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "n": 4,\n  oops\n}')
    assert main(["hilbert", "--relations", str(p), "--max-degree", "2"]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["line"] == 3 and err["file"] == str(p)


def test_missing_file(tmp_path, capsys):
    assert main(["poisson", "check", "--bracket", str(tmp_path / "nope.json")]) == 2
    assert "file" in json.loads(capsys.readouterr().err)


def test_degree_out_of_range():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "family", "E3", "--max-degree", "9"])
    assert exc.value.code == 2


def test_poisson_check(tmp_path, capsys):
    b = write(tmp_path, "e3.json", e3_bracket().to_json())
    assert main(["poisson", "check", "--bracket", b, "--json", "-"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert {c["name"]: c["status"] for c in rep["checks"]} == {
        "jacobi": "pass",
        "unimodular": "pass",
        "oneform_round_trip": "pass",
        "bracket": "logged",
    }
    assert rep["schema"] == 1 and rep["command"] == "poisson check"


def test_superpotential_check(tmp_path, capsys):
    ok = write(tmp_path, "e3.json", e3_superpotential().to_json())
    assert main(["superpotential", "check", "--file", ok, "--max-degree", "4"]) == 0
    assert capsys.readouterr().out.strip().endswith("OK")
    comm = bracket_antisym(4, (0, 1, 2, 3)) * 0
    bad = write(tmp_path, "zero.json", comm.to_json())
    assert main(["superpotential", "check", "--file", bad, "--max-degree", "3"]) == 1


def test_cgg_commands(tmp_path, capsys):
    assert main(["cgg", "e3"]) == 0
    err = capsys.readouterr().err
    assert "[x0,x3] = 195/2x0^2 - 45/2x0x1 + 5x0x2" in err
    assert "[x1,x2] = -3/2x0x1 + 3x0x2 + x1^2" in err
    assert main(["cgg", "e3", "--hbar", "2", "--json", "-"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["config"]["hbar"] == "2/1"
    pair = write(tmp_path, "pair.json", e3_pair().to_json())
    assert main(["cgg", "check", "--pair", pair, "--degree", "2"]) == 0


def test_verify_family_json(tmp_path, capsys):
    out = tmp_path / "rep.json"
    assert main(["verify", "family", "E3", "--max-degree", "4", "--json", str(out)]) == 0
    rep = json.loads(out.read_text())
    sec = rep["sections"][0]
    assert sec["family"] == "E3" and sec["pass"] is True
    assert rep["tool_version"] and rep["config"]["max_degree"] == 4
    assert rep["config"]["exact_degree7"] is False
    assert main(["verify", "family", "E3", "--max-degree", "3", "--exact-degree7", "--json", str(out)]) == 0
    assert json.loads(out.read_text())["config"]["exact_degree7"] is True
    assert main(["verify", "family", "Q9"]) == 2


def test_verify_is_deterministic_across_workers(monkeypatch, tmp_path):
    def run(threads):
        monkeypatch.setenv("NCDEF_THREADS", threads)
        out = tmp_path / f"r{threads}.json"
        main(["verify", "family", "S23", "--seeds", "0,1", "--max-degree", "4", "--json", str(out)])
        rep = json.loads(out.read_text())
        for sec in rep["sections"]:
            for c in sec["checks"]:
                c.pop("seconds", None)
        return rep

    assert run("1") == run("2")


def test_table1_command(capsys):
    code = main(["table1", "--seeds", "0,1"])
    dims = json.loads(capsys.readouterr().out)
    assert set(dims) == {"L1111", "L112", "R22", "R13", "S23", "E3"}
    assert code == 0 and dims["E3"] == 13
