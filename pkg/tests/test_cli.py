from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from exciteq.chem import fixture_path, load_fixture
from exciteq.cli import main


def run(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("family, counts", [
    ("qeb", {"single_qubit": 32, "cnot": 42, "cz": 0}),
    ("feb", {"single_qubit": 32, "cnot": 46, "cz": 2}),
])
def test_synth_counts(capsys, family, counts):
    code, out, _ = run(capsys, "synth", "--op", "occ:1,2,5;vir:8,9,11", "--family", family, "--theta", "0.3")
    assert code == 0
    d = json.loads(out)
    assert d["counts"] == counts == d["formula_counts"]
    assert d["circuit"]["nq"] == 12
    assert d["schema_version"] == 1


def test_synth_verify(capsys):
    code, out, _ = run(capsys, "synth", "--op", "occ:0,2;vir:5,7", "--family", "standard-fermionic", "--verify")
    assert code == 0
    v = json.loads(out)["verify"]
    assert v["passed"] and v["max_deviation"] < 1e-10


def test_synth_bad_input(capsys):
    assert run(capsys, "synth", "--op", "occ:1;vir:1")[0] == 2
    assert run(capsys, "synth", "--op", "occ:0;vir:1", "--family", "nope")[0] == 2
    assert run(capsys, "synth", "--op", "occ:0;vir:3", "--nq", "2")[0] == 2
    assert run(capsys, "synth", "--op", "occ:0;vir:13", "--verify")[0] == 2


def test_count_example(capsys):
    code, out, _ = run(capsys, "count", "--example")
    assert code == 0
    rows = {r["family"]: r for r in csv.DictReader(io.StringIO(out))}
    assert (rows["standard-fermionic"]["single_qubit"], rows["standard-fermionic"]["cnot"]) == ("416", "512")
    assert (rows["standard-qubit"]["single_qubit"], rows["standard-qubit"]["cnot"]) == ("416", "320")
    assert (rows["feb"]["cnot"], rows["feb"]["cz"]) == ("46", "2")
    assert rows["qeb"]["cnot"] == "42"


def test_count_qeb_ranks(capsys):
    code, out, _ = run(capsys, "count", "--ranks", "1-6", "--family", "qeb")
    assert code == 0
    assert [int(r["cnot"]) for r in csv.DictReader(io.StringIO(out))] == [4, 14, 42, 142, 530, 2070]
    assert run(capsys, "count", "--ranks", "0-2")[0] == 2


def test_solve_h2(capsys, tmp_path):
    trace = tmp_path / "trace.csv"
    code, out, _ = run(capsys, "solve", "--fixture", "h2", "--solver", "spqe", "--flavor", "feb", "--fci",
                       "--trace", str(trace))
    assert code == 0
    d = json.loads(out)
    assert abs(d["fci_error"]) <= 1e-8
    assert d["converged"] and d["solver"] == "spqe"
    assert trace.read_text().startswith("macro,micro,energy,norm,n_params,cnot_count\n")
    code2, out2, _ = run(capsys, "solve", "--fixture", "h2", "--solver", "spqe", "--flavor", "feb", "--fci",
                         "--trace", str(trace))
    assert out2 == out


def test_solve_fcidump_path_and_output(capsys, tmp_path):
    dest = tmp_path / "out.json"
    code, out, _ = run(capsys, "solve", "--fcidump", str(fixture_path("h2")), "--solver", "adapt-vqe",
                       "--flavor", "qeb", "--output", str(dest))
    assert code == 0 and out == ""
    d = json.loads(dest.read_text())
    assert d["fci_energy"] is None
    assert d["energy"] == pytest.approx(load_fixture("h2")[1]["fci"], abs=1e-6)


def test_solve_errors(capsys, tmp_path):
    assert run(capsys, "solve", "--fixture", "h2", "--solver", "magic")[0] == 2
    assert run(capsys, "solve")[0] == 2
    assert run(capsys, "solve", "--fixture", "h2", "--fcidump", "x")[0] == 2
    assert run(capsys, "solve", "--fixture", "h9")[0] == 2
    assert run(capsys, "solve", "--fixture", "h2", "--omega", "-1")[0] == 2
    assert run(capsys, "solve", "--fcidump", str(tmp_path / "missing.FCIDUMP"))[0] == 4
    bad = tmp_path / "bad.FCIDUMP"
    bad.write_text("&FCI NORB=1,NELEC=2 &END\n0.1 5 1 0 0\n")
    assert run(capsys, "solve", "--fcidump", str(bad))[0] == 4


def test_solve_nonconvergence_exit(capsys):
    code, out, _ = run(capsys, "solve", "--fixture", "h4", "--solver", "pqe", "--max-micro", "2", "--eps-r", "1e-12")
    assert code == 5
    assert json.loads(out)["converged"] is False


def test_config_precedence_and_unknown_keys(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"fixture": "h2", "solver": "vqe", "flavor": "qeb", "fci": True}))
    code, out, _ = run(capsys, "solve", "--config", str(cfg), "--solver", "pqe")
    assert code == 0
    d = json.loads(out)
    assert d["solver"] == "pqe" and d["flavor"] == "qubit"
    assert d["fci_error"] is not None
    cfg.write_text(json.dumps({"fixture": "h2", "colour": "red"}))
    code, _, err = run(capsys, "solve", "--config", str(cfg))
    assert code == 2 and "colour" in err


def test_ucc_fixed(capsys):
    code, out, _ = run(capsys, "solve", "--fixture", "h2", "--solver", "ucc-fixed", "--flavor", "feb",
                       "--ops", "occ:0,1;vir:2,3", "--params", "0.0")
    assert code == 0
    d = json.loads(out)
    assert d["energy"] == pytest.approx(load_fixture("h2")[1]["hf"], abs=1e-10)
    assert run(capsys, "solve", "--fixture", "h2", "--solver", "ucc-fixed", "--ops", "occ:0,1;vir:2,3",
               "--params", "0.1", "0.2")[0] == 2


def test_fci_command(capsys):
    code, out, _ = run(capsys, "fci", "--fixture", "h4")
    assert code == 0
    d = json.loads(out)
    assert d["energy"] == pytest.approx(load_fixture("h4")[1]["fci"], abs=1e-9)
    code, out, _ = run(capsys, "fci", "--fixture", "h2", "--nelec", "1", "--sz", "0.5")
    assert code == 0 and json.loads(out)["n_electrons"] == 1
    assert run(capsys, "fci", "--fixture", "h2", "--nelec", "9")[0] == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "exciteq", "count", "--ranks", "2", "--family", "qeb"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.splitlines()[1].split(",")[-2:] == ["14", "0"]
