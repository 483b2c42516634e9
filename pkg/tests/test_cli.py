import csv
import io
import json
import subprocess
import sys

import pytest

from cansys.cli import run

from conftest import DATA, ROOT
from regen_golden import COMMANDS, SYSTEMS, golden_path, report


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, json.loads(out.getvalue()) if out.getvalue() else None, err.getvalue()


def sysf(name):
    return DATA / "systems" / f"{name}.json"


def bcf(name):
    return DATA / "conditions" / f"{name}.json"


def relf(name):
    return DATA / "relations" / f"{name}.json"


@pytest.mark.parametrize("system", SYSTEMS)
@pytest.mark.parametrize("command", COMMANDS)
def test_golden(system, command):
    code, text = report(system, command)
    assert code == 0
    assert text == golden_path(system, command).read_text(encoding="utf-8")


def test_byte_stable_across_processes(tmp_path):
    cmd = [sys.executable, "-m", "cansys", "indices", "--system", str(sysf("twopiece4"))]
    a = subprocess.run(cmd, capture_output=True, cwd=ROOT)
    b = subprocess.run(cmd, capture_output=True, cwd=ROOT)
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout == golden_path("twopiece4", "indices").read_bytes()


def test_report_shape():
    code, rep, _ = cli("signature", "--system", sysf("signature3"))
    assert code == 0 and rep["schema"] == 1 and rep["ok"] and rep["command"] == "signature"
    assert (rep["nu_plus"], rep["nu_minus"], rep["delta"]) == (1, 2, 1)


def test_validate_failure():
    code, rep, err = cli("validate", "--system", sysf("bad_J"))
    assert code == 2 and rep["valid"] is False and not rep["ok"]
    code, rep, err = cli("indices", "--system", sysf("bad_J"))
    assert code == 2 and rep["error"]["type"] == "ValidationError" and "J" in err


def test_malformed_documents(tmp_path):
    bad = tmp_path / "bad.json"
    doc = json.loads(sysf("dirac").read_text())
    doc["J"][1][1] = "x"
    bad.write_text(json.dumps(doc))
    code, rep, _ = cli("signature", "--system", bad)
    assert code == 2 and rep["error"]["pointer"] == "/J/1/1"
    bad.write_text("{not json")
    assert cli("signature", "--system", bad)[0] == 2
    del doc["schema"]
    doc["J"][1][1] = 0
    bad.write_text(json.dumps(doc))
    code, rep, _ = cli("signature", "--system", bad)
    assert code == 2 and rep["error"]["pointer"] == "/schema"
    assert cli("signature", "--system", tmp_path / "missing.json")[0] == 2
    assert cli("weyl", "--system", sysf("dirac"))[0] == 2
    assert cli("nonsense")[0] == 2
    assert cli("signature", "--system", sysf("dirac"), "--tol", "bogus=1")[0] == 2


def test_classify_and_impossible():
    code, rep, _ = cli("classify-bc", "--system", sysf("dirac"), "--bc", bcf("dissipative"),
                       "--oracle")
    assert code == 0 and rep["class"] == "maximal-dissipative"
    assert rep["D_eigenvalues"] == [0.0, -2.0] and rep["oracle_class"] == rep["class"]
    code, rep, _ = cli("classify-bc", "--system", sysf("signature3"),
                       "--bc", bcf("signature3_selfadjoint"))
    assert code == 3 and rep["error"]["type"] == "ImpossibleConditionError"
    code, rep, _ = cli("classify-bc", "--system", sysf("dirac"), "--bc", bcf("separated_dissipative"))
    assert code == 0 and rep["separated"]["class"] == "maximal-dissipative"


def test_spectrum_command():
    code, rep, _ = cli("spectrum", "--system", sysf("dirac"), "--bc", bcf("dirichlet"),
                       "--range", "-2.5,2.5")
    assert code == 0 and rep["count"] == 5
    assert [round(e["lambda"], 8) for e in rep["eigenvalues"]] == [-2, -1, 0, 1, 2]


def test_weyl_csv(tmp_path):
    out = tmp_path / "m.csv"
    code, rep, _ = cli("weyl", "--system", sysf("dirac"), "--range", "-1,1", "--grid", "5",
                       "--eta", "0.5", "--lambda", "0,1", "--out", out)
    assert code == 0 and len(rep["samples"]) == 6
    assert rep["nevanlinna"]["min_im_eig"] > 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["lambda_re", "lambda_im", "M11_re", "M11_im", "M12_re", "M12_im",
                       "M21_re", "M21_im", "M22_re", "M22_im"]
    assert len(rows) == 7 and float(rows[2][1]) == 0.5


def test_verify_relation():
    code, rep, _ = cli("verify-relation", "--relation", relf("model_triplet"), "--lambda", "0.5,1")
    assert code == 0 and rep["relation"]["valid"] and rep["triplet"]["valid"]
    m = rep["weyl"][0]["M"][0][0]
    assert abs(complex(*m) - (0.5 + 1j - 1 / (0.5 + 1j))) <= 1e-10
    code, rep, _ = cli("verify-relation", "--relation", relf("assembled"))
    assert code == 0 and rep["relation"]["n_gamma"] == 2
    code, rep, _ = cli("verify-relation", "--relation", relf("broken"))
    assert code == 3 and rep["relation"]["failed_clause"] == "kernel"
    assert rep["relation"]["green_residual"] > 0.1


def test_inconclusive_exit_code():
    code, rep, _ = cli("indices", "--system", sysf("dirac"), "--tol", "null_cap=16")
    assert code == 4 and rep["error"]["type"] == "InconclusiveError"
