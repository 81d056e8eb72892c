import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from lyapnorm.cli import main
from lyapnorm.poly import Polynomial, to_json_obj

MODEL = Path(__file__).parent / "fixtures" / "model_m.json"


def write_model(path, lam, extra=None, mode="thm1"):
    x1, x2, y1, y2 = (Polynomial.coordinate(2, i) for i in range(4))
    H = Polynomial.quadratic(lam) + (x1 + y1) ** 2 * (x2 + y2) if extra is None else extra
    doc = to_json_obj(H)
    doc["mode"] = mode
    path.write_text(json.dumps(doc))
    return path


def test_normalize_writes_result(tmp_path, capsys):
    assert main(["normalize", "--in", str(MODEL), "--order", "6", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "normalform.json").read_text())
    assert len(doc["Z"]) == 6
    assert max(doc["homological_residuals"]) <= 1e-12
    assert "residual" in capsys.readouterr().out


def test_lambda_inferred_from_quadratic_part(tmp_path):
    model = write_model(tmp_path / "m.json", (1j, 1j * math.sqrt(2)))
    assert main(["normalize", "--in", str(model), "--order", "3", "--out", str(tmp_path)]) == 0


@pytest.mark.parametrize("args", [["--order", "0"], ["--d", "0.5"], ["--d", "0"]])
def test_config_rejections(tmp_path, args):
    assert main(["certify", "--in", str(MODEL), "--out", str(tmp_path)] + args) == 1


def test_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 2,\n "terms": [\n')
    assert main(["normalize", "--in", str(bad), "--out", str(tmp_path)]) == 1
    assert "line" in capsys.readouterr().err
    bad.write_text('{"n": 2, "terms": [{"j": [1, 0], "k": [1]}]}')
    assert main(["normalize", "--in", str(bad), "--out", str(tmp_path)]) == 1


def test_missing_file(tmp_path):
    assert main(["normalize", "--in", str(tmp_path / "none.json"), "--out", str(tmp_path)]) == 1


def test_resonance_exit(tmp_path, capsys):
    model = write_model(tmp_path / "r.json", (1j, 2j))
    assert main(["normalize", "--in", str(model), "--order", "4", "--out", str(tmp_path)]) == 2
    assert "k=[-2, 1]" in capsys.readouterr().err


def test_certify(tmp_path):
    assert main(["certify", "--in", str(MODEL), "--order", "6", "--d", "0.25", "--out", str(tmp_path)]) == 0
    rows = (tmp_path / "ledger.csv").read_text().splitlines()
    assert len(rows) == 7
    assert all(r.endswith(",pass") for r in rows[1:])
    cert = json.loads((tmp_path / "certificate.json").read_text())
    assert cert["passed"] and cert["certificate"]["rho"] > 0


def test_certify_degenerate(tmp_path):
    model = write_model(tmp_path / "h0.json", None, extra=Polynomial.quadratic((1j, 1j * math.sqrt(2))))
    assert main(["certify", "--in", str(model), "--out", str(tmp_path)]) == 4


def test_orbit_sweep(tmp_path):
    code = main(["orbit", "--in", str(MODEL), "--orders", "2,4", "--amplitude", "0.01", "--dt", "2e-3",
                 "--out", str(tmp_path)])
    assert code == 0
    doc = json.loads((tmp_path / "orbit.json").read_text())
    res = [r["residual"] for r in doc["rows"]]
    assert res[0] > res[1]
    assert (tmp_path / "orbit.csv").read_text().startswith("t,")


def test_orbit_divergence(tmp_path):
    assert main(["orbit", "--in", str(MODEL), "--order", "2", "--amplitude", "5", "--out", str(tmp_path)]) == 5


def test_verify_reproducible(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["verify", "--trials", "30", "--seed", "7", "--out", str(a)]) == 0
    assert main(["verify", "--trials", "30", "--seed", "7", "--out", str(b)]) == 0
    assert (a / "verify.json").read_bytes() == (b / "verify.json").read_bytes()
    assert json.loads((a / "verify.json").read_text())["violations"] == 0


def test_verify_zero_trials(tmp_path, capsys):
    assert main(["verify", "--trials", "0", "--out", str(tmp_path)]) == 0
    assert "warning" in capsys.readouterr().err


def test_convert_roundtrip(tmp_path):
    q1, q2, p1, p2 = (Polynomial.coordinate(2, i) for i in range(4))
    Hreal = 0.5 * (q1 ** 2 + p1 ** 2) + 0.5 * math.sqrt(2) * (q2 ** 2 + p2 ** 2) + q1 ** 2 * q2
    src = tmp_path / "real.json"
    src.write_text(json.dumps(to_json_obj(Hreal)))
    assert main(["convert", "--in", str(src), "--out", str(tmp_path / "cx.json")]) == 0
    doc = json.loads((tmp_path / "cx.json").read_text())
    assert doc["lambda"][0] == pytest.approx([0.0, 1.0])
    assert main(["normalize", "--in", str(tmp_path / "cx.json"), "--order", "4", "--out", str(tmp_path)]) == 0


def test_threads_env_validated(tmp_path, monkeypatch):
    monkeypatch.setenv("LYAPNORM_THREADS", "zero")
    assert main(["verify", "--trials", "1", "--out", str(tmp_path)]) == 1
    monkeypatch.setenv("LYAPNORM_THREADS", "4")
    assert main(["verify", "--trials", "1", "--out", str(tmp_path)]) == 0


def test_bad_arguments():
    assert main(["normalize", "--order", "x"]) == 1
    assert main([]) == 1


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "lyapnorm", "normalize", "--in", str(MODEL), "--order", "2",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
