import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from slicelab.cli import main
from slicelab.series import SliceLaurentSeries, coeff_distance, star
from slicelab.subspaces import blaschke_factor


def _write(path, f):
    path.write_text(json.dumps(f.to_dict()))
    return str(path)


def _series(text):
    return SliceLaurentSeries.from_dict(json.loads(text))


@pytest.fixture
def files(tmp_path):
    H = SliceLaurentSeries(0, [[1, 0, 0, 0], [0.5, 0, 0, 0]])
    Q = SliceLaurentSeries.monomial(1)
    return {
        "qi": _write(tmp_path / "qi.json", SliceLaurentSeries(1, [[0, 1, 0, 0]])),
        "qj": _write(tmp_path / "qj.json", SliceLaurentSeries(1, [[0, 0, 1, 0]])),
        "h": _write(tmp_path / "h.json", H),
        "qh": _write(tmp_path / "qh.json", star(Q, H)),
        "neg": _write(tmp_path / "neg.json", SliceLaurentSeries(-1, [[1, 0, 0, 0], [1, 0, 0, 0]])),
        "one": _write(tmp_path / "one.json", SliceLaurentSeries.constant(1.0)),
        "blaschke": _write(tmp_path / "b.json", blaschke_factor([0, 0.4, 0, 0])),
        "big": _write(tmp_path / "big.json", SliceLaurentSeries(0, np.ones((200, 4)))),
        "bad": str(tmp_path / "bad.json"),
    }


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_star_example(files, capsys):
    code, out, _ = run(["star", files["qi"], files["qj"]], capsys)
    assert code == 0
    assert coeff_distance(_series(out), SliceLaurentSeries(2, [[0, 0, 0, 1]])) == 0.0


def test_star_with_inverse(files, tmp_path, capsys):
    code, out, _ = run(["inv", files["h"], "--terms", "80"], capsys)
    assert code == 0
    inv = _write(tmp_path / "inv.json", _series(out))
    code, out, _ = run(["star", files["h"], inv], capsys)
    prod = _series(out).restrict(0, 79)
    assert coeff_distance(prod, SliceLaurentSeries.constant(1.0).restrict(0, 79)) < 1e-8


def test_star_overflow(files, capsys):
    code, _, err = run(["--max-degree", "256", "star", files["big"], files["big"]], capsys)
    assert code == 3
    assert "max_degree" in err


def test_parse_errors(files, capsys):
    open(files["bad"], "w").write("{not json")
    assert run(["conj", files["bad"]], capsys)[0] == 2
    assert run(["conj", "/nonexistent.json"], capsys)[0] == 2
    assert run(["frobnicate"], capsys)[0] == 2
    assert run(["--tol", "0.5", "conj", files["h"]], capsys)[0] == 2


def test_factor_shifted_outer(files, capsys):
    code, out, _ = run(["factor", files["qh"]], capsys)
    assert code == 0
    rep = json.loads(out)
    assert coeff_distance(_series(json.dumps(rep["phi"])), SliceLaurentSeries.monomial(1)) < 1e-9
    assert coeff_distance(_series(json.dumps(rep["g"])),
                          SliceLaurentSeries(0, [[1, 0, 0, 0], [0.5, 0, 0, 0]])) < 1e-9
    assert rep["max_degree"] == 256


def test_factor_cyclic(files, capsys):
    code, out, _ = run(["factor", files["h"]], capsys)
    assert code == 0
    phi = _series(json.dumps(json.loads(out)["phi"]))
    assert coeff_distance(phi, SliceLaurentSeries.constant(1.0)) < 1e-9


def test_factor_negative_support(files, capsys):
    code, _, err = run(["factor", files["neg"]], capsys)
    assert code == 2
    assert "not in H^2" in err


def test_factor_report_written_on_failure(files, tmp_path, capsys):
    report = tmp_path / "report.json"
    code, _, _ = run(["factor", files["qh"], "--depth", "1", "--tol", "1e-30",
                      "--report", str(report)], capsys)
    assert code == 4
    assert set(json.loads(report.read_text())) == {"phi", "g", "residuals", "depth", "max_degree"}


def test_factor_report_written_on_residual_failure(files, tmp_path, capsys, monkeypatch):
    import slicelab.subspaces as sub
    monkeypatch.setattr(sub, "CYCLIC_BELOW", 0.0)
    report = tmp_path / "report.json"
    code, _, _ = run(["factor", files["qh"], "-o", str(report)], capsys)
    assert code == 4
    assert "residuals" in json.loads(report.read_text())


def test_verify_unknown(capsys):
    assert run(["verify", "nope"], capsys)[0] == 2


def test_verify_idempotent_quick(capsys):
    code, out, _ = run(["verify", "idempotent", "--quick"], capsys)
    assert code == 0
    assert "PASS" in out and "FAIL" not in out


def test_cyclic_and_wander(files, capsys):
    code, out, _ = run(["cyclic", files["h"]], capsys)
    assert code == 0 and json.loads(out)["verdict"] == "cyclic"
    code, out, _ = run(["wander", files["qh"]], capsys)
    assert code == 0
    assert coeff_distance(_series(out), SliceLaurentSeries.monomial(1)) < 1e-9


def test_idem_build_and_verify(tmp_path, capsys):
    code, out, _ = run(["--grid-t", "32", "idem-build", "--example", "ell"], capsys)
    assert code == 0
    path = _write(tmp_path / "ell.json", _series(out))
    code, out, _ = run(["--grid-t", "32", "idem-verify", path], capsys)
    assert code == 0
    assert json.loads(out)["self_tilde_conjugate"] is True


def test_idem_verify_failure(files, capsys):
    assert run(["idem-verify", files["h"]], capsys)[0] == 4


def _abs_column(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return np.array([float(r["abs"]) for r in rows])


@pytest.mark.parametrize("name,check", [
    ("one", lambda a: np.all(np.abs(a - 1) < 1e-15)),
    ("blaschke", lambda a: np.all(np.abs(a - 1) <= 1e-6)),
])
def test_trace_abs_column(files, tmp_path, capsys, name, check):
    out = tmp_path / "t.csv"
    assert run(["--grid-t", "16", "--grid-sphere", "32", "trace", files[name], "-o", str(out)],
               capsys)[0] == 0
    assert check(_abs_column(out))


def test_trace_ell_spans_unit_interval(tmp_path, capsys):
    code, out, _ = run(["--grid-t", "32", "idem-build", "--example", "ell"], capsys)
    path = _write(tmp_path / "ell.json", _series(out))
    csv_path = tmp_path / "ell.csv"
    run(["--grid-t", "32", "--grid-sphere", "64", "trace", path, "-o", str(csv_path)], capsys)
    a = _abs_column(csv_path)
    assert a.min() < 1e-6 and a.max() > 1 - 1e-6


def test_deterministic(files, capsys):
    outs = [run(["factor", files["qh"]], capsys)[1] for _ in range(2)]
    assert outs[0] == outs[1]
    outs = [run(["--grid-t", "16", "--grid-sphere", "32", "trace", files["h"]], capsys)[1]
            for _ in range(2)]
    assert outs[0] == outs[1]


def test_env_and_flag_precedence(files, capsys, monkeypatch):
    monkeypatch.setenv("SLICELAB_MAX_DEGREE", "1")
    assert run(["star", files["qi"], files["qj"]], capsys)[0] == 3
    assert run(["star", files["qi"], files["qj"], "--max-degree", "8"], capsys)[0] == 0
    monkeypatch.setenv("SLICELAB_MAX_DEGREE", "abc")
    assert run(["star", files["qi"], files["qj"]], capsys)[0] == 2


def test_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "slicelab.cli", "conj", files["qi"]],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert _series(proc.stdout).coeffs[0][1] == -1.0
