import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from regdual.errors import ResolventError
from regdual.harness import cli
from regdual.harness.cli import COMPARE_HEADER, PATH_HEADER, TRACE_HEADER, main
from regdual.harness.config import load_preset, parse_config


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def _cfg(**run):
    d = {
        "space": {"dim": 2},
        "operator": {"kind": "diagonal_linear", "params": [1, 2]},
        "schedule": {"a": 0.6, "b": 0.3},
        "run": {"scheme": "regularized", "max_iter": 500, "x1": [1, 1], "record_every": 50},
    }
    d["run"].update(run)
    return d


def _write(tmp_path, d, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(d))
    return str(p)


# -- solve ------------------------------------------------------------------

def test_solve_identity_preset(tmp_path):
    csv_p, json_p = tmp_path / "t.csv", tmp_path / "s.json"
    assert main(["solve", "--preset", "hilbert-identity", "--csv", str(csv_p), "--json", str(json_p)]) == 0
    s = json.loads(json_p.read_text())
    assert s["status"] == "completed"
    assert s["final_residual"] <= 1e-6
    assert s["wall_time_seconds"] is None
    assert s["schedule_valid"]["valid"]
    assert set(s["schedule_valid"]["conditions"]) >= {"lambda_sum_diverges", "lambda_squared_summable"}
    assert parse_config(json.dumps(s["config_echo"])) == load_preset("hilbert-identity")
    raw = csv_p.read_bytes()
    assert b"\r" not in raw
    rows = _rows(csv_p)
    assert tuple(rows[0]) == TRACE_HEADER
    assert rows[1][0] == "1"
    assert rows[-1][0] == str(s["iterations_used"])
    # unregularized run: no tracking column
    assert all(r[6] == "" for r in rows[1:])


def test_solve_numbers_round_trip(tmp_path):
    csv_p, json_p = tmp_path / "t.csv", tmp_path / "s.json"
    assert main(["solve", "--config", _write(tmp_path, _cfg()), "--csv", str(csv_p), "--json", str(json_p)]) == 0
    rows = _rows(csv_p)
    last = dict(zip(rows[0], rows[-1]))
    s = json.loads(json_p.read_text())
    assert float(last["err"]) == s["final_err"]
    assert float(last["lambda"]) == 501.0 ** -0.6
    assert [r[0] for r in rows[1:]] == ["1", "50", "100", "150", "200", "250", "300", "350", "400",
                                        "450", "500"]


def test_solve_tracks_path(tmp_path):
    csv_p, json_p = tmp_path / "t.csv", tmp_path / "s.json"
    assert main(["solve", "--config", _write(tmp_path, _cfg(track_path=True)),
                 "--csv", str(csv_p), "--json", str(json_p)]) == 0
    rows = _rows(csv_p)[1:]
    assert all(r[6] != "" for r in rows)
    s = json.loads(json_p.read_text())
    assert s["diagnostics"]["final_phi_track"] == float(rows[-1][6])
    c = np.array([1.0, 2.0])
    theta = 501.0 ** -0.3
    y = theta / (theta + c)
    assert s["diagnostics"]["final_track_gap"] == pytest.approx(np.linalg.norm(np.array(s["final_x"]) - y),
                                                                rel=1e-6)


def test_solve_record_timing(tmp_path):
    json_p = tmp_path / "s.json"
    assert main(["solve", "--config", _write(tmp_path, _cfg()), "--csv", str(tmp_path / "t.csv"),
                 "--json", str(json_p), "--record-timing"]) == 0
    assert json.loads(json_p.read_text())["wall_time_seconds"] > 0


def test_solve_divergence(tmp_path):
    d = {
        "space": {"dim": 1},
        "operator": {"kind": "diagonal_linear", "params": [10]},
        "schedule": {"lambda": [0.9] * 1000},
        "run": {"scheme": "unregularized", "max_iter": 1000, "x1": [1], "record_every": 100},
    }
    csv_p, json_p = tmp_path / "t.csv", tmp_path / "s.json"
    assert main(["solve", "--config", _write(tmp_path, d), "--csv", str(csv_p), "--json", str(json_p)]) == 3
    s = json.loads(json_p.read_text())
    assert s["status"] == "diverged"
    assert s["stop_reason"] == "diverged"
    assert not s["schedule_valid"]["valid"]
    rows = _rows(csv_p)
    assert int(rows[-1][0]) == s["iterations_used"]


def test_solve_unwritable_output(tmp_path):
    bad = str(tmp_path / "missing" / "t.csv")
    assert main(["solve", "--config", _write(tmp_path, _cfg()), "--csv", bad,
                 "--json", str(tmp_path / "s.json")]) == 5


def test_solve_invalid_config(tmp_path):
    assert main(["solve", "--config", _write(tmp_path, _cfg(x1=[1, 2, 3]))]) == 2
    assert main(["solve", "--preset", "nope"]) == 2
    assert main(["solve", "--config", str(tmp_path / "absent.json")]) == 5
    p = tmp_path / "broken.json"
    p.write_text("{")
    assert main(["solve", "--config", str(p)]) == 2


def test_solve_rerun_is_byte_identical(tmp_path):
    cfg = _write(tmp_path, _cfg(track_path=True))
    for tag in "ab":
        assert main(["solve", "--config", cfg, "--csv", str(tmp_path / f"{tag}.csv"),
                     "--json", str(tmp_path / f"{tag}.json")]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


# -- path -------------------------------------------------------------------

def test_path_diagonal_closed_form(tmp_path):
    out = tmp_path / "p.csv"
    assert main(["path", "--config", _write(tmp_path, _cfg()), "--points", "50", "--tol", "1e-12",
                 "--out", str(out)]) == 0
    rows = _rows(out)
    assert tuple(rows[0]) == PATH_HEADER
    c = np.array([1.0, 2.0])
    for r in rows[1:]:
        n, theta, err = int(r[0]), float(r[1]), float(r[3])
        assert theta == pytest.approx((n + 1.0) ** -0.3, rel=1e-15)
        assert abs(err - np.linalg.norm(theta / (theta + c))) <= 1e-8


def test_path_zero_at_anchor(tmp_path):
    d = _cfg(x1=[0.5, 0.5])
    d["operator"]["shift"] = [0.5, 1.0]
    out = tmp_path / "p.csv"
    assert main(["path", "--config", _write(tmp_path, d), "--points", "10", "--out", str(out)]) == 0
    assert all(float(r[3]) == 0.0 for r in _rows(out)[1:])


@pytest.mark.parametrize("tol", ["0", "-1", "nan"])
def test_path_rejects_bad_tol(tmp_path, tol):
    out = tmp_path / "p.csv"
    assert main(["path", "--config", _write(tmp_path, _cfg()), "--tol", tol, "--out", str(out)]) == 2
    assert not out.exists()


def test_path_inner_failure_writes_partial(tmp_path, monkeypatch):
    def failing(A, sched, x1, count, tol):
        good = cli.resolvents_at(A, [0.5, 0.4], x1, tol)
        exc = ResolventError("stalled", best=None, residual=1.0)
        exc.index, exc.partial = 3, good
        raise exc

    monkeypatch.setattr(cli, "regularization_path", failing)
    out = tmp_path / "p.csv"
    assert main(["path", "--config", _write(tmp_path, _cfg()), "--points", "5", "--out", str(out)]) == 4
    assert len(_rows(out)) == 3


# -- audit ------------------------------------------------------------------

def test_audit_hilbert_all(tmp_path):
    out = tmp_path / "a.json"
    assert main(["audit", "--dim", "3", "--s", "2", "--p", "2", "--inequality", "all",
                 "--samples", "10000", "--seed", "1", "--out", str(out)]) == 0
    reps = json.loads(out.read_text())
    assert [r["inequality"] for r in reps] == ["phi_bounds", "lemma_ball", "vp_shift", "three_point"]
    assert all(r["violations"] == 0 for r in reps)


def test_audit_findings_do_not_fail(tmp_path):
    out = tmp_path / "a.json"
    assert main(["audit", "--dim", "2", "--s", "2", "--p", "1.5", "--samples", "200", "--out", str(out)]) == 0
    reps = {r["inequality"]: r for r in json.loads(out.read_text())}
    assert reps["phi_bounds"]["violations"] >= 1
    assert reps["three_point"]["violations"] >= 1


def test_audit_usage_errors(tmp_path, capsys):
    assert main(["audit", "--dim", "2", "--inequality", "lemma9", "--samples", "10"]) == 2
    assert main(["audit", "--dim", "0", "--samples", "10"]) == 2
    assert main(["audit", "--dim", "2", "--samples", "0"]) == 2


def test_audit_to_stdout(capsys):
    assert main(["audit", "--dim", "1", "--inequality", "three_point", "--samples", "5"]) == 0
    reps = json.loads(capsys.readouterr().out)
    assert len(reps) == 1 and reps[0]["samples"] == 5


# -- compare ----------------------------------------------------------------

def test_compare_hilbert_schemes(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["compare", "--config", _write(tmp_path, _cfg()), "--schemes",
                 "regularized,unregularized,accretive,mann", "--out", str(out)]) == 0
    rows = _rows(out)
    assert tuple(rows[0]) == COMPARE_HEADER
    table = {r[0]: r for r in rows[1:]}
    assert list(table) == ["regularized", "unregularized", "accretive", "mann"]
    assert abs(float(table["accretive"][1]) - float(table["regularized"][1])) <= 1e-12
    assert abs(float(table["mann"][1]) - float(table["unregularized"][1])) <= 1e-12
    assert all(float(r[4]) > 0 for r in rows[1:])


def test_compare_single_scheme(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["compare", "--config", _write(tmp_path, _cfg()), "--schemes", "mann", "--out", str(out)]) == 0
    assert len(_rows(out)) == 2


@pytest.mark.parametrize("schemes", ["", ",", "regularized,mann", "regularized,bogus"])
def test_compare_rejects_before_running(tmp_path, schemes):
    d = _cfg()
    d["space"]["s"] = 3
    out = tmp_path / "c.csv"
    assert main(["compare", "--config", _write(tmp_path, d), "--schemes", schemes, "--out", str(out)]) == 2
    assert not out.exists()


# -- misc -------------------------------------------------------------------

def test_presets_listing(capsys):
    assert main(["presets"]) == 0
    assert "hilbert-identity" in capsys.readouterr().out.split()


def test_usage_errors():
    assert main([]) == 2
    assert main(["solve"]) == 2
    assert main(["solve", "--preset", "a", "--config", "b"]) == 2
    assert main(["--help"]) == 0


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "regdual", "presets"], capture_output=True, text=True,
                          cwd=tmp_path)
    assert proc.returncode == 0
    assert "lp3-diagonal" in proc.stdout
