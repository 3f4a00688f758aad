import csv
import io
import json

import numpy as np
import pytest

from anholonomy import cli
from anholonomy.cli import CSV_COLUMNS, ConfigError, RunConfig, main, rows_to_csv, track_rows


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_three_qubits(capsys):
    code, out, _ = run(capsys, "verify", "--qubits", "3", "--steps", "512", "--no-timestamp")
    assert code == 0
    rep = json.loads(out)
    assert rep["schema"] == 1 and rep["passed"]
    re, im = rep["numeric"]["gamma_mp"]
    assert abs(re + 1) < 1e-6 and abs(im) < 1e-6
    assert rep["numeric"]["permutation"] == [1, 2, 3, 4, 5, 6, 7, 0]
    assert rep["numeric"]["windings"] == [0] * 7 + [1]


def test_verify_one_qubit_coarse(capsys):
    code, out, _ = run(capsys, "verify", "--qubits", "1", "--steps", "64", "--no-timestamp")
    assert code == 0
    rep = json.loads(out)
    assert "holonomy_max_deviation" in rep["numeric"]
    assert rep["verdicts"]["holonomy_numeric_vs_analytic"]["pass"]


def test_every_verdict_carries_tolerance(capsys):
    _, out, _ = run(capsys, "holonomy", "--qubits", "2", "--steps", "128", "--no-timestamp")
    for v in json.loads(out)["verdicts"].values():
        assert set(v) == {"pass", "value", "tol"}


def test_report_is_deterministic(capsys):
    argv = ("verify", "--qubits", "2", "--steps", "128", "--no-timestamp")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_timestamp_present_by_default(capsys):
    _, out, _ = run(capsys, "spectrum", "--qubits", "2")
    assert "timestamp" in json.loads(out)


def test_spectrum_report(capsys):
    code, out, _ = run(capsys, "spectrum", "--qubits", "4", "--no-timestamp")
    assert code == 0
    rep = json.loads(out)
    assert rep["analytic"]["permutation"] == [(m + 1) % 16 for m in range(16)]


def test_negative_control_report(capsys):
    code, out, _ = run(capsys, "negative-control", "--steps", "64", "--no-timestamp")
    assert code == 0
    rep = json.loads(out)
    assert rep["numeric"]["degenerate"] is True
    assert rep["verdicts"]["anholonomy absent: expected"]["pass"]


@pytest.mark.parametrize(
    "argv",
    [
        ("verify", "--steps", "10"),
        ("verify", "--qubits", "0"),
        ("verify", "--qubits", "11"),
        ("verify", "--cycles", "0"),
        ("verify", "--fd-step", "1"),
    ],
)
def test_usage_errors_exit_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "error" in err


def test_unknown_command_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == 2


def test_failed_verdict_exits_one(capsys, monkeypatch):
    monkeypatch.setattr(cli, "TOL_HOLONOMY", -1.0)
    code, out, err = run(capsys, "verify", "--qubits", "1", "--steps", "64", "--no-timestamp")
    assert code == 1
    assert not json.loads(out)["passed"]
    assert "FAIL holonomy_numeric_vs_analytic" in err


def test_config_validation():
    with pytest.raises(ConfigError):
        RunConfig("verify", format="xml").validate()
    with pytest.raises(ConfigError):
        RunConfig("verify", lambda0=float("nan")).validate()
    assert RunConfig("track").validate().steps_per_cycle == 512


def test_track_rows_coarse_grid():
    cfg = RunConfig("track", n_qubits=1, steps_per_cycle=4, cycles=1)
    with pytest.warns(RuntimeWarning):
        rows = track_rows(cfg, strict=False)
    assert len(rows) == 10
    assert list(rows[0]) == list(CSV_COLUMNS)


def test_track_one_qubit_slope_and_labels():
    rows = track_rows(RunConfig("track", n_qubits=1, steps_per_cycle=64))
    t0 = [r for r in rows if r["track_id"] == 0]
    assert t0[-1]["eigenangle_unwrapped"] - t0[0]["eigenangle_unwrapped"] == pytest.approx(np.pi, abs=1e-6)
    for t in (0, 1):
        track = [r for r in rows if r["track_id"] == t]
        assert track[-1]["analytic_m"] == (track[0]["analytic_m"] + 1) % 2


def test_track_three_qubit_labels_advance():
    n = 3
    rows = track_rows(RunConfig("track", n_qubits=n, steps_per_cycle=64))
    last = max(r["step"] for r in rows)
    first = {r["track_id"]: r["analytic_m"] for r in rows if r["step"] == 0}
    final = {r["track_id"]: r["analytic_m"] for r in rows if r["step"] == last}
    assert all(final[t] == (first[t] + 1) % 2**n for t in first)


def test_track_csv_header_and_out_file(tmp_path, capsys):
    path = tmp_path / "flow.csv"
    code, out, _ = run(capsys, "track", "--qubits", "2", "--steps", "64", "--format", "csv", "--out", str(path))
    assert code == 0 and out == ""
    reader = csv.DictReader(io.StringIO(path.read_text()))
    assert tuple(reader.fieldnames) == CSV_COLUMNS
    assert sum(1 for _ in reader) == 65 * 4


def test_rows_to_csv_roundtrips_floats():
    rows = track_rows(RunConfig("track", n_qubits=1, steps_per_cycle=64))
    back = list(csv.DictReader(io.StringIO(rows_to_csv(rows))))
    assert float(back[7]["eigenangle_unwrapped"]) == rows[7]["eigenangle_unwrapped"]


def test_track_json(capsys):
    code, out, _ = run(capsys, "track", "--qubits", "1", "--steps", "64")
    doc = json.loads(out)
    assert code == 0 and doc["columns"] == list(CSV_COLUMNS)
    assert len(doc["rows"]) == 130


def test_verdict_csv(capsys):
    code, out, _ = run(capsys, "spectrum", "--qubits", "2", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "verdict,pass,value,tol"
