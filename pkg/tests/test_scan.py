import json
import os
import signal
import subprocess
import sys
import time

import pytest

from dlab.scan import (
    CSV_COLUMNS, CheckpointError, Report, ScanConfig, emit, load_checkpoint, read_report, render,
    resume, run_scan, scan_r,
)


def config(tmp_path, lo=1, hi=50, s_max=10 ** 4, x_max=10 ** 6, **kw):
    return ScanConfig(lo, hi, s_max, x_max, checkpoint_path=str(tmp_path / "ck.json"), **kw)


class Stop(Exception):
    pass


def test_single_r_worked_example():
    res = scan_r(2, 10, 10 ** 6)
    # s = 3 ({1, 5, 10}) and s = 8 ({1, 5, 65}), both in standard classes
    assert res["row"]["triples"] == 2
    assert res["row"]["pruned_lemma41"] == 2
    assert res["row"]["pruned_s"]["lemma41"] == [3, 8]
    assert res["anomalies"] == []


def test_r2_report(tmp_path):
    rep = run_scan(config(tmp_path, 2, 2, 10))
    assert [row["r"] for row in rep.per_r] == [2]
    assert 3 in rep.per_r[0]["pruned_s"]["lemma41"] and rep.ok


def test_empty_range(tmp_path):
    rep = run_scan(config(tmp_path, 5, 4))
    assert rep.per_r == [] and rep.ok
    assert rep.totals["quadruples"] == 0


def test_config_validation(tmp_path):
    with pytest.raises(ValueError):
        config(tmp_path, workers=0)
    with pytest.raises(ValueError):
        config(tmp_path, s_max=-1)
    with pytest.raises(ValueError):
        config(tmp_path, output_format="xml")


def test_default_checkpoint_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("DLAB_CHECKPOINT_DIR", str(tmp_path))
    c = ScanConfig(1, 3, 10, 10)
    assert os.path.dirname(c.checkpoint_path) == str(tmp_path)


def test_checkpoint_contents(tmp_path):
    c = config(tmp_path, 1, 10)
    run_scan(c)
    ck = load_checkpoint(c.checkpoint_path)
    assert ck["completed_r"] == 10
    assert ck["config_hash"] == c.config_hash()
    assert {"schema_version", "anomalies", "started_at", "updated_at"} <= ck.keys()


def test_interrupt_and_resume_matches_one_shot(tmp_path):
    (tmp_path / "one").mkdir()
    one = run_scan(config(tmp_path / "one"))

    c = config(tmp_path, checkpoint_every=0)
    seen = []

    def stop_at_25(r):
        seen.append(load_checkpoint(c.checkpoint_path)["completed_r"])
        if r == 25:
            raise Stop

    with pytest.raises(Stop):
        run_scan(c, on_progress=stop_at_25)
    assert load_checkpoint(c.checkpoint_path)["completed_r"] == 25
    assert seen == sorted(seen)
    resumed = resume(c.checkpoint_path)
    assert render(resumed, "json", timing=False) == render(one, "json", timing=False)
    assert render(resumed, "csv") == render(one, "csv")


def test_resume_finished_is_idempotent(tmp_path):
    c = config(tmp_path, 1, 10)
    first = run_scan(c)
    again = resume(c.checkpoint_path)
    assert render(again, "json") == render(first, "json")


def test_resume_errors(tmp_path):
    with pytest.raises(CheckpointError):
        resume(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(CheckpointError):
        resume(bad)
    c = config(tmp_path, 1, 3)
    run_scan(c)
    data = json.loads(open(c.checkpoint_path).read())
    data["schema_version"] = 99
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps(data))
    before = wrong.read_text()
    with pytest.raises(CheckpointError):
        resume(wrong)
    assert wrong.read_text() == before


def test_unwritable_checkpoint(tmp_path):
    c = ScanConfig(1, 2, 10, 10, checkpoint_path=str(tmp_path / "nope" / "ck.json"))
    with pytest.raises(OSError):
        run_scan(c)


def test_schedule_independence(tmp_path):
    (tmp_path / "one").mkdir()
    (tmp_path / "many").mkdir()
    r1 = run_scan(config(tmp_path / "one", 1, 30, workers=1))
    r8 = run_scan(config(tmp_path / "many", 1, 30, workers=4))
    assert render(r1, "json", timing=False) == render(r8, "json", timing=False)


def test_emit_json_round_trip(tmp_path):
    rep = run_scan(config(tmp_path, 1, 12))
    path = emit(rep, "json", tmp_path / "r.json")
    back = read_report(path)
    assert back.to_dict() == json.loads(path.read_text())
    assert back.per_r == rep.per_r and back.totals == rep.totals


def test_emit_csv_rows(tmp_path):
    rep = run_scan(config(tmp_path))
    lines = emit(rep, "csv", tmp_path / "r.csv").read_text().splitlines()
    assert lines[0].split(",") == CSV_COLUMNS
    assert len(lines) == 51


def test_emit_anomaly_block(tmp_path):
    rep = Report({"r_min": 1, "r_max": 1, "s_max": 1, "x_max": 1},
                 [{"r": 7, "triples": 1, "pruned_lemma41": 0, "pruned_thm11": 0, "pruned_thm12": 0,
                   "pruned_thm15": 0, "survivors": 1, "survivor_s": [9], "quadruples": 1}],
                 [{"r": 7, "s": 9, "x": 1234, "tag": "quadruple", "exclusions": []}])
    data = json.loads(emit(rep, "json", tmp_path / "a.json").read_text())
    assert data["anomalies"] == [{"r": 7, "s": 9, "x": 1234, "tag": "quadruple", "exclusions": []}]
    assert not rep.ok


def test_plot_written(tmp_path):
    from dlab.plotting import plot_report
    rep = run_scan(config(tmp_path, 1, 25))
    out = plot_report(rep, tmp_path / "scan.png")
    assert out.stat().st_size > 1000


def test_kill_never_corrupts_checkpoint(tmp_path):
    ck = tmp_path / "ck.json"
    cmd = [sys.executable, "-m", "dlab", "--quiet", "scan", "run", "--r", "1:600", "--s-max", "100000",
           "--x-max", "10000000", "--checkpoint", str(ck), "--checkpoint-every", "0"]
    proc = subprocess.Popen(cmd, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
    deadline = time.time() + 60
    while time.time() < deadline:
        if ck.exists() and load_checkpoint(ck)["completed_r"] >= 20:
            break
        time.sleep(0.01)
    proc.send_signal(signal.SIGKILL)
    proc.wait()
    partial = load_checkpoint(ck)
    assert 20 <= partial["completed_r"] < 600
    resumed = resume(ck)
    (tmp_path / "fresh").mkdir()
    fresh = run_scan(ScanConfig(1, 600, 10 ** 5, 10 ** 7, checkpoint_path=str(tmp_path / "fresh" / "ck.json")))
    assert render(resumed, "json", timing=False) == render(fresh, "json", timing=False)
