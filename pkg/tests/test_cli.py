import csv
import io
import subprocess
import sys

import pytest

from pdcoop.cli import main
from pdcoop.config import PRESETS, load_config
from pdcoop.experiments import RESULT_COLUMNS


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_no_args_prints_usage(capsys):
    code, _, err = run(capsys)
    assert code != 0 and "usage" in err


def test_unknown_subcommand(capsys):
    code, _, err = run(capsys, "frobnicate")
    assert code != 0 and "usage" in err


def test_meta_without_subcommand(capsys):
    code, _, err = run(capsys, "meta")
    assert code == 2 and "usage" in err


def test_analytics(capsys):
    code, out, _ = run(capsys, "analytics", "--delta", "0.9", "--r", "0.5", "--s", "0.5")
    assert code == 0
    (row,) = rows(out)
    assert float(row["klr"]) == pytest.approx(3.51, abs=0.005)
    assert row["size_good"] == "0.888888888889"


def test_analytics_many_and_errors(capsys):
    code, out, _ = run(capsys, "analytics", "--game", "0.9,0.5,0.5", "--game", "0.75,0.46,0.38")
    assert code == 0 and len(rows(out)) == 2
    code, _, err = run(capsys, "analytics", "--delta", "0.5", "--r", "0.3", "--s", "0.5")
    assert code == 1 and "error" in err
    code, _, err = run(capsys, "analytics", "--delta", "0.5")
    assert code == 1


def test_sample_s(capsys):
    code, out, _ = run(capsys, "sample-s", "--delta", "0.9", "--r", "0.9", "--seed", "3")
    assert code == 0
    recs = rows(out)
    assert len(recs) == 15
    for rec in recs:
        k = int(rec["stratum"])
        assert k <= float(rec["klr"]) < k + 1


def test_classify(capsys):
    wsls = "2,1,0,1,0,1,1,0"
    code, out, _ = run(capsys, "classify", "--row", wsls, "--col", wsls)
    assert code == 0
    assert "label,wsls" in out and "cooperative,1" in out
    code, _, err = run(capsys, "classify", "--row", "1,2", "--col", wsls)
    assert code == 1


def test_frontier(capsys):
    code, out, _ = run(capsys, "frontier", "--r", "0.775", "--n", "5")
    assert code == 0 and len(rows(out)) == 5


def test_meta_verify(capsys):
    code, out, err = run(capsys, "meta", "verify")
    assert code == 0
    assert len(rows(out)) == 29
    code, _, _ = run(capsys, "meta", "verify", "--strict")
    assert code == 1  # the printed table has rows outside tolerance


def test_simulate_aggregate_bins_calibrate(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text(
        "[grid]\nalpha = 0.1\nepsilon = 0.1\npairs = 0.975:0.975, 0.9:0.95\n"
        "[sampling]\nmode = offsets\noffsets = -3, -1, 1, 3\n"
        "[run]\nperiods = 2000\nreplications = 3\nseed = 4\n"
    )
    out = tmp_path / "res.csv"
    code, _, _ = run(capsys, "simulate", "--config", str(cfg), "--out", str(out), "--workers", "2")
    assert code == 0
    text = out.read_text()
    assert text.splitlines()[0] == ",".join(RESULT_COLUMNS)
    assert len(text.splitlines()) == 1 + 8

    out2 = tmp_path / "res2.csv"
    code, _, _ = run(capsys, "simulate", "--config", str(cfg), "--out", str(out2), "--workers", "1")
    assert out2.read_text() == text
    out3 = tmp_path / "res3.csv"
    run(capsys, "simulate", "--config", str(cfg), "--out", str(out3), "--seed", "5")
    assert out3.read_text() != text

    code, agg, _ = run(capsys, "aggregate", "--results", str(out), "--grid-points", "4")
    assert code == 0 and len(rows(agg)) == 2 * 4
    code, b, _ = run(capsys, "bins", "--results", str(out), "--x", "offset")
    assert code == 0 and rows(b)
    code, cal, _ = run(capsys, "calibrate", "--results", str(out))
    assert code in (0, 1)


def test_meta_correlate(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[grid]\nalpha = 0.1\nepsilon = 0.1\npairs = 0.975:0.975, 0.9:0.95, 0.8:0.8\n"
                   "[run]\nperiods = 200\nreplications = 1\n")
    res = tmp_path / "res.csv"
    assert main(["simulate", "--config", str(cfg), "--out", str(res)]) == 0
    rates = tmp_path / "rates.csv"
    rates.write_text("delta,r,s,game_index,coop_rate,n\n0.9,0.5,0.5,1,0.6,10\n0.75,0.5,0.125,1,0.8,10\n")
    capsys.readouterr()
    code, out, _ = run(capsys, "meta", "correlate", "--rates", str(rates), "--results", str(res), "--k", "10")
    assert code == 0
    (rec,) = rows(out)
    assert rec["game_index"] == "1" and rec["treatments"] == "2"


def test_bad_override(capsys):
    code, _, err = run(capsys, "simulate", "--preset", "desk", "--periods", "0")
    assert code == 1


def test_missing_file(capsys):
    code, _, err = run(capsys, "aggregate", "--results", "/nonexistent.csv")
    assert code == 1


def test_presets_and_config(tmp_path):
    assert PRESETS["desk"].grid.replications == 100 and PRESETS["desk"].periods == 10**6
    cfg = tmp_path / "c.ini"
    cfg.write_text("[grid]\ndelta = 0.6, 0.7\nr = 0.9\n[run]\ninit = pessimistic\nworkers = 3\n"
                   "[output]\nresults = x.csv\n")
    rc = load_config(str(cfg), PRESETS["desk"])
    assert rc.grid.delta_r_pairs() == [(0.6, 0.9), (0.7, 0.9)]
    assert rc.workers == 3 and rc.results_path == "x.csv"
    assert rc.grid.init_mode.value == "pessimistic"
    assert rc.with_overrides(workers=1).workers == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pdcoop", "analytics", "--game", "0.9,0.5,0.5"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "3.5104" in proc.stdout
