import csv

import pytest

from qss_rocof.cli import main
from qss_rocof.relay import RelayConfig


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_generate_balanced(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["generate", "--kind", "balanced", "--f0", "50", "--fs", "5000", "--dur", "2",
                 "-o", str(out)]) == 0
    r = rows(out)
    assert r[0] == ["time_s", "va", "vb", "vc"] and len(r) == 10_001


def test_generate_deterministic(tmp_path):
    args = ["generate", "--kind", "polluted", "--noise", "0.01", "--seed", "4", "--dur", "0.1"]
    main(args + ["-o", str(tmp_path / "a.csv")])
    main(args + ["-o", str(tmp_path / "b.csv")])
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_analyze_outputs(tmp_path, capsys):
    wf = tmp_path / "e.csv"
    main(["generate", "--kind", "transient-event", "--event-start", "1", "--event-len", "0.02",
          "-o", str(wf)])
    assert main(["analyze", str(wf), "--window-ms", "250", "--out-dir", str(tmp_path)]) == 0
    series = rows(tmp_path / "e_series.csv")
    assert series[0][0] == "time_s" and len(series) == 10_001
    summary = dict(rows(tmp_path / "e_summary.csv")[1:])
    assert float(summary["rocof_conventional_max_abs_hz_s"]) > 1.0
    assert float(summary["rocof_qss_max_abs_hz_s"]) < 1.0


def test_relay_and_sweep(tmp_path, capsys):
    wf = tmp_path / "o.csv"
    main(["generate", "--kind", "outage", "--ramp", "-1.5", "--dur", "3", "-o", str(wf)])
    cfg = tmp_path / "q.json"
    RelayConfig.qss().to_file(cfg)
    assert main(["relay", str(wf), "--qss-config", str(cfg), "--out-dir", str(tmp_path)]) == 0
    trips = rows(tmp_path / "trips_qss.csv")
    assert trips[0] == ["stage", "t_detect_s", "t_trip_s", "shed_pu"] and len(trips) == 3
    assert main(["sweep-epsilon", str(wf), "--event-start", "1.0", "-o", str(tmp_path / "s.csv")]) == 0
    assert "plateau" in capsys.readouterr().out
    assert len(rows(tmp_path / "s.csv")) == 42


def test_epsilon_recommend_warns(tmp_path, capsys):
    wf = tmp_path / "e.csv"
    main(["generate", "--kind", "transient-event", "-o", str(wf)])
    assert main(["epsilon-recommend", str(wf)]) == 0
    err = capsys.readouterr().err
    assert "warning" in err


@pytest.mark.parametrize("argv", [[], ["nope"], ["analyze"], ["generate", "--kind", "x", "-o", "f"],
                                  ["sweep-epsilon", "f.csv"], ["analyze", "f.csv", "--window-ms", "abc"]])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 1


def test_usage_error_from_values(tmp_path):
    assert main(["generate", "--fs", "100", "-o", str(tmp_path / "x.csv")]) == 1


def test_data_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("time_s,va\n0,1\n")
    assert main(["analyze", str(bad)]) == 2
    assert main(["analyze", str(tmp_path / "missing.csv")]) == 2
    wf = tmp_path / "w.csv"
    main(["generate", "--dur", "0.5", "-o", str(wf)])
    cfg = tmp_path / "c.json"
    cfg.write_text("{not json")
    assert main(["relay", str(wf), "--conv-config", str(cfg)]) == 2
