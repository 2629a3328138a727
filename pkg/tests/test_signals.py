import numpy as np
import pytest

from qss_rocof.signals import (CSV_HEADER, SampledWaveform, SignalSpec, WaveformParseError,
                               generate, instantaneous_frequency, read_csv, write_csv)

from conftest import FS, make


def test_balanced_shape_and_values():
    wf = make("balanced", duration_s=2.0)
    assert len(wf) == 10_000
    t = wf.time
    np.testing.assert_allclose(wf.va, np.cos(2 * np.pi * 50 * t), atol=1e-12)
    np.testing.assert_allclose(wf.vb, np.cos(2 * np.pi * 50 * t - 2 * np.pi / 3), atol=1e-12)
    np.testing.assert_allclose(wf.phases.sum(axis=0), 0.0, atol=1e-12)


def test_chirp_phase_matches_integrated_frequency():
    spec = SignalSpec("chirp", ramp_hz_per_s=-1.0, ramp_start_s=0.5, duration_s=1.0)
    wf = generate(spec, FS)
    t = wf.time
    f = instantaneous_frequency(spec, t)
    assert f[0] == 50.0 and f[-1] == pytest.approx(50.0 - (t[-1] - 0.5))
    # phase from cumulative integral of f on a fine grid
    fine = np.linspace(0, t[-1], 200_001)
    ff = instantaneous_frequency(spec, fine)
    phase = np.concatenate([[0], np.cumsum(0.5 * (ff[1:] + ff[:-1]) * np.diff(fine))]) * 2 * np.pi
    np.testing.assert_allclose(wf.va, np.cos(np.interp(t, fine, phase)), atol=1e-6)


def test_amplitude_step():
    wf = make("amplitude_step", step_ratio=1.2, step_time_s=1.0)
    env = np.sqrt(wf.va**2 + (wf.vb - wf.vc) ** 2 / 3.0)
    assert np.allclose(env[wf.time < 1.0], 1.0)
    assert np.allclose(env[wf.time >= 1.0], 1.2)


def test_noise_is_seeded():
    a = make("balanced", noise_std=0.01, seed=7)
    b = make("balanced", noise_std=0.01, seed=7)
    c = make("balanced", noise_std=0.01, seed=8)
    assert np.array_equal(a.phases, b.phases)
    assert not np.array_equal(a.phases, c.phases)


def test_harmonics_added():
    wf = make("polluted", harmonics=((5, 0.1),), duration_s=0.02)
    spectrum = np.abs(np.fft.rfft(wf.va)) / (len(wf) / 2)
    assert spectrum[1] == pytest.approx(1.0, abs=1e-9)
    assert spectrum[5] == pytest.approx(0.1, abs=1e-9)


@pytest.mark.parametrize("kw", [dict(kind="nope"), dict(kind="balanced", duration_s=-1),
                                dict(kind="balanced", amplitude_pu=0.0)])
def test_invalid_spec(kw):
    with pytest.raises(ValueError):
        generate(SignalSpec(**kw), FS)


def test_rejects_low_sample_rate():
    with pytest.raises(ValueError, match="sample rate"):
        generate(SignalSpec("balanced"), 900.0)


def test_csv_round_trip(tmp_path):
    wf = make("transient_event", noise_std=0.001, seed=3, duration_s=0.2)
    path = tmp_path / "w.csv"
    write_csv(wf, path)
    assert path.read_text().splitlines()[0] == ",".join(CSV_HEADER)
    back = read_csv(path)
    assert back.sample_rate_hz == pytest.approx(FS)
    assert np.array_equal(back.phases, wf.phases)


def test_csv_missing_column(tmp_path):
    path = tmp_path / "w.csv"
    path.write_text("time_s,va,vb\n0,1,2\n")
    with pytest.raises(WaveformParseError, match="vc"):
        read_csv(path)


def test_csv_bad_row_reports_line(tmp_path):
    path = tmp_path / "w.csv"
    path.write_text("time_s,va,vb,vc\n0,1,0,0\n0.0002,x,0,0\n0.0004,1,0,0\n")
    with pytest.raises(WaveformParseError, match="row 3"):
        read_csv(path)


def test_csv_jitter_rejected(tmp_path):
    path = tmp_path / "w.csv"
    path.write_text("time_s,va,vb,vc\n0,1,0,0\n0.0002,1,0,0\n0.0005,1,0,0\n")
    with pytest.raises(WaveformParseError):
        read_csv(path)


def test_scaled():
    wf = SampledWaveform(FS, 0.0, np.ones((3, 4)))
    assert np.array_equal(wf.scaled(3.0).phases, 3.0 * np.ones((3, 4)))
