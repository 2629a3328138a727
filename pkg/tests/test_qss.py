import math

import numpy as np
import pytest
from scipy.optimize import brentq

from qss_rocof.frames import clarke
from qss_rocof.geometric import FrequencyTrace, omega_v
from qss_rocof.qss import detect_period, omega_qss, qss_frequency

from conftest import FS, make


def chirp_turning(t_end, span, f0=50.0, rate=-1.0):
    """Exact turning angle of a chirp over [t_end - span, t_end]."""
    a = t_end - span
    return 2 * np.pi * (f0 * span + 0.5 * rate * (t_end**2 - a**2))


def test_chirp_period_against_root_finder(chirp):
    w = omega_v(clarke(chirp))
    periods = detect_period(w)
    rng = np.random.default_rng(0)
    for i in rng.choice(np.flatnonzero(periods.valid), 40, replace=False):
        t = i / FS
        T = brentq(lambda s: chirp_turning(t, s) - 2 * np.pi, 0.015, 0.025, xtol=1e-14)
        # omega_v carries the derivative stencil bias, (w h)^4 / 30 ~ 5e-7 relative
        assert periods.period_s[i] == pytest.approx(T, rel=1e-6)


def test_balanced_period(balanced):
    periods, wq = qss_frequency(omega_v(clarke(balanced)))
    first = periods.valid.argmax()
    assert first == pytest.approx(0.02 * FS, abs=1)
    np.testing.assert_allclose(periods.period_s[periods.valid], 0.02, atol=1e-8)
    np.testing.assert_allclose(wq.to("hz").values[periods.valid], 50.0, atol=1e-4)


def test_invalid_samples_spoil_the_loop():
    vals = np.full(1000, 2 * np.pi * 50)
    valid = np.ones(1000, bool)
    valid[500] = False
    periods = detect_period(FrequencyTrace(FS, vals, valid=valid))
    idx = np.arange(1000)
    assert not periods.valid[(idx >= 500) & (idx <= 600)].any()
    assert periods.valid[602:].all()


def test_lookback_limits_period():
    vals = np.full(2000, 2 * np.pi * 8.0)  # T = 0.125 s > lookback
    periods = detect_period(FrequencyTrace(FS, vals), lookback_s=0.1)
    assert not periods.valid.any()
    with pytest.raises(ValueError):
        detect_period(FrequencyTrace(FS, vals), lookback_s=0.01)


def test_omega_qss_is_two_pi_over_T(chirp):
    w = omega_v(clarke(chirp))
    periods = detect_period(w)
    wq = omega_qss(w, periods)
    m = periods.valid
    np.testing.assert_allclose(wq.values[m] * periods.period_s[m], 2 * math.pi, rtol=1e-14)
