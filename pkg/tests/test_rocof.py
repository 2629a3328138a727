import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qss_rocof.gate import GateTrace
from qss_rocof.geometric import FrequencyTrace
from qss_rocof.rocof import GatedRollingAverage, rocof_qss_gated, rolling_mean

FS = 1000.0


def gated(values, tout, window_s):
    tout = np.asarray(tout, bool)
    gate = GateTrace(FS, np.zeros(tout.size), tout, 0.05)
    return rocof_qss_gated(FrequencyTrace(FS, values, "hz_per_s"), gate, window_s)


def test_two_segment_mean_by_hand():
    # window of 4 intervals; samples 0..9, gate closed on 5..6
    x = np.array([1, 1, 1, 1, 1, 3, 3, 3, 3, 3], float)
    tout = np.ones(10, bool)
    tout[5:7] = False
    r = gated(x, tout, 0.004)
    # at i = 8: window samples 4..8 with trapezoid weights .5,1,1,1,.5 ; 5 and 6 gated out
    # numerator .5*1 + 1*3 + .5*3 = 5 ; denominator .5 + 1 + .5 = 2
    assert r.values[8] == pytest.approx(2.5)
    assert r.effective_window_s[8] == pytest.approx(0.002)
    # at i = 9: samples 5..9 -> 7,8,9 in: (1*3 + 1*3 + .5*3) / 2.5
    assert r.values[9] == pytest.approx(3.0)
    # at i = 0 only a half-weight sample is in: 0.5 ms of a 4 ms window
    assert r.values[0] == 1.0 and not r.low_support[0]
    r10 = gated(x, tout, 0.01)
    assert r10.low_support[0] and not r10.low_support[2]


def test_undefined_when_window_fully_gated():
    tout = np.ones(30, bool)
    tout[5:20] = False
    r = gated(np.arange(30.0), tout, 0.005)
    assert np.isnan(r.values[10:20]).all() and not r.defined[10:20].any()
    assert r.defined[9] and r.defined[20]
    assert r.held[15] == r.values[9]


def test_rolling_mean_definition():
    x = np.full(50, 2.0)
    valid = np.ones(50, bool)
    valid[30] = False
    r = rolling_mean(FrequencyTrace(FS, x, "hz_per_s", valid=valid), 0.01)
    assert not r.defined[:10].any()
    assert r.defined[10:30].all()
    assert not r.defined[30:41].any() and r.defined[41:].all()
    np.testing.assert_allclose(r.values[r.defined], 2.0)


@settings(max_examples=60, deadline=None)
@given(arrays(float, 80, elements=st.floats(-1e3, 1e3)), arrays(bool, 80), st.integers(1, 30))
def test_streaming_matches_batch(x, tout, n):
    r = gated(x, tout, n / FS)
    stream = GatedRollingAverage(n / FS, FS)
    for i in range(x.size):
        value, eff = stream.push(x[i], tout[i])
        if value is None:
            assert not r.defined[i]
        else:
            assert r.values[i] == pytest.approx(value, rel=1e-9, abs=1e-9)
            assert r.effective_window_s[i] == pytest.approx(eff, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(arrays(float, 60, elements=st.floats(-1e6, 1e6)), arrays(bool, 60), st.integers(1, 20))
def test_mean_bounded_by_gated_in_samples(x, tout, n):
    r = gated(x, tout, n / FS)
    for i in np.flatnonzero(r.defined):
        lo = max(0, i - n)
        sel = x[lo:i + 1][tout[lo:i + 1]]
        slack = 1e-9 * (1 + np.abs(sel).max())
        assert sel.min() - slack <= r.values[i] <= sel.max() + slack
