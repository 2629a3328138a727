import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qss_rocof.frames import CLARKE_MATRIX, clarke
from qss_rocof.signals import SampledWaveform

from conftest import make

finite = st.floats(-1e3, 1e3, allow_nan=False)


def test_amplitude_invariant(balanced):
    sv = clarke(balanced.scaled(2.5))
    np.testing.assert_allclose(sv.mag2, 2.5**2, rtol=1e-12)
    np.testing.assert_allclose(sv.v[:, 2], 0.0, atol=1e-12)
    np.testing.assert_allclose(sv.v[:, 0], 2.5 * balanced.va, atol=1e-12)


def test_zero_sequence_goes_to_gamma():
    wf = SampledWaveform(1000.0, 0.0, np.full((3, 5), 0.3))
    sv = clarke(wf)
    np.testing.assert_allclose(sv.v, [[0.0, 0.0, 0.3]] * 5, atol=1e-15)


def test_matches_matrix():
    wf = make("transient_event", duration_s=1.1)
    sv = clarke(wf)
    np.testing.assert_allclose(sv.v, (CLARKE_MATRIX @ wf.phases).T, atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(arrays(float, (3, 6), elements=finite), arrays(float, (3, 6), elements=finite), finite, finite)
def test_linearity(x, y, a, b):
    fx = clarke(SampledWaveform(100.0, 0.0, x)).v
    fy = clarke(SampledWaveform(100.0, 0.0, y)).v
    fz = clarke(SampledWaveform(100.0, 0.0, a * x + b * y)).v
    np.testing.assert_allclose(fz, a * fx + b * fy, atol=1e-9 * (1 + abs(a) + abs(b)) * 1e3)
