"""RoCoF estimators: formal QSS derivative, conventional rolling average and
the gated rolling average that skips samples where the frequency is not
defined.

Rolling averages are trapezoidal integrals over the trailing window
[t - window, t]; samples before the start of the record count as gated out.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy import signal

from .gate import GateTrace
from .geometric import FrequencyTrace, washout

DEFAULT_WASHOUT_TAU_S = 0.01
LOW_SUPPORT_FRACTION = 0.1


@dataclass(frozen=True)
class RocofTrace:
    sample_rate_hz: float
    values: np.ndarray             # NaN where undefined
    effective_window_s: np.ndarray
    defined: np.ndarray
    window_s: float
    unit: str = "hz_per_s"
    base_frequency_hz: float = 50.0
    held: np.ndarray | None = None         # last defined value, carried forward
    low_support: np.ndarray | None = None  # defined but < 10% of the window gated in
    t0_s: float = 0.0

    def __len__(self) -> int:
        return self.values.size

    @property
    def time(self) -> np.ndarray:
        return self.t0_s + np.arange(len(self)) / self.sample_rate_hz

    def to(self, unit: str) -> "RocofTrace":
        scale = _rate_scale(self.unit, unit, self.base_frequency_hz)
        return RocofTrace(
            self.sample_rate_hz, self.values * scale, self.effective_window_s, self.defined,
            self.window_s, unit, self.base_frequency_hz,
            None if self.held is None else self.held * scale, self.low_support, self.t0_s,
        )


def _rate_scale(src: str, dst: str, base_frequency_hz: float) -> float:
    probe = FrequencyTrace(1.0, np.array([1.0]), src, base_frequency_hz)
    return float(probe.to(dst).values[0])


def _window_samples(window_s: float, sample_rate_hz: float) -> int:
    if not window_s > 0:
        raise ValueError("window_s must be > 0")
    return max(1, int(round(window_s * sample_rate_hz)))


def _trapezoid_kernel(n_intervals: int) -> np.ndarray:
    w = np.ones(n_intervals + 1)
    w[0] = w[-1] = 0.5
    return w


def _rolling_integrals(x: np.ndarray, weight: np.ndarray, n_intervals: int, dt: float):
    """Trailing-window trapezoidal integrals of x*weight and of weight."""
    k = _trapezoid_kernel(n_intervals)
    num = signal.lfilter(k, [1.0], np.where(weight > 0, x * weight, 0.0)) * dt
    den = signal.lfilter(k, [1.0], weight) * dt
    return num, den


def _carry_forward(values: np.ndarray, defined: np.ndarray) -> np.ndarray:
    pos = np.where(defined, np.arange(values.size), -1)
    np.maximum.accumulate(pos, out=pos)
    held = np.where(pos >= 0, values[np.clip(pos, 0, None)], np.nan)
    return held


def rolling_mean(rate: FrequencyTrace, window_s: float) -> RocofTrace:
    """Plain trailing-window mean, defined once the window is full of valid samples."""
    fs = rate.sample_rate_hz
    n = _window_samples(window_s, fs)
    dt = 1.0 / fs
    x = np.where(rate.valid, rate.values, 0.0)
    num, _ = _rolling_integrals(x, np.ones_like(x), n, dt)
    bad = np.concatenate([[0], np.cumsum(~rate.valid)])
    idx = np.arange(len(rate))
    full = idx >= n
    lo = np.clip(idx - n, 0, None)
    defined = full & (bad[idx + 1] - bad[lo] == 0)
    span = n * dt
    values = np.where(defined, num / span, np.nan)
    eff = np.where(defined, span, 0.0)
    return RocofTrace(fs, values, eff, defined, span, rate.unit, rate.base_frequency_hz,
                      _carry_forward(values, defined), np.zeros_like(defined), rate.t0_s)


def rocof_formal(omega_qss: FrequencyTrace, gate: GateTrace,
                 washout_tau_s: float = DEFAULT_WASHOUT_TAU_S, unit: str = "hz_per_s") -> FrequencyTrace:
    """Derivative of the QSS frequency through a washout filter, undefined
    wherever the circulation gate is closed."""
    if len(omega_qss) != len(gate):
        raise ValueError("omega_qss and gate are not aligned")
    rate = washout(omega_qss, washout_tau_s).to(unit)
    return rate.replace(valid=rate.valid & gate.tout)


def rocof_conventional(omega_inst: FrequencyTrace, window_s: float,
                       washout_tau_s: float = DEFAULT_WASHOUT_TAU_S,
                       unit: str = "hz_per_s") -> RocofTrace:
    """Rolling mean of the washout derivative of a (filtered) instantaneous frequency."""
    return rolling_mean(washout(omega_inst, washout_tau_s).to(unit), window_s)


def rocof_qss_gated(omega_qss_prime: FrequencyTrace, gate: GateTrace, window_s: float) -> RocofTrace:
    """Gated rolling average:

        mean = int tout * omega' dtau / int tout dtau

    over the trailing window.  Gated-out samples are excluded from both
    integrals, not zero-filled.  Where no sample in the window is gated in the
    estimate is undefined; ``held`` keeps the last defined value.
    """
    if len(omega_qss_prime) != len(gate):
        raise ValueError("omega_qss_prime and gate are not aligned")
    fs = omega_qss_prime.sample_rate_hz
    n = _window_samples(window_s, fs)
    dt = 1.0 / fs
    use = gate.tout & omega_qss_prime.valid
    x = np.where(use, omega_qss_prime.values, 0.0)
    num, eff = _rolling_integrals(x, use.astype(float), n, dt)
    defined = eff > 0
    values = np.where(defined, num / np.where(defined, eff, 1.0), np.nan)
    span = n * dt
    return RocofTrace(
        fs, values, eff, defined, span, omega_qss_prime.unit, omega_qss_prime.base_frequency_hz,
        _carry_forward(values, defined), defined & (eff < LOW_SUPPORT_FRACTION * span),
        omega_qss_prime.t0_s,
    )


class GatedRollingAverage:
    """Streaming counterpart of :func:`rocof_qss_gated` (ring buffer of the
    last window + 1 samples).  Sums are recomputed from the buffer every
    window so rounding drift stays bounded."""

    def __init__(self, window_s: float, sample_rate_hz: float):
        self.n = _window_samples(window_s, sample_rate_hz)
        self.dt = 1.0 / sample_rate_hz
        self.buf: deque[tuple[float, float]] = deque(maxlen=self.n + 1)
        self._num = 0.0
        self._den = 0.0
        self._count = 0
        self.last_value: float | None = None

    def push(self, value: float, gate_open: bool) -> tuple[float | None, float]:
        w = 1.0 if gate_open and np.isfinite(value) else 0.0
        item = (value * w if w else 0.0, w)
        if len(self.buf) == self.buf.maxlen:
            old = self.buf[0]
            self._num -= old[0]
            self._den -= old[1]
        self.buf.append(item)
        self._num += item[0]
        self._den += item[1]
        self._count += 1
        if self._count % (self.n + 1) == 0:
            self._num = sum(x for x, _ in self.buf)
            self._den = sum(g for _, g in self.buf)

        num = self._num - 0.5 * self.buf[-1][0]
        den = self._den - 0.5 * self.buf[-1][1]
        if len(self.buf) == self.buf.maxlen:
            num -= 0.5 * self.buf[0][0]
            den -= 0.5 * self.buf[0][1]
        eff = den * self.dt
        if den <= 0:
            return None, 0.0
        self.last_value = num / den
        return self.last_value, eff
