"""Period detection by total-curvature closure and the QSS frequency.

The period at sample t is the shortest backward span T with

    integral_{t-T}^{t} omega_v dtau = 2 pi

i.e. the time the voltage trajectory needs to turn once.  The integral is
accumulated with the trapezoidal rule and the crossing is located by linear
interpolation of the accumulated integral between two samples.  Looking
backward keeps the estimator causal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometric import FrequencyTrace

TWO_PI = 2.0 * math.pi
DEFAULT_LOOKBACK_S = 0.1


@dataclass(frozen=True)
class PeriodTrace:
    sample_rate_hz: float
    period_s: np.ndarray   # NaN where invalid
    valid: np.ndarray
    start_index: np.ndarray  # fractional sample index of t - T (NaN where invalid)
    t0_s: float = 0.0

    def __len__(self) -> int:
        return self.period_s.size


def accumulated_turning(omega: FrequencyTrace) -> np.ndarray:
    """Cumulative trapezoidal integral of omega_v (rad), invalid samples as 0."""
    w = np.where(omega.valid, omega.values, 0.0)
    dt = 1.0 / omega.sample_rate_hz
    acc = np.empty_like(w)
    acc[0] = 0.0
    np.cumsum(0.5 * (w[1:] + w[:-1]) * dt, out=acc[1:])
    return acc


def detect_period(omega: FrequencyTrace, lookback_s: float = DEFAULT_LOOKBACK_S) -> PeriodTrace:
    if omega.unit != "rad_per_s":
        omega = omega.to("rad_per_s")
    if lookback_s < 2.0 / omega.base_frequency_hz:
        raise ValueError("lookback must cover at least two nominal periods")
    fs = omega.sample_rate_hz
    n = len(omega)
    acc = accumulated_turning(omega)
    target = acc - TWO_PI

    j = np.searchsorted(acc, target, side="right")
    ok = j >= 1
    jj = np.where(ok, j, 1)
    lo = acc[jj - 1]
    hi = acc[jj]
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = (target - lo) / (hi - lo)
    start = (jj - 1) + frac
    idx = np.arange(n)
    period = (idx - start) / fs

    # any invalid omega sample between the crossing segment and t spoils the loop
    bad = np.concatenate([[0], np.cumsum(~omega.valid)])
    n_bad = bad[idx + 1] - bad[jj - 1]
    ok &= n_bad == 0
    ok &= period <= lookback_s * (1.0 + 1e-12)
    ok &= np.isfinite(period) & (period > 0)

    return PeriodTrace(
        fs,
        np.where(ok, period, np.nan),
        ok,
        np.where(ok, start, np.nan),
        omega.t0_s,
    )


def omega_qss(omega: FrequencyTrace, periods: PeriodTrace) -> FrequencyTrace:
    """Period average of omega_v.  Since the backward integral over T is pinned
    to 2 pi by construction, the average is exactly 2 pi / T."""
    if len(omega) != len(periods):
        raise ValueError("omega and periods are not aligned")
    values = np.where(periods.valid, TWO_PI / np.where(periods.valid, periods.period_s, 1.0), np.nan)
    return FrequencyTrace(omega.sample_rate_hz, values, "rad_per_s",
                          omega.base_frequency_hz, periods.valid.copy(), omega.t0_s)


def qss_frequency(omega: FrequencyTrace, lookback_s: float = DEFAULT_LOOKBACK_S):
    """Convenience: (PeriodTrace, omega_QSS) for an omega_v trace."""
    periods = detect_period(omega, lookback_s)
    return periods, omega_qss(omega, periods)
