"""Geometric instantaneous frequency of the voltage space vector, plus the
conventional SRF-PLL / low-pass baseline.

    omega_v = |v x v'| / |v|^2      (rotation, rad/s)
    rho_v   = |v . v'| / |v|^2      (radial translation, 1/s)
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .frames import SpaceVectorTrace

MAG2_FLOOR = 1e-6  # pu^2; below this the geometric frequency is undefined

# Unit families: frequencies and their time derivatives.  Factor converts
# a value in the unit into the family's angular base (rad/s or rad/s^2).
_UNITS = {
    "rad_per_s": ("freq", 1.0),
    "hz": ("freq", 2.0 * math.pi),
    "pu": ("freq", None),
    "rad_per_s2": ("rate", 1.0),
    "hz_per_s": ("rate", 2.0 * math.pi),
    "pu_per_s": ("rate", None),
}


def _unit_factor(unit: str, base_frequency_hz: float) -> float:
    try:
        _, factor = _UNITS[unit]
    except KeyError:
        raise ValueError(f"unknown unit {unit!r}") from None
    return 2.0 * math.pi * base_frequency_hz if factor is None else factor


@dataclass(frozen=True)
class FrequencyTrace:
    """Per-sample scalar series with a unit tag and validity mask.

    Invalid samples hold NaN.  ``valid_from`` is the first valid index.
    """

    sample_rate_hz: float
    values: np.ndarray
    unit: str = "rad_per_s"
    base_frequency_hz: float = 50.0
    valid: np.ndarray = field(default=None)  # type: ignore[assignment]
    t0_s: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        valid = np.isfinite(values) if self.valid is None else np.asarray(self.valid, dtype=bool)
        if valid.shape != values.shape:
            raise ValueError("valid mask must match values")
        values = np.where(valid, values, np.nan)
        _unit_factor(self.unit, self.base_frequency_hz)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "valid", valid)

    def __len__(self) -> int:
        return self.values.size

    @property
    def time(self) -> np.ndarray:
        return self.t0_s + np.arange(len(self)) / self.sample_rate_hz

    @property
    def valid_from(self) -> int:
        idx = np.flatnonzero(self.valid)
        return int(idx[0]) if idx.size else len(self)

    def to(self, unit: str) -> "FrequencyTrace":
        if _UNITS.get(unit, ("?",))[0] != _UNITS[self.unit][0]:
            raise ValueError(f"cannot convert {self.unit} to {unit}")
        scale = _unit_factor(self.unit, self.base_frequency_hz) / _unit_factor(unit, self.base_frequency_hz)
        return self.replace(values=self.values * scale, unit=unit)

    def replace(self, **changes) -> "FrequencyTrace":
        kw = dict(
            sample_rate_hz=self.sample_rate_hz, values=self.values, unit=self.unit,
            base_frequency_hz=self.base_frequency_hz, valid=self.valid, t0_s=self.t0_s,
        )
        if "values" in changes and "valid" not in changes:
            kw["valid"] = None
        kw.update(changes)
        return FrequencyTrace(**kw)


# --- derivative ----------------------------------------------------------------

# 4th-order stencils (weights / 12h)
_CENTRAL = np.array([1.0, -8.0, 0.0, 8.0, -1.0])
_FORWARD0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0])
_FORWARD1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0])


def derivative(trace: SpaceVectorTrace) -> np.ndarray:
    """Time derivative of the space vector, shape (n, 3).

    Fourth-order central differences in the interior and fourth-order one-sided
    stencils at the two samples nearest each end; traces of 3 or 4 samples fall
    back to second-order differences.
    """
    v = trace.v
    n = v.shape[0]
    if n < 3:
        raise ValueError("derivative needs at least 3 samples")
    fs = trace.sample_rate_hz
    if n < 5:
        return np.gradient(v, axis=0, edge_order=2) * fs

    d = np.empty_like(v)
    d[2:-2] = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) * (fs / 12.0)
    head, tail = v[:5], v[-5:]
    d[0] = _FORWARD0 @ head * (fs / 12.0)
    d[1] = _FORWARD1 @ head * (fs / 12.0)
    d[-1] = -(_FORWARD0 @ tail[::-1]) * (fs / 12.0)
    d[-2] = -(_FORWARD1 @ tail[::-1]) * (fs / 12.0)
    return d


def _geometric_parts(trace: SpaceVectorTrace, floor: float):
    dv = derivative(trace)
    valid = trace.mag2 >= floor
    safe = np.where(valid, trace.mag2, 1.0)
    return dv, valid, safe


def omega_v(trace: SpaceVectorTrace, base_frequency_hz: float = 50.0,
            floor: float = MAG2_FLOOR) -> FrequencyTrace:
    dv, valid, safe = _geometric_parts(trace, floor)
    w = np.linalg.norm(np.cross(trace.v, dv), axis=1) / safe
    return FrequencyTrace(trace.sample_rate_hz, w, "rad_per_s", base_frequency_hz, valid, trace.t0_s)


def rho_v(trace: SpaceVectorTrace, base_frequency_hz: float = 50.0,
          floor: float = MAG2_FLOOR) -> FrequencyTrace:
    dv, valid, safe = _geometric_parts(trace, floor)
    r = np.abs(np.einsum("ij,ij->i", trace.v, dv)) / safe
    return FrequencyTrace(trace.sample_rate_hz, r, "rad_per_s", base_frequency_hz, valid, trace.t0_s)


# --- filters -------------------------------------------------------------------

def run_filter(b: np.ndarray, a: np.ndarray, x: np.ndarray, valid: np.ndarray) -> np.ndarray:
    """IIR filter started in steady state at the first valid sample.

    Invalid samples are bridged by holding the last valid input; their
    outputs are NaN.
    """
    out = np.full(x.shape, np.nan)
    idx = np.flatnonzero(valid)
    if idx.size == 0:
        return out
    start = idx[0]
    seg = x[start:].copy()
    seg_valid = valid[start:]
    if not seg_valid.all():
        # forward-fill invalid samples
        pos = np.where(seg_valid, np.arange(seg.size), 0)
        np.maximum.accumulate(pos, out=pos)
        seg = seg[pos]
    zi = signal.lfilter_zi(b, a) * seg[0]
    y, _ = signal.lfilter(b, a, seg, zi=zi)
    out[start:] = np.where(seg_valid, y, np.nan)
    return out


def butterworth1(trace: FrequencyTrace, cutoff_hz: float) -> FrequencyTrace:
    """Causal first-order Butterworth low-pass (prewarped bilinear)."""
    nyq = trace.sample_rate_hz / 2.0
    if not 0.0 < cutoff_hz < nyq:
        raise ValueError(f"cutoff must lie in (0, {nyq}) Hz, got {cutoff_hz}")
    b, a = signal.butter(1, cutoff_hz, btype="low", fs=trace.sample_rate_hz)
    y = run_filter(b, a, trace.values, trace.valid)
    return trace.replace(values=y, valid=trace.valid.copy())


def lowpass_tau(trace: FrequencyTrace, tau_s: float) -> FrequencyTrace:
    """First-order low-pass given as a time constant, 1 / (1 + s tau)."""
    if tau_s <= 0:
        raise ValueError("tau_s must be > 0")
    return butterworth1(trace, 1.0 / (2.0 * math.pi * tau_s))


_RATE_UNIT = {"rad_per_s": "rad_per_s2", "hz": "hz_per_s", "pu": "pu_per_s"}


def washout(trace: FrequencyTrace, tau_s: float) -> FrequencyTrace:
    """Band-limited differentiator s / (1 + s tau), bilinear discretisation.

    Starts from rest at the first valid sample, so a constant input gives a
    zero output (to rounding) and a ramp of slope c settles to c.
    """
    if tau_s <= 0:
        raise ValueError("washout time constant must be > 0")
    if trace.unit not in _RATE_UNIT:
        raise ValueError(f"washout expects a frequency trace, got unit {trace.unit}")
    b, a = signal.bilinear([1.0, 0.0], [tau_s, 1.0], fs=trace.sample_rate_hz)
    y = run_filter(b, a, trace.values, trace.valid)
    return trace.replace(values=y, valid=trace.valid.copy(), unit=_RATE_UNIT[trace.unit])


# --- PLL -----------------------------------------------------------------------

class SrfPll:
    """Synchronous-reference-frame PLL working on alpha-beta samples.

    The phase detector is the q-axis projection of the unit alpha-beta vector
    onto the estimated angle, i.e. sin(phase error).  The PI controller acts in
    per unit with time in per unit of the nominal angular frequency, so the
    continuous loop is  e'' + wb*kp*e' + wb^2*ki*e = 0.
    """

    def __init__(self, sample_rate_hz: float, kp: float = 0.2, ki: float = 0.03,
                 base_frequency_hz: float = 50.0, theta0: float = 0.0):
        if kp <= 0 or ki <= 0:
            raise ValueError("PLL gains must be > 0")
        self.dt = 1.0 / sample_rate_hz
        self.kp = kp
        self.ki = ki
        self.wb = 2.0 * math.pi * base_frequency_hz
        self.theta = theta0
        self.integ = 0.0
        self.omega = self.wb

    def step(self, alpha: float, beta: float) -> float:
        mag = math.hypot(alpha, beta)
        err = 0.0
        if mag > 1e-9:
            err = (beta * math.cos(self.theta) - alpha * math.sin(self.theta)) / mag
        w_pu = 1.0 + self.kp * err + self.integ
        self.integ += self.ki * self.wb * err * self.dt
        self.omega = self.wb * w_pu
        self.theta = (self.theta + self.omega * self.dt) % (2.0 * math.pi)
        return self.omega


def pll(trace: SpaceVectorTrace, kp: float = 0.2, ki: float = 0.03,
        base_frequency_hz: float = 50.0) -> FrequencyTrace:
    """Run an :class:`SrfPll` over the trace; output in rad/s.

    The PLL starts at nominal frequency and at the angle of the first sample.
    """
    alpha = trace.v[:, 0]
    beta = trace.v[:, 1]
    loop = SrfPll(trace.sample_rate_hz, kp, ki, base_frequency_hz,
                  theta0=math.atan2(beta[0], alpha[0]))
    out = np.fromiter((loop.step(a, b) for a, b in zip(alpha.tolist(), beta.tolist())),
                      dtype=float, count=len(trace))
    return FrequencyTrace(trace.sample_rate_hz, out, "rad_per_s", base_frequency_hz, t0_s=trace.t0_s)
