"""Circulation-derivative gate.

The loop integral of the total derivative (|v|^2)' over one detected period
telescopes to the endpoint difference

    gamma'(t) = |v(t)|^2 - |v(t - T(t))|^2

which is zero when the trajectory closes.  The gate (tout) is open while
|gamma'| <= epsilon.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .frames import SpaceVectorTrace
from .qss import PeriodTrace

DEFAULT_EPSILON = 0.05


@dataclass(frozen=True)
class GateTrace:
    sample_rate_hz: float
    gamma_prime: np.ndarray  # NaN where the period is invalid
    tout: np.ndarray
    epsilon: float
    t0_s: float = 0.0
    first_recovery_s: float | None = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")

    def __len__(self) -> int:
        return self.tout.size

    @property
    def time(self) -> np.ndarray:
        return self.t0_s + np.arange(len(self)) / self.sample_rate_hz


def circulation_derivative(trace: SpaceVectorTrace, periods: PeriodTrace) -> np.ndarray:
    if len(trace) != len(periods):
        raise ValueError("trace and periods are not aligned")
    n = len(trace)
    valid = periods.valid
    start = np.where(valid, periods.start_index, 0.0)
    k = np.clip(np.floor(start).astype(int), 0, n - 2)
    f = start - k
    m = trace.mag2
    past = m[k] * (1.0 - f) + m[k + 1] * f
    return np.where(valid, m - past, np.nan)


def tout(gamma_prime, epsilon: float):
    """1 (True) where |gamma'| <= epsilon; invalid (NaN) gamma' maps to False."""
    if not epsilon > 0:
        raise ValueError("epsilon must be > 0")
    g = np.abs(np.asarray(gamma_prime, dtype=float))
    out = g <= epsilon  # NaN compares False
    return bool(out) if out.ndim == 0 else out


def compute_gate(trace: SpaceVectorTrace, periods: PeriodTrace,
                 epsilon: float = DEFAULT_EPSILON) -> GateTrace:
    g = circulation_derivative(trace, periods)
    return GateTrace(trace.sample_rate_hz, g, tout(g, epsilon), epsilon, trace.t0_s)


def regate(gate: GateTrace, epsilon: float) -> GateTrace:
    """Same gamma' with a different threshold."""
    return GateTrace(gate.sample_rate_hz, gate.gamma_prime, tout(gate.gamma_prime, epsilon),
                     epsilon, gate.t0_s)


def first_recovery(gate: GateTrace, event_start_s: float) -> float | None:
    """Length (s) of the first closed-gate run starting at or after the event.

    A run that is still closed at the end of the record counts up to the end.
    None when the gate never closes after ``event_start_s``.
    """
    n = len(gate)
    fs = gate.sample_rate_hz
    i0 = max(0, math.ceil((event_start_s - gate.t0_s) * fs - 1e-9))
    if i0 >= n:
        raise ValueError("event start lies beyond the trace")
    closed = np.flatnonzero(~gate.tout[i0:])
    if closed.size == 0:
        return None
    begin = i0 + closed[0]
    reopen = np.flatnonzero(gate.tout[begin:])
    end = begin + reopen[0] if reopen.size else n
    return (end - begin) / fs


def with_recovery(gate: GateTrace, event_start_s: float) -> GateTrace:
    return GateTrace(gate.sample_rate_hz, gate.gamma_prime, gate.tout, gate.epsilon,
                     gate.t0_s, first_recovery(gate, event_start_s))


# --- threshold selection -------------------------------------------------------

def sweep_epsilon(gate: GateTrace, epsilons, event_start_s: float) -> list[tuple[float, float]]:
    """(epsilon, initial closed span) pairs; a gate that never closes gives 0."""
    out = []
    for eps in epsilons:
        span = first_recovery(regate(gate, float(eps)), event_start_s)
        out.append((float(eps), 0.0 if span is None else span))
    return out


def longest_plateau(sweep: list[tuple[float, float]], min_span_s: float = 0.0):
    """Longest run of consecutive sweep points with the same (non-trivial)
    closed span.  Returns (eps_lo, eps_hi, span) or None."""
    best = None
    i = 0
    while i < len(sweep):
        j = i
        while j + 1 < len(sweep) and sweep[j + 1][1] == sweep[i][1]:
            j += 1
        eps_lo, eps_hi, span = sweep[i][0], sweep[j][0], sweep[i][1]
        if span > min_span_s and (best is None or eps_hi / eps_lo > best[1] / best[0]):
            best = (eps_lo, eps_hi, span)
        i = j + 1
    return best


def recommend_epsilon(gate: GateTrace, factor: float = 10.0,
                      outlier_ratio: float = 20.0) -> tuple[float, bool]:
    """Over-dimensioned threshold from a stationary record: factor x max|gamma'|.

    Also returns whether the record looks non-stationary, i.e. its largest
    |gamma'| stands far above the typical (median) level.
    """
    g = np.abs(gate.gamma_prime[np.isfinite(gate.gamma_prime)])
    if g.size == 0:
        raise ValueError("no valid circulation samples (record shorter than one period?)")
    peak = float(g.max())
    typical = float(np.median(g))
    non_stationary = peak > 1e-9 and peak > outlier_ratio * typical
    return factor * peak, non_stationary
