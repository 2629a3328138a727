"""Three-phase waveform containers, synthetic test signals and CSV I/O.

Voltages are in pu of the nominal peak phase voltage.  Every generated signal
is a balanced positive-sequence cosine set (phase offsets 0, -2pi/3, +2pi/3)
whose phase angle, envelope and additive content are shaped by the kind.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

KINDS = ("balanced", "chirp", "amplitude_step", "polluted", "transient_event", "outage")
PHASE_OFFSETS = np.array([0.0, -2.0 * np.pi / 3.0, 2.0 * np.pi / 3.0])
CSV_HEADER = ("time_s", "va", "vb", "vc")
MIN_SAMPLES_PER_CYCLE = 20.0


class WaveformParseError(ValueError):
    """Raised for malformed waveform CSV files."""


@dataclass(frozen=True)
class SampledWaveform:
    sample_rate_hz: float
    t0_s: float
    phases: np.ndarray  # shape (3, n)

    def __post_init__(self):
        phases = np.asarray(self.phases, dtype=float)
        if phases.ndim != 2 or phases.shape[0] != 3:
            raise ValueError("phases must have shape (3, n)")
        if phases.shape[1] < 2:
            raise ValueError("waveform needs at least 2 samples")
        if not (self.sample_rate_hz > 0 and math.isfinite(self.sample_rate_hz)):
            raise ValueError("sample_rate_hz must be positive and finite")
        object.__setattr__(self, "phases", phases)

    def __len__(self) -> int:
        return self.phases.shape[1]

    @property
    def time(self) -> np.ndarray:
        return self.t0_s + np.arange(len(self)) / self.sample_rate_hz

    @property
    def va(self) -> np.ndarray:
        return self.phases[0]

    @property
    def vb(self) -> np.ndarray:
        return self.phases[1]

    @property
    def vc(self) -> np.ndarray:
        return self.phases[2]

    def scaled(self, k: float) -> "SampledWaveform":
        return SampledWaveform(self.sample_rate_hz, self.t0_s, k * self.phases)


@dataclass(frozen=True)
class SignalSpec:
    """Recipe for a synthetic three-phase signal.

    Only the fields relevant to ``kind`` are used, except ``harmonics`` and
    ``noise_std`` which are added on top of any kind when set.

    transient_event: from ``event_start_s`` for ``event_len_s`` the voltage
    sags by ``event_sag`` (decaying with time constant ``event_len_s``), phase
    b sags by an extra ``event_unbalance`` and a 2nd/5th harmonic burst is
    superimposed; unbalance and burst decay with ``event_len_s / 5``.  The
    voltage angle also jumps by ``event_phase_jump_rad`` at the event start.

    outage: from ``event_start_s`` the frequency ramps at ``ramp_hz_per_s``.
    The voltage dips by ``outage_burst_dip`` for ``outage_burst_s``, then sits
    at ``outage_dip`` below nominal and recovers with ``outage_recovery_tau_s``.
    """

    kind: str = "balanced"
    base_frequency_hz: float = 50.0
    amplitude_pu: float = 1.0
    duration_s: float = 2.0
    # chirp / outage
    ramp_hz_per_s: float = 0.0
    ramp_start_s: float = 0.0
    # amplitude_step
    step_ratio: float = 1.0
    step_time_s: float = 1.0
    # polluted (also usable with any kind)
    harmonics: tuple[tuple[int, float], ...] = ()
    noise_std: float = 0.0
    seed: int | None = None
    # transient_event / outage
    event_start_s: float = 1.0
    event_len_s: float = 0.02
    event_sag: float = 0.3
    event_unbalance: float = 0.2
    event_harmonics: tuple[tuple[int, float], ...] = ((2, 0.10), (5, 0.05))
    event_phase_jump_rad: float = 0.1
    outage_dip: float = 0.1
    outage_burst_dip: float = 0.3
    outage_burst_s: float = 0.003
    outage_recovery_tau_s: float = 4.0

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown signal kind {self.kind!r}; expected one of {KINDS}")
        for name, value in self._numeric_fields():
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.duration_s <= 0:
            raise ValueError("duration_s must be > 0")
        if self.base_frequency_hz <= 0:
            raise ValueError("base_frequency_hz must be > 0")
        if self.amplitude_pu <= 0:
            raise ValueError("amplitude_pu must be > 0")
        if self.noise_std < 0:
            raise ValueError("noise_std must be >= 0")
        if self.kind == "amplitude_step" and self.step_ratio <= 0:
            raise ValueError("step_ratio must be > 0")
        if self.kind in ("transient_event", "outage") and self.event_len_s <= 0:
            raise ValueError("event_len_s must be > 0")
        for order, _ in tuple(self.harmonics) + tuple(self.event_harmonics):
            if int(order) < 2:
                raise ValueError(f"harmonic order must be >= 2, got {order}")

    def _numeric_fields(self):
        for name in (
            "base_frequency_hz", "amplitude_pu", "duration_s", "ramp_hz_per_s",
            "ramp_start_s", "step_ratio", "step_time_s", "noise_std",
            "event_start_s", "event_len_s", "event_sag", "event_unbalance", "event_phase_jump_rad",
            "outage_dip", "outage_burst_dip", "outage_burst_s", "outage_recovery_tau_s",
        ):
            yield name, float(getattr(self, name))
        for order, mag in tuple(self.harmonics) + tuple(self.event_harmonics):
            yield "harmonics", float(order)
            yield "harmonics", float(mag)


def _ramp_phase(t: np.ndarray, f0: float, rate: float, start: float) -> np.ndarray:
    """Integrated phase of f(t) = f0 + rate * max(t - start, 0), exact in closed form."""
    dt = np.clip(t - start, 0.0, None)
    return 2.0 * np.pi * (f0 * t + 0.5 * rate * dt**2)


def instantaneous_frequency(spec: SignalSpec, t: np.ndarray | float) -> np.ndarray:
    """Analytic fundamental frequency (Hz) of the generated signal."""
    t = np.asarray(t, dtype=float)
    if spec.kind == "chirp":
        return spec.base_frequency_hz + spec.ramp_hz_per_s * np.clip(t - spec.ramp_start_s, 0.0, None)
    if spec.kind == "outage":
        return spec.base_frequency_hz + spec.ramp_hz_per_s * np.clip(t - spec.event_start_s, 0.0, None)
    return np.full_like(t, spec.base_frequency_hz)


def generate(spec: SignalSpec, sample_rate_hz: float) -> SampledWaveform:
    spec.validate()
    if not math.isfinite(sample_rate_hz) or sample_rate_hz < MIN_SAMPLES_PER_CYCLE * spec.base_frequency_hz:
        raise ValueError(
            f"sample rate {sample_rate_hz} Hz is below {MIN_SAMPLES_PER_CYCLE:g} x base frequency"
        )
    n = int(round(spec.duration_s * sample_rate_hz))
    if n < 2:
        raise ValueError("duration too short for the sample rate")
    t = np.arange(n) / sample_rate_hz
    f0 = spec.base_frequency_hz

    if spec.kind == "chirp":
        theta = _ramp_phase(t, f0, spec.ramp_hz_per_s, spec.ramp_start_s)
    elif spec.kind == "outage":
        theta = _ramp_phase(t, f0, spec.ramp_hz_per_s, spec.event_start_s)
    else:
        theta = 2.0 * np.pi * f0 * t
    if spec.kind == "transient_event":
        theta = theta + np.where(t >= spec.event_start_s, spec.event_phase_jump_rad, 0.0)
    angles = theta[None, :] + PHASE_OFFSETS[:, None]

    envelope = np.full(n, spec.amplitude_pu)
    per_phase = np.ones((3, n))
    extra = np.zeros((3, n))

    if spec.kind == "amplitude_step":
        envelope = np.where(t >= spec.step_time_s, envelope * spec.step_ratio, envelope)
    elif spec.kind == "transient_event":
        envelope, per_phase, extra = _transient_event(spec, t, angles)
    elif spec.kind == "outage":
        envelope = spec.amplitude_pu * _outage_envelope(spec, t)

    phases = envelope[None, :] * per_phase * np.cos(angles) + extra
    for order, mag in spec.harmonics:
        phases += spec.amplitude_pu * mag * np.cos(order * angles)
    if spec.noise_std > 0:
        rng = np.random.default_rng(spec.seed)
        phases += rng.normal(0.0, spec.noise_std, size=phases.shape)
    return SampledWaveform(sample_rate_hz, 0.0, phases)


def _transient_event(spec: SignalSpec, t: np.ndarray, angles: np.ndarray):
    n = t.size
    rel = t - spec.event_start_s
    inside = (rel >= 0) & (rel < spec.event_len_s)
    sag_env = np.where(inside, np.exp(-rel / spec.event_len_s), 0.0)
    burst_env = np.where(inside, np.exp(-5.0 * rel / spec.event_len_s), 0.0)

    envelope = spec.amplitude_pu * (1.0 - spec.event_sag * sag_env)
    per_phase = np.ones((3, n))
    per_phase[1] = 1.0 - spec.event_unbalance * burst_env
    extra = np.zeros((3, n))
    for order, mag in spec.event_harmonics:
        extra += spec.amplitude_pu * mag * burst_env[None, :] * np.cos(order * angles)
    return envelope, per_phase, extra


def _outage_envelope(spec: SignalSpec, t: np.ndarray) -> np.ndarray:
    rel = t - spec.event_start_s
    burst_end = spec.outage_burst_s
    env = np.ones_like(t)
    in_burst = (rel >= 0) & (rel < burst_end)
    after = rel >= burst_end
    env[in_burst] = 1.0 - spec.outage_burst_dip
    env[after] = 1.0 - spec.outage_dip * np.exp(-(rel[after] - burst_end) / spec.outage_recovery_tau_s)
    return env


# --- CSV ---------------------------------------------------------------------

def write_csv(waveform: SampledWaveform, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for ti, a, b, c in zip(waveform.time, *waveform.phases):
            writer.writerow([repr(float(ti)), repr(float(a)), repr(float(b)), repr(float(c))])


def read_csv(path: str | Path, max_jitter: float = 1e-6) -> SampledWaveform:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise WaveformParseError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    missing = [c for c in CSV_HEADER if c not in header]
    if missing:
        raise WaveformParseError(f"{path}: header missing column(s) {', '.join(missing)}")
    if len(header) != len(CSV_HEADER):
        raise WaveformParseError(f"{path}: expected header {','.join(CSV_HEADER)}, got {','.join(header)}")
    cols = [header.index(c) for c in CSV_HEADER]

    data = np.empty((len(rows) - 1, 4))
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(CSV_HEADER):
            raise WaveformParseError(f"{path}: row {lineno} has {len(row)} fields, expected {len(CSV_HEADER)}")
        try:
            data[lineno - 2] = [float(row[c]) for c in cols]
        except ValueError as exc:
            raise WaveformParseError(f"{path}: row {lineno}: {exc}") from None
    if data.shape[0] < 2:
        raise WaveformParseError(f"{path}: need at least 2 samples")
    if not np.all(np.isfinite(data)):
        bad = int(np.argwhere(~np.isfinite(data))[0, 0]) + 2
        raise WaveformParseError(f"{path}: row {bad}: non-finite value")

    t = data[:, 0]
    n = t.size
    dt = (t[-1] - t[0]) / (n - 1)
    if not dt > 0:
        raise WaveformParseError(f"{path}: timestamps must increase")
    expected = t[0] + np.arange(n) * dt
    jitter = np.abs(t - expected) / dt
    if np.any(jitter > max_jitter):
        bad = int(np.argmax(jitter > max_jitter)) + 2
        raise WaveformParseError(f"{path}: row {bad}: non-uniform timestamp spacing")
    return SampledWaveform(1.0 / dt, float(t[0]), data[:, 1:].T.copy())
