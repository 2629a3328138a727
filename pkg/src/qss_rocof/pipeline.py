"""End-to-end analysis: waveform -> frequencies -> gate -> both RoCoF estimators."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from . import frames, gate as gate_mod, geometric, qss, rocof
from .signals import SampledWaveform


@dataclass(frozen=True)
class AnalysisConfig:
    base_frequency_hz: float = 50.0
    epsilon: float = gate_mod.DEFAULT_EPSILON
    window_s: float = 0.5          # QSS gated rolling window
    conv_window_s: float = 0.5     # conventional rolling window
    butterworth_cutoff_hz: float = 50.0
    washout_tau_s: float = rocof.DEFAULT_WASHOUT_TAU_S
    pll_kp: float = 0.2
    pll_ki: float = 0.03
    lookback_s: float = qss.DEFAULT_LOOKBACK_S
    inst_source: str = "geometric"   # or "pll"

    def validate(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, float) and not (math.isfinite(value) and value > 0):
                raise ValueError(f"{f.name} must be positive, got {value}")
        min_window = 2.0 / self.base_frequency_hz
        if self.window_s < min_window or self.conv_window_s < min_window:
            raise ValueError(f"rolling windows must be >= {min_window} s")
        if self.inst_source not in ("geometric", "pll"):
            raise ValueError("inst_source must be 'geometric' or 'pll'")

    def with_(self, **changes) -> "AnalysisConfig":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return asdict(self)


# Fig. 7 style relay front end: PLL -> first-order low-pass (T = 0.01 s) -> washout
RELAY_FRONT_END = AnalysisConfig(inst_source="pll", butterworth_cutoff_hz=1.0 / (2.0 * math.pi * 0.01))


@dataclass(frozen=True)
class AnalysisResult:
    config: AnalysisConfig
    time: np.ndarray
    space_vector: frames.SpaceVectorTrace
    omega_v: geometric.FrequencyTrace
    omega_inst: geometric.FrequencyTrace        # unfiltered conventional source
    omega_inst_filtered: geometric.FrequencyTrace
    periods: qss.PeriodTrace
    omega_qss: geometric.FrequencyTrace
    gate: gate_mod.GateTrace
    omega_qss_prime: geometric.FrequencyTrace
    rocof_conventional: rocof.RocofTrace
    rocof_qss: rocof.RocofTrace

    def columns(self) -> dict[str, np.ndarray]:
        """Plot-ready aligned series (Hz, Hz/s, pu^2, s)."""
        hz = lambda tr: tr.to("hz").values  # noqa: E731
        return {
            "time_s": self.time,
            "omega_v_hz": hz(self.omega_v),
            "omega_inst_hz": hz(self.omega_inst),
            "omega_inst_filtered_hz": hz(self.omega_inst_filtered),
            "omega_qss_hz": hz(self.omega_qss),
            "period_s": self.periods.period_s,
            "gamma_prime": self.gate.gamma_prime,
            "tout": self.gate.tout.astype(int),
            "rocof_formal_hz_s": self.omega_qss_prime.values,
            "rocof_conventional_hz_s": self.rocof_conventional.values,
            "rocof_qss_hz_s": self.rocof_qss.values,
            "rocof_qss_held_hz_s": self.rocof_qss.held,
            "effective_window_s": self.rocof_qss.effective_window_s,
        }

    def summary(self, band_hz_s: float = 1.0) -> dict[str, float]:
        conv = self.rocof_conventional.values
        gated = self.rocof_qss.values
        f_qss = self.omega_qss.to("hz").values

        def peak(x):
            x = x[np.isfinite(x)]
            return float(np.max(np.abs(x))) if x.size else float("nan")

        def frac_out(x):
            x = x[np.isfinite(x)]
            return float(np.mean(np.abs(x) > band_hz_s)) if x.size else 0.0

        closed = ~self.gate.tout & self.periods.valid
        return {
            "samples": float(self.time.size),
            "omega_qss_min_hz": float(np.nanmin(f_qss)) if np.isfinite(f_qss).any() else float("nan"),
            "omega_qss_max_hz": float(np.nanmax(f_qss)) if np.isfinite(f_qss).any() else float("nan"),
            "gamma_prime_max_abs": peak(self.gate.gamma_prime),
            "gate_closed_s": float(closed.sum() / self.gate.sample_rate_hz),
            "rocof_conventional_max_abs_hz_s": peak(conv),
            "rocof_qss_max_abs_hz_s": peak(gated),
            "rocof_conventional_exceeds_band": float(peak(conv) > band_hz_s),
            "rocof_qss_exceeds_band": float(peak(gated) > band_hz_s),
            "rocof_conventional_frac_outside_band": frac_out(conv),
            "rocof_qss_frac_outside_band": frac_out(gated),
        }


def instantaneous_frequency(sv: frames.SpaceVectorTrace, omega_v: geometric.FrequencyTrace,
                            config: AnalysisConfig) -> geometric.FrequencyTrace:
    if config.inst_source == "pll":
        return geometric.pll(sv, config.pll_kp, config.pll_ki, config.base_frequency_hz)
    return omega_v


def analyze(waveform: SampledWaveform, config: AnalysisConfig | None = None) -> AnalysisResult:
    config = config or AnalysisConfig()
    config.validate()
    f0 = config.base_frequency_hz
    sv = frames.clarke(waveform)
    w_v = geometric.omega_v(sv, f0)
    w_inst = instantaneous_frequency(sv, w_v, config)
    w_filt = geometric.butterworth1(w_inst, config.butterworth_cutoff_hz)
    periods, w_qss = qss.qss_frequency(w_v, config.lookback_s)
    g = gate_mod.compute_gate(sv, periods, config.epsilon)
    w_qss_prime = rocof.rocof_formal(w_qss, g, config.washout_tau_s)
    conv = rocof.rocof_conventional(w_filt, config.conv_window_s, config.washout_tau_s)
    gated = rocof.rocof_qss_gated(w_qss_prime, g, config.window_s)
    return AnalysisResult(config, waveform.time, sv, w_v, w_inst, w_filt, periods, w_qss,
                          g, w_qss_prime, conv, gated)
