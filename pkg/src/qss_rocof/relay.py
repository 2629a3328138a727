"""Two-step semi-adaptive RoCoF-based under-frequency load shedding relay.

Each stage arms when the defined RoCoF estimate reaches -d_omega (pu/s),
disarms if it comes back above before the trip delay, and trips once after the
delay has elapsed in armed state.  Undefined RoCoF samples freeze the armed
timer: they neither advance nor reset it.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .pipeline import RELAY_FRONT_END, AnalysisConfig, AnalysisResult, analyze
from .rocof import RocofTrace
from .signals import SampledWaveform

MODES = ("conventional", "qss")
TRIP_CSV_HEADER = ("stage", "t_detect_s", "t_trip_s", "shed_pu")
_TIME_TOL = 1e-9


@dataclass(frozen=True)
class RelayConfig:
    d_omega_1: float = 0.012
    d_omega_2: float = 0.024
    delta_t_delta_1: float = 0.2
    delta_t_delta_2: float = 0.2
    delta_ls_1: float = 0.2
    delta_ls_2: float = 0.2
    window_s: float = 0.5
    mode: str = "conventional"
    epsilon: float = 0.05

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not 0 < self.d_omega_1 < self.d_omega_2:
            raise ValueError("thresholds must satisfy 0 < d_omega_1 < d_omega_2")
        if self.delta_t_delta_1 < 0 or self.delta_t_delta_2 < 0:
            raise ValueError("trip delays must be >= 0")
        for shed in (self.delta_ls_1, self.delta_ls_2):
            if not 0 < shed <= 1:
                raise ValueError("shed fractions must lie in (0, 1]")
        if not self.window_s > 0:
            raise ValueError("window_s must be > 0")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")

    @classmethod
    def conventional(cls, **kw) -> "RelayConfig":
        return cls(**{"window_s": 0.5, "mode": "conventional", **kw})

    @classmethod
    def qss(cls, **kw) -> "RelayConfig":
        return cls(**{"window_s": 0.25, "mode": "qss", "epsilon": 0.05, **kw})

    @classmethod
    def from_dict(cls, data: dict) -> "RelayConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown relay config key(s): {', '.join(sorted(unknown))}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ValueError(f"bad relay config value: {exc}") from None

    @classmethod
    def from_file(cls, path: str | Path) -> "RelayConfig":
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: {exc}") from None
        if not isinstance(data, dict):
            raise ValueError(f"{path}: expected a JSON object")
        return cls.from_dict(data)

    def to_file(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(asdict(self), indent=2) + "\n", encoding="utf-8")

    def stage(self, k: int) -> tuple[float, float, float]:
        if k == 1:
            return self.d_omega_1, self.delta_t_delta_1, self.delta_ls_1
        return self.d_omega_2, self.delta_t_delta_2, self.delta_ls_2


@dataclass(frozen=True)
class TripEvent:
    stage: int
    t_detect_s: float
    t_trip_s: float
    shed_pu: float


@dataclass
class _Stage:
    number: int
    threshold: float
    delay: float
    shed: float
    armed: bool = False
    t_detect: float = math.nan
    elapsed: float = 0.0
    tripped: bool = False


@dataclass
class RelayState:
    """Mutable relay state; one instance per relay, fed in time order."""

    config: RelayConfig
    stages: list[_Stage] = field(default_factory=list)
    t_last: float | None = None
    last_defined: bool = False

    def __post_init__(self):
        if not self.stages:
            self.stages = [_Stage(k, *self.config.stage(k)) for k in (1, 2)]

    def step(self, rocof_pu_s: float, defined: bool, t_s: float) -> list[TripEvent]:
        if self.t_last is not None and not t_s > self.t_last:
            raise ValueError(f"time must increase: {t_s} after {self.t_last}")
        defined = bool(defined) and math.isfinite(rocof_pu_s)
        dt = 0.0 if self.t_last is None else t_s - self.t_last
        counts = defined and self.last_defined
        events = []
        for st in self.stages:
            if st.tripped or not defined:
                continue
            if rocof_pu_s <= -st.threshold:
                if st.armed:
                    if counts:
                        st.elapsed += dt
                else:
                    st.armed, st.t_detect, st.elapsed = True, t_s, 0.0
                if st.elapsed >= st.delay - _TIME_TOL:
                    st.tripped = True
                    events.append(TripEvent(st.number, st.t_detect, t_s, st.shed))
            elif st.armed:
                st.armed, st.t_detect, st.elapsed = False, math.nan, 0.0
        self.t_last = t_s
        self.last_defined = defined
        return events

    @property
    def armed_stages(self) -> list[int]:
        return [st.number for st in self.stages if st.armed and not st.tripped]


def relay_step(state: RelayState, rocof_sample: float, defined_flag: bool,
               t_s: float) -> tuple[RelayState, list[TripEvent]]:
    """Functional form of :meth:`RelayState.step`.  Both stages may trip on
    the same sample, so the events come back as a list."""
    return state, state.step(rocof_sample, defined_flag, t_s)


def simulate_relay(rocof: RocofTrace, config: RelayConfig) -> list[TripEvent]:
    rate = rocof.to("pu_per_s") if rocof.unit != "pu_per_s" else rocof
    state = RelayState(config)
    events: list[TripEvent] = []
    for value, ok, t in zip(rate.values.tolist(), rate.defined.tolist(), rate.time.tolist()):
        events.extend(state.step(value, ok, t))
        if all(st.tripped for st in state.stages):
            break
    return events


def ever_armed(rocof: RocofTrace, config: RelayConfig) -> bool:
    """True if the stage-1 threshold is reached by any defined sample."""
    rate = rocof.to("pu_per_s") if rocof.unit != "pu_per_s" else rocof
    return bool(np.any(rate.defined & (rate.values <= -config.d_omega_1)))


# --- scheme comparison -----------------------------------------------------------

@dataclass(frozen=True)
class SchemeOutcome:
    config: RelayConfig
    rocof: RocofTrace
    events: list[TripEvent]
    armed: bool

    @property
    def shed_pu(self) -> float:
        return float(sum(e.shed_pu for e in self.events))

    def event(self, stage: int) -> TripEvent | None:
        return next((e for e in self.events if e.stage == stage), None)


@dataclass(frozen=True)
class ComparisonReport:
    conventional: SchemeOutcome
    qss: SchemeOutcome
    analysis: AnalysisResult

    def detection_delta_s(self, stage: int = 1) -> float | None:
        """t_detect(QSS) - t_detect(conventional); negative means QSS is earlier."""
        a, b = self.qss.event(stage), self.conventional.event(stage)
        if a is None or b is None:
            return None
        return a.t_detect_s - b.t_detect_s

    def summary_rows(self) -> list[dict]:
        rows = []
        for name, out in (("conventional", self.conventional), ("qss", self.qss)):
            row = {"scheme": name, "window_s": out.config.window_s, "shed_pu": out.shed_pu,
                   "armed": int(out.armed)}
            for k in (1, 2):
                ev = out.event(k)
                row[f"t_detect_{k}_s"] = ev.t_detect_s if ev else ""
                row[f"t_trip_{k}_s"] = ev.t_trip_s if ev else ""
            rows.append(row)
        for k in (1, 2):
            d = self.detection_delta_s(k)
            rows[1][f"delta_detect_{k}_s"] = "" if d is None else d
            rows[0][f"delta_detect_{k}_s"] = ""
        return rows


def compare_schemes(waveform: SampledWaveform, conv_cfg: RelayConfig, qss_cfg: RelayConfig,
                    front_end: AnalysisConfig = RELAY_FRONT_END) -> ComparisonReport:
    """Run the full chain once and feed both relays.

    The conventional relay consumes the rolling mean of the washout derivative
    of the low-passed instantaneous frequency (``front_end.inst_source``); the
    QSS relay consumes the gated rolling average of the QSS frequency
    derivative.
    """
    cfg = front_end.with_(conv_window_s=conv_cfg.window_s, window_s=qss_cfg.window_s,
                          epsilon=qss_cfg.epsilon)
    result = analyze(waveform, cfg)
    conv_rate = result.rocof_conventional
    qss_rate = result.rocof_qss
    conv = SchemeOutcome(conv_cfg, conv_rate, simulate_relay(conv_rate, conv_cfg), ever_armed(conv_rate, conv_cfg))
    q = SchemeOutcome(qss_cfg, qss_rate, simulate_relay(qss_rate, qss_cfg), ever_armed(qss_rate, qss_cfg))
    return ComparisonReport(conv, q, result)


def write_trip_csv(events: list[TripEvent], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRIP_CSV_HEADER)
        for e in events:
            writer.writerow([e.stage, repr(e.t_detect_s), repr(e.t_trip_s), repr(e.shed_pu)])


def read_trip_csv(path: str | Path) -> list[TripEvent]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != TRIP_CSV_HEADER:
            raise ValueError(f"{path}: expected header {','.join(TRIP_CSV_HEADER)}")
        return [TripEvent(int(r["stage"]), float(r["t_detect_s"]), float(r["t_trip_s"]),
                          float(r["shed_pu"])) for r in reader]
