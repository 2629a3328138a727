"""Command line front end.

    qss-rocof generate --kind chirp --ramp -1 -o chirp.csv
    qss-rocof analyze chirp.csv --window-ms 250 --out-dir results/
    qss-rocof relay outage.csv --conv-config conv.json --qss-config qss.json
    qss-rocof sweep-epsilon outage.csv --event-start 1.0
    qss-rocof epsilon-recommend stationary.csv

Exit codes: 0 success, 1 usage error, 2 data error.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from . import gate as gate_mod
from .pipeline import RELAY_FRONT_END, AnalysisConfig, analyze
from .relay import RelayConfig, compare_schemes, write_trip_csv
from .signals import KINDS, SignalSpec, WaveformParseError, generate, read_csv, write_csv

log = logging.getLogger("qss_rocof")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _harmonic(text: str) -> tuple[int, float]:
    try:
        order, mag = text.split(":")
        return int(order), float(mag)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected ORDER:MAGNITUDE, got {text!r}") from None


def _write_table(path: Path, rows: list[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})


def _write_columns(path: Path, columns: dict[str, np.ndarray]) -> None:
    names = list(columns)
    data = [np.asarray(columns[k]) for k in names]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for row in zip(*(d.tolist() for d in data)):
            writer.writerow(["" if isinstance(v, float) and v != v else repr(v) if isinstance(v, float) else v
                             for v in row])


# --- subcommands ---------------------------------------------------------------

def cmd_generate(args) -> int:
    kind = args.kind.replace("-", "_")
    if args.harmonic and kind not in ("polluted",):
        log.info("harmonics added on top of kind %s", kind)
    spec = SignalSpec(
        kind=kind, base_frequency_hz=args.f0, amplitude_pu=args.amplitude, duration_s=args.dur,
        ramp_hz_per_s=args.ramp, ramp_start_s=args.ramp_start,
        step_ratio=args.step_ratio, step_time_s=args.step_time,
        harmonics=tuple(args.harmonic or ()), noise_std=args.noise, seed=args.seed,
        event_start_s=args.event_start, event_len_s=args.event_len,
        event_phase_jump_rad=args.phase_jump,
        outage_dip=args.outage_dip, outage_recovery_tau_s=args.outage_recovery_tau,
    )
    try:
        waveform = generate(spec, args.fs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    write_csv(waveform, args.output)
    print(f"wrote {len(waveform)} samples to {args.output}")
    return EXIT_OK


def _analysis_config(args) -> AnalysisConfig:
    cfg = AnalysisConfig(
        base_frequency_hz=args.f0, epsilon=args.epsilon,
        window_s=args.window_ms / 1000.0, conv_window_s=args.conv_window_ms / 1000.0,
        butterworth_cutoff_hz=args.cutoff_hz, washout_tau_s=args.washout_tau,
        pll_kp=args.pll_kp, pll_ki=args.pll_ki, lookback_s=args.lookback,
        inst_source=args.inst_source,
    )
    try:
        cfg.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return cfg


def cmd_analyze(args) -> int:
    waveform = read_csv(args.input)
    cfg = _analysis_config(args)
    result = analyze(waveform, cfg)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = args.prefix or Path(args.input).stem
    series_path = out / f"{stem}_series.csv"
    summary_path = out / f"{stem}_summary.csv"
    _write_columns(series_path, result.columns())
    summary = result.summary(args.band)
    _write_table(summary_path, [{"metric": k, "value": v} for k, v in summary.items()])
    print(f"series  -> {series_path}")
    print(f"summary -> {summary_path}")
    for key in ("rocof_conventional_max_abs_hz_s", "rocof_qss_max_abs_hz_s", "gate_closed_s"):
        print(f"  {key}: {summary[key]:.6g}")
    return EXIT_OK


def cmd_relay(args) -> int:
    conv_cfg = RelayConfig.from_file(args.conv_config) if args.conv_config else RelayConfig.conventional()
    qss_cfg = RelayConfig.from_file(args.qss_config) if args.qss_config else RelayConfig.qss()
    waveform = read_csv(args.input)
    front_end = RELAY_FRONT_END.with_(base_frequency_hz=args.f0)
    report = compare_schemes(waveform, conv_cfg, qss_cfg, front_end)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_trip_csv(report.conventional.events, out / "trips_conventional.csv")
    write_trip_csv(report.qss.events, out / "trips_qss.csv")
    _write_table(out / "relay_summary.csv", report.summary_rows())
    for name, outcome in (("conventional", report.conventional), ("qss", report.qss)):
        trips = ", ".join(f"stage {e.stage} @ {e.t_trip_s:.4f}s" for e in outcome.events) or "no trips"
        print(f"{name:>12}: {trips}; shed {outcome.shed_pu:.2f} pu")
    delta = report.detection_delta_s(1)
    if delta is not None:
        print(f"stage-1 detection QSS - conventional: {delta * 1000:.1f} ms")
    return EXIT_OK


def cmd_sweep_epsilon(args) -> int:
    if not (0 < args.eps_min < args.eps_max) or args.points < 2:
        raise UsageError("empty epsilon range")
    waveform = read_csv(args.input)
    result = analyze(waveform, AnalysisConfig(base_frequency_hz=args.f0))
    eps = np.logspace(np.log10(args.eps_min), np.log10(args.eps_max), args.points)
    sweep = gate_mod.sweep_epsilon(result.gate, eps, args.event_start)
    rows = [{"epsilon": e, "delta_t_gamma_s": d} for e, d in sweep]
    if args.output:
        _write_table(Path(args.output), rows)
    for e, d in sweep:
        print(f"{e:10.4g}  {d * 1000:10.2f} ms")
    full = max(d for _, d in sweep)
    plateau = gate_mod.longest_plateau([(e, d) for e, d in sweep if d < full])
    if plateau:
        lo, hi, span = plateau
        print(f"plateau: {span * 1000:.2f} ms for epsilon in [{lo:.3g}, {hi:.3g}] "
              f"({np.log10(hi / lo):.2f} decades)")
    return EXIT_OK


def cmd_epsilon_recommend(args) -> int:
    waveform = read_csv(args.input)
    result = analyze(waveform, AnalysisConfig(base_frequency_hz=args.f0))
    eps, non_stationary = gate_mod.recommend_epsilon(result.gate, args.factor)
    if non_stationary:
        print("warning: record does not look stationary (isolated circulation excursions); "
              "the recommendation is dominated by the transient", file=sys.stderr)
    print(f"recommended epsilon: {eps:.6g}")
    return EXIT_OK


# --- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qss-rocof", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a synthetic three-phase waveform CSV")
    g.add_argument("--kind", default="balanced",
                   choices=sorted(set(KINDS) | {k.replace("_", "-") for k in KINDS}))
    g.add_argument("--f0", type=float, default=50.0, help="base frequency (Hz)")
    g.add_argument("--fs", type=float, default=5000.0, help="sample rate (Hz)")
    g.add_argument("--dur", type=float, default=2.0, help="duration (s)")
    g.add_argument("--amplitude", type=float, default=1.0, help="peak phase voltage (pu)")
    g.add_argument("--ramp", type=float, default=0.0, help="frequency ramp (Hz/s), chirp/outage")
    g.add_argument("--ramp-start", type=float, default=0.0, help="chirp ramp start (s)")
    g.add_argument("--step-ratio", type=float, default=1.2)
    g.add_argument("--step-time", type=float, default=1.0)
    g.add_argument("--harmonic", type=_harmonic, action="append", metavar="ORDER:MAG")
    g.add_argument("--noise", type=float, default=0.0, help="Gaussian noise std-dev (pu)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--event-start", type=float, default=1.0)
    g.add_argument("--event-len", type=float, default=0.02)
    g.add_argument("--phase-jump", type=float, default=0.1, help="transient-event angle jump (rad)")
    g.add_argument("--outage-dip", type=float, default=0.1)
    g.add_argument("--outage-recovery-tau", type=float, default=4.0)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_generate)

    def common(sp):
        sp.add_argument("input", help="waveform CSV (time_s,va,vb,vc)")
        sp.add_argument("--f0", type=float, default=50.0, help="nominal frequency (Hz)")

    a = sub.add_parser("analyze", help="frequency, gate and RoCoF series for a waveform")
    common(a)
    a.add_argument("--epsilon", type=float, default=0.05)
    a.add_argument("--window-ms", type=float, default=500.0, help="QSS gated window")
    a.add_argument("--conv-window-ms", type=float, default=500.0, help="conventional window")
    a.add_argument("--cutoff-hz", type=float, default=50.0, help="Butterworth cutoff")
    a.add_argument("--washout-tau", type=float, default=0.01)
    a.add_argument("--pll-kp", type=float, default=0.2)
    a.add_argument("--pll-ki", type=float, default=0.03)
    a.add_argument("--lookback", type=float, default=0.1)
    a.add_argument("--inst-source", choices=("geometric", "pll"), default="geometric")
    a.add_argument("--band", type=float, default=1.0, help="critical RoCoF band (Hz/s)")
    a.add_argument("--out-dir", default=".")
    a.add_argument("--prefix")
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("relay", help="compare conventional and QSS UFLS relays")
    common(r)
    r.add_argument("--conv-config", help="JSON RelayConfig for the conventional scheme")
    r.add_argument("--qss-config", help="JSON RelayConfig for the QSS scheme")
    r.add_argument("--out-dir", default=".")
    r.set_defaults(func=cmd_relay)

    s = sub.add_parser("sweep-epsilon", help="initial closed-gate span versus epsilon")
    common(s)
    s.add_argument("--event-start", type=float, required=True, help="event time (s)")
    s.add_argument("--eps-min", type=float, default=1e-4)
    s.add_argument("--eps-max", type=float, default=1.0)
    s.add_argument("--points", type=int, default=41)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_sweep_epsilon)

    e = sub.add_parser("epsilon-recommend", help="suggest epsilon from a stationary record")
    common(e)
    e.add_argument("--factor", type=float, default=10.0)
    e.set_defaults(func=cmd_epsilon_recommend)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (WaveformParseError, FileNotFoundError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
