"""Conventional vs QSS relay on outage traces over a range of frequency ramps."""
import argparse

from qss_rocof.relay import RelayConfig, compare_schemes
from qss_rocof.signals import SignalSpec, generate


def fmt(ev):
    return f"{ev.t_detect_s:.4f}/{ev.t_trip_s:.4f}" if ev else "-"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fs", type=float, default=5000.0)
    ap.add_argument("--ramps", type=float, nargs="+", default=[-0.75, -1.0, -1.5, -2.0, -3.0])
    args = ap.parse_args()

    print(f"{'ramp':>6} | {'conv s1':>15} {'conv s2':>15} | {'qss s1':>15} {'qss s2':>15} | d1 (ms)")
    for ramp in args.ramps:
        wf = generate(SignalSpec("outage", ramp_hz_per_s=ramp, duration_s=3.0), args.fs)
        rep = compare_schemes(wf, RelayConfig.conventional(), RelayConfig.qss())
        d = rep.detection_delta_s(1)
        print(f"{ramp:>6.2f} | {fmt(rep.conventional.event(1)):>15} {fmt(rep.conventional.event(2)):>15} | "
              f"{fmt(rep.qss.event(1)):>15} {fmt(rep.qss.event(2)):>15} | "
              f"{'-' if d is None else f'{d * 1000:.1f}'}")


if __name__ == "__main__":
    main()
