"""Initial closed-gate span after an outage event as a function of epsilon."""
import argparse
import csv

import numpy as np

from qss_rocof import gate as gate_mod
from qss_rocof.pipeline import analyze
from qss_rocof.signals import SignalSpec, generate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fs", type=float, default=5000.0)
    ap.add_argument("--ramp", type=float, default=-1.5)
    ap.add_argument("--event-start", type=float, default=1.0)
    ap.add_argument("--points", type=int, default=41)
    ap.add_argument("--output", default="epsilon_sweep.csv")
    args = ap.parse_args()

    spec = SignalSpec("outage", ramp_hz_per_s=args.ramp, event_start_s=args.event_start, duration_s=3.0)
    res = analyze(generate(spec, args.fs))
    sweep = gate_mod.sweep_epsilon(res.gate, np.logspace(-4, 0, args.points), args.event_start)
    with open(args.output, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["epsilon", "delta_t_gamma_s"])
        w.writerows(sweep)
    full = max(s for _, s in sweep)
    lo, hi, span = gate_mod.longest_plateau([(e, s) for e, s in sweep if s < full])
    print(f"plateau {span * 1000:.1f} ms for epsilon in [{lo:.2g}, {hi:.2g}]; wrote {args.output}")


if __name__ == "__main__":
    main()
