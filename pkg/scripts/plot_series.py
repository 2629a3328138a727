"""Plot a series CSV written by `qss-rocof analyze` (needs matplotlib)."""
import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("series")
    ap.add_argument("--output", default="series.png")
    args = ap.parse_args()

    data = np.genfromtxt(args.series, delimiter=",", names=True)
    t = data["time_s"]
    fig, ax = plt.subplots(3, 1, sharex=True, figsize=(8, 7))
    ax[0].plot(t, data["omega_inst_hz"], lw=0.6, label="instantaneous")
    ax[0].plot(t, data["omega_qss_hz"], lw=1.0, label="QSS")
    ax[0].set_ylabel("f (Hz)")
    ax[1].plot(t, data["gamma_prime"], lw=0.8)
    ax[1].set_ylabel("Gamma' (pu^2)")
    ax[2].plot(t, data["rocof_conventional_hz_s"], lw=0.8, label="conventional")
    ax[2].plot(t, data["rocof_qss_hz_s"], lw=1.0, label="QSS gated")
    ax[2].axhspan(-1, 1, color="0.9", zorder=0)
    ax[2].set_ylabel("RoCoF (Hz/s)")
    ax[2].set_xlabel("t (s)")
    for a in (ax[0], ax[2]):
        a.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)
    print(f"wrote {args.output}")


if __name__ == "__main__":
    main()
