#!/usr/bin/env python3
"""Signal/Idler spectral shift versus pump delay for several taper depths.

Writes one CSV per taper depth with columns
tau_over_taumax, dlam_s_nm, dlam_i_nm, purity, xi.
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from taperfwm import run_source, table1_config
from taperfwm.config import tau_max_of


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-o", "--output", default="out/tuning", type=Path)
    ap.add_argument("--taper-um", type=float, nargs="+", default=[0.08, 0.25])
    ap.add_argument("--steps", type=int, default=11)
    ap.add_argument("--n-t", type=int, default=128)
    ap.add_argument("--n-z", type=int, default=400)
    ap.add_argument("--avg-power", type=float, default=1e-3)
    args = ap.parse_args()
    args.output.mkdir(parents=True, exist_ok=True)

    for dw_um in args.taper_um:
        cfg = table1_config(
            numerics={"n_t": args.n_t, "n_z": args.n_z},
            geometry={"taper_amplitude": dw_um * 1e-6},
            pump={"avg_power": args.avg_power},
        )
        tm = tau_max_of(cfg)
        path = args.output / f"tuning_dw{dw_um:.2f}um.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["tau_over_taumax", "dlam_s_nm", "dlam_i_nm", "purity", "xi"])
            for f in np.linspace(0.0, 1.0, args.steps):
                m = run_source(cfg.replace(pump={"tau": f * tm})).metrics
                w.writerow([f"{f:.4f}", f"{m.dlam_s * 1e9:.4f}", f"{m.dlam_i * 1e9:.4f}",
                            f"{m.purity:.6f}", f"{m.xi:.6e}"])
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
