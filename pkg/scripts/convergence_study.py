#!/usr/bin/env python3
"""Grid-refinement study: xi and purity under n_z and n_t refinement."""

import argparse
import csv
from pathlib import Path

from taperfwm import run_source, table1_config


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-o", "--output", default="out/convergence", type=Path)
    ap.add_argument("--n-t", type=int, nargs="+", default=[64, 128, 256])
    ap.add_argument("--n-z", type=int, nargs="+", default=[100, 200, 400, 800])
    ap.add_argument("--taper-um", type=float, default=0.25)
    args = ap.parse_args()
    args.output.mkdir(parents=True, exist_ok=True)

    path = args.output / "convergence.csv"
    prev = None
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n_t", "n_z", "xi", "purity", "rel_xi_change"])
        for nt in args.n_t:
            for nz in args.n_z:
                cfg = table1_config(numerics={"n_t": nt, "n_z": nz},
                                    geometry={"taper_amplitude": args.taper_um * 1e-6})
                m = run_source(cfg).metrics
                rel = "" if prev is None else f"{abs(m.xi - prev) / m.xi:.3e}"
                w.writerow([nt, nz, f"{m.xi:.8e}", f"{m.purity:.8f}", rel])
                print(f"n_t={nt:4d} n_z={nz:5d}: xi={m.xi:.6e} purity={m.purity:.6f}"
                      + (f" (dxi/xi={rel})" if rel else ""))
                prev = m.xi
            prev = None
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
