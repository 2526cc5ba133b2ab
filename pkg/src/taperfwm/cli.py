"""Command-line entry point: simulate, sweep, pair, oracle, convergence.

Exit codes: 0 success, 2 configuration/validation error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import io
from .analytic import erf_xi_profile, fit_erf, sigma_z_analytic
from .config import ConfigError, SourceConfig, derive_run_params, load_config
from .interference import evaluate_pair, optimize_delays
from .jta import JointAmplitude
from .metrics import jta_to_jsa, spectral_cumulative
from .pumps import PropagationError
from .simulate import ValidationFailure, run_source

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

SWEEP_PARAMS = {
    "tau": ("pump", "tau"),
    "avg_power": ("pump", "avg_power"),
    "taper_amplitude": ("geometry", "taper_amplitude"),
    "width_offset": ("geometry", "width_offset"),
    "height_offset": ("geometry", "height_offset"),
}


def _with_param(cfg: SourceConfig, param: str, value: float) -> SourceConfig:
    section, key = SWEEP_PARAMS[param]
    return cfg.replace(**{section: {key: value}})


def _dump_matrices(writer: io.ArtifactWriter, phi: JointAmplitude, stem: str,
                   dump_jta: bool, dump_jsa: bool):
    if dump_jta:
        writer.add(io.write_cjm1(phi, writer.path(f"{stem}_jta.cjm1")))
    if dump_jsa:
        writer.add(io.write_cjm1(jta_to_jsa(phi), writer.path(f"{stem}_jsa.cjm1")))


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    writer = io.ArtifactWriter("simulate", args.output, [cfg])
    out = run_source(cfg, keep_pump_trace=args.dump_pumps)
    writer.add(io.write_metrics_json(out.metrics, writer.path("metrics.json")))
    writer.add(io.write_xi_profile_csv(out.result.xi_profile, cfg.geometry.length,
                                       writer.path("xi_profile.csv")))
    _dump_matrices(writer, out.result.jta, "final", args.dump_jta, args.dump_jsa)
    if args.snapshots:
        snaps = out.result.snapshots[: args.snapshots]
        for k, snap in enumerate(snaps):
            _dump_matrices(writer, snap, f"snapshot_{k:03d}", args.dump_jta, args.dump_jsa)
        zs, w_axis, spec = spectral_cumulative(out.result.snapshots)
        writer.add(io.write_spectral_map_csv(zs, w_axis, spec, cfg.geometry.length,
                                             writer.path("spectral_map.csv")))
    if args.dump_pumps:
        trace = out.pump_trace
        for k in (0, trace.n_z):
            env = trace.envelopes_at(k)
            name = f"pumps_z{k:05d}.csv"
            writer.add(io.write_envelopes_csv(trace.grid.t_axis, env.a_p1, env.a_p2,
                                              writer.path(name)))
    writer.finish()
    return EXIT_OK


def _sweep_point(payload):
    index, cfg, param, value = payload
    try:
        metrics = run_source(_with_param(cfg, param, value)).metrics
        return io.sweep_row(index, param, value, metrics)
    except (ValidationFailure, PropagationError, FloatingPointError) as exc:
        return io.sweep_row(index, param, value, None, error=str(exc))


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if args.param not in SWEEP_PARAMS:
        raise ConfigError(f"unknown sweep parameter {args.param!r}")
    values = np.linspace(args.start, args.stop, args.steps)
    jobs = args.jobs or os.cpu_count() or 1
    payloads = [(k, cfg, args.param, float(v)) for k, v in enumerate(values)]
    writer = io.ArtifactWriter("sweep", args.output, [cfg])
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point, payloads))
    else:
        rows = [_sweep_point(p) for p in payloads]
    writer.add(io.write_sweep_csv(rows, writer.path("sweep.csv")))
    writer.finish()
    if any(r[3] == "error" for r in rows):
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_pair(args) -> int:
    cfg1 = load_config(args.config1)
    cfg2 = load_config(args.config2)
    writer = io.ArtifactWriter("pair", args.output, [cfg1, cfg2])
    raw = evaluate_pair(cfg1, cfg2)
    doc = {
        "raw": {"v_rhom": raw.v_rhom, "v_hhom": raw.v_hhom,
                "shift_s": raw.shift_s, "shift_i": raw.shift_i},
    }
    if args.optimize:
        opt = optimize_delays(cfg1, cfg2, objective=args.objective)
        doc["optimized"] = {
            "objective": args.objective,
            "v_rhom": opt.v_rhom,
            "v_hhom": opt.v_hhom,
            "tau1": opt.optimal_tau1,
            "tau2": opt.optimal_tau2,
            "shift_s": opt.shift_s,
            "shift_i": opt.shift_i,
        }
        with open(writer.path("candidates.csv"), "w") as fh:
            fh.write("tau1,tau2,v\n")
            for t1, t2, v in opt.candidates:
                fh.write(f"{t1:.17g},{t2:.17g},{v:.17g}\n")
        writer.add(writer.path("candidates.csv"))
    writer.add(io.write_json(doc, writer.path("pair.json")))
    writer.finish()
    return EXIT_OK


def cmd_oracle(args) -> int:
    cfg = load_config(args.config)
    writer = io.ArtifactWriter("oracle", args.output, [cfg])
    out = run_source(cfg)
    rp = derive_run_params(cfg)
    loss = rp.alpha_m["s"] + rp.alpha_m["i"]
    fit = fit_erf(out.result.xi_profile, loss_rate=loss)
    L = cfg.geometry.length
    doc = {
        "l_match_fit": fit.l_match_fit,
        "l_match_analytic": rp.l_match,
        "sigma_z_fit": fit.sigma_z_fit,
        "sigma_z_analytic": sigma_z_analytic(cfg),
        "delta_z_fwhm": fit.delta_z_fwhm,
        "delta_z_over_L": fit.delta_z_fwhm / L,
        "plateau": fit.plateau,
        "rms_residual": fit.rms_residual,
        "reliable": fit.reliable,
    }
    writer.add(io.write_json(doc, writer.path("erf_fit.json")))
    model = erf_xi_profile(cfg, out.result.xi_profile.z_nodes, plateau=fit.plateau)
    with open(writer.path("erf_overlay.csv"), "w") as fh:
        fh.write("z_over_L,xi_solver,xi_erf\n")
        for z, a, b in zip(out.result.xi_profile.z_nodes, out.result.xi_profile.xi, model):
            fh.write(f"{z / L:.17g},{a:.17g},{b:.17g}\n")
    writer.add(writer.path("erf_overlay.csv"))
    writer.finish()
    return EXIT_OK


def cmd_convergence(args) -> int:
    cfg = load_config(args.config)
    writer = io.ArtifactWriter("convergence", args.output, [cfg])
    rows = []
    n_t, n_z = cfg.numerics.n_t, cfg.numerics.n_z
    for k in range(args.doublings + 1):
        c = cfg.replace(numerics={"n_t": n_t, "n_z": n_z * 2**k})
        m = run_source(c).metrics
        rows.append((n_t, n_z * 2**k, m.xi, m.purity))
    with open(writer.path("convergence.csv"), "w") as fh:
        fh.write("n_t,n_z,xi,purity\n")
        for r in rows:
            fh.write(f"{r[0]},{r[1]},{r[2]:.17g},{r[3]:.17g}\n")
    writer.add(writer.path("convergence.csv"))
    writer.finish()
    last_rel = abs(rows[-1][2] - rows[-2][2]) / abs(rows[-1][2])
    print(f"last n_z doubling changed xi by {last_rel:.2e}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="taperfwm",
                                description="Delayed-pump intermodal FWM pair-source simulator")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="single run: metrics and profiles")
    sim.add_argument("-c", "--config", required=True)
    sim.add_argument("-o", "--output", required=True)
    sim.add_argument("--dump-jta", action="store_true")
    sim.add_argument("--dump-jsa", action="store_true")
    sim.add_argument("--snapshots", type=int, default=0, metavar="N")
    sim.add_argument("--dump-pumps", action="store_true")
    sim.set_defaults(func=cmd_simulate)

    sw = sub.add_parser("sweep", help="one-parameter sweep, one metrics row per point")
    sw.add_argument("-c", "--config", required=True)
    sw.add_argument("-o", "--output", required=True)
    sw.add_argument("--param", required=True, choices=sorted(SWEEP_PARAMS))
    sw.add_argument("--from", dest="start", type=float, required=True)
    sw.add_argument("--to", dest="stop", type=float, required=True)
    sw.add_argument("--steps", type=int, required=True)
    sw.add_argument("--jobs", type=int, default=0, help="worker processes (default: all cores)")
    sw.set_defaults(func=cmd_sweep)

    pr = sub.add_parser("pair", help="two-source interference study")
    pr.add_argument("-c1", "--config1", required=True)
    pr.add_argument("-c2", "--config2", required=True)
    pr.add_argument("-o", "--output", required=True)
    pr.add_argument("--optimize", action="store_true")
    pr.add_argument("--objective", choices=("rhom", "hhom"), default="rhom")
    pr.set_defaults(func=cmd_pair)

    orc = sub.add_parser("oracle", help="erf fit of the cumulative generation profile")
    orc.add_argument("-c", "--config", required=True)
    orc.add_argument("-o", "--output", required=True)
    orc.set_defaults(func=cmd_oracle)

    cv = sub.add_parser("convergence", help="xi/purity vs n_z doublings")
    cv.add_argument("-c", "--config", required=True)
    cv.add_argument("-o", "--output", required=True)
    cv.add_argument("--doublings", type=int, default=2)
    cv.set_defaults(func=cmd_convergence)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValidationFailure, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PropagationError, FloatingPointError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
