"""Driven joint-amplitude evolution: source term, oracle, bookkeeping."""

import numpy as np
import pytest

from taperfwm import run_source, table1_config
from taperfwm.config import derive_run_params
from taperfwm.jta import evolve_jta, perturbative_oracle, source_term
from taperfwm.metrics import jta_to_jsa
from taperfwm.pumps import initial_envelopes, propagate_pumps

FAST = {"n_t": 64, "n_z": 100}


def _cfg(**kw):
    return table1_config(numerics={**FAST, **kw.pop("numerics", {})}, **kw)


def test_source_zero_gamma():
    cfg = _cfg()
    env = initial_envelopes(cfg)
    s = source_term(env, cfg.grid(), 0.0)
    assert np.all(s == 0.0)


def test_source_no_overlap():
    cfg = _cfg(pump={"tau": 4.8e-12})
    env = initial_envelopes(cfg)
    prod = np.abs(env.a_p1 * env.a_p2)
    assert prod.max() < 1e-10 * np.abs(env.a_p1).max() * np.abs(env.a_p2).max()
    s = source_term(env, cfg.grid(), 1.34)
    assert np.abs(s).max() <= 2 * np.pi * 1.34 * prod.max() / cfg.grid().dt * (1 + 1e-12)


def test_source_diagonal_vs_spectral():
    cfg = table1_config(numerics={"n_t": 128, "n_z": 100}, pump={"tau": 1.0e-12})
    env = initial_envelopes(cfg)
    g = cfg.grid()
    d = source_term(env, g, 1.34, theta_si=0.37)
    s = source_term(env, g, 1.34, theta_si=0.37, form="spectral")
    assert np.max(np.abs(d - s)) <= 1e-10 * np.max(np.abs(d))


def test_oracle_equivalence():
    cfg = _cfg(numerics={"n_z": 500, "xpm_spm_enabled": False},
               geometry={"taper_amplitude": 0.1e-6})
    trace = propagate_pumps(cfg, initial_envelopes(cfg))
    stepped = evolve_jta(cfg, trace).jta
    direct = perturbative_oracle(cfg, trace)
    num = np.linalg.norm(stepped.values - direct.values)
    den = np.linalg.norm(direct.values)
    assert num / den <= 1e-6


def test_oracle_requires_nl_off():
    cfg = _cfg()
    trace = propagate_pumps(cfg, initial_envelopes(cfg))
    with pytest.raises(ValueError):
        perturbative_oracle(cfg, trace)


def test_xi_profile_shape_and_positivity(fast_run):
    prof = fast_run.result.xi_profile
    assert prof.xi[0] == 0.0
    assert np.all(prof.xi >= 0.0)
    assert prof.z_nodes[0] == 0.0
    assert prof.z_nodes[-1] == pytest.approx(1.5e-2)


def test_xi_rhs_bookkeeping(fast_run):
    # cumulative loss/source accounting must reproduce the final norm
    res = fast_run.result
    assert res.xi_from_rhs == pytest.approx(res.jta.norm_sq, rel=1e-10)


def test_generation_rises_after_match_point(fast_run):
    prof = fast_run.result.xi_profile
    L = 1.5e-2
    half = prof.xi[-1] / 2.0
    z_half = prof.z_nodes[np.searchsorted(prof.xi, half)]
    # tau = 0.5 tau_max: the rise is centered near mid-waveguide
    assert z_half / L == pytest.approx(0.5, abs=0.06)
    early = prof.xi[prof.z_nodes < 0.25 * L]
    assert early.max() <= 0.05 * prof.xi[-1]


def test_loss_decay_with_source_off():
    # restarting from a generated state with the source off, xi decays at
    # exactly alpha_s + alpha_i
    cfg = _cfg()
    trace = propagate_pumps(cfg, initial_envelopes(cfg))
    res = evolve_jta(cfg, trace)
    res2 = evolve_jta(cfg, trace, initial=res.jta, include_source=False)
    rp = derive_run_params(cfg)
    sigma = rp.alpha_m["s"] + rp.alpha_m["i"]
    prof = res2.xi_profile
    model = prof.xi[0] * np.exp(-sigma * prof.z_nodes)
    assert np.max(np.abs(prof.xi - model) / model) <= 1e-6


def test_quadratic_power_scaling():
    cfg = _cfg(numerics={"xpm_spm_enabled": False},
               dispersion={"alpha_s": 1e-12, "alpha_i": 1e-12})
    xis = []
    for p in (2e-5, 2e-4):
        out = run_source(cfg.replace(pump={"avg_power": p}))
        xis.append(out.metrics.xi)
    assert xis[1] / xis[0] == pytest.approx(100.0, rel=5e-3)


def test_snapshots_cover_run(fast_run):
    snaps = fast_run.result.snapshots
    assert len(snaps) >= 2
    assert snaps[0].z == 0.0
    assert snaps[-1].z == pytest.approx(1.5e-2)
    # final snapshot is the final state
    assert np.allclose(snaps[-1].values, fast_run.result.jta.values)


def test_parseval_on_conversion(fast_run):
    phi = fast_run.result.jta
    jsa = jta_to_jsa(phi)
    assert jsa.integrate_norm() == pytest.approx(phi.integrate_norm(), rel=1e-10)


def test_nz_convergence():
    cfg = _cfg(numerics={"n_z": 200})
    xi1 = run_source(cfg).metrics.xi
    xi2 = run_source(cfg.replace(numerics={"n_z": 400})).metrics.xi
    assert abs(xi2 - xi1) / xi2 < 1e-3


def test_redistribution_invariance():
    kw = dict(numerics={"n_t": 64, "n_z": 200}, geometry={"taper_amplitude": 0.1e-6})
    cfg_a = table1_config(**kw)
    cfg_b = cfg_a.replace(mismatch={"distribution": {"p1": 0.2, "p2": 0.3, "s": -0.2, "i": -0.3}})
    phi_a = run_source(cfg_a).result.jta
    phi_b = run_source(cfg_b).result.jta
    scale = np.abs(phi_a.values).max()
    assert np.max(np.abs(np.abs(phi_a.values) - np.abs(phi_b.values))) <= 1e-8 * scale
