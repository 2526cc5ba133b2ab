"""Configuration, derived parameters, grids and the mismatch model."""

import json
import math

import numpy as np
import pytest

from taperfwm import (
    Grid,
    SourceConfig,
    derive_run_params,
    load_config,
    table1_config,
    validate_config,
)
from taperfwm.config import ConfigError, dbcm_to_per_m, per_m_to_dbcm, tau_max_of
from taperfwm.mismatch import calibrate_mismatch, kappa_profile

C = 299792458.0


def test_defaults_validate_cleanly():
    rep = validate_config(table1_config())
    assert rep.ok, rep.errors


def test_signal_walkoff_inconsistency_warned():
    # the tabulated |L_w,s| does not match the tabulated velocities; the
    # tabulated value wins but the mismatch must be surfaced
    rep = validate_config(table1_config())
    assert any("l_w_s" in w for w in rep.warnings)


def test_tau_max_value():
    cfg = table1_config()
    # T0 * L / L_w,p = 0.8 ps * 1.5 cm / 0.25 cm
    assert tau_max_of(cfg) == pytest.approx(4.8e-12, rel=1e-12)


def test_peak_power_energy_accounting():
    rp = derive_run_params(table1_config())
    t_eff = 0.8e-12 * math.sqrt(math.pi / (4.0 * math.log(2.0)))
    expect = (1e-3 / 50e6) * 0.5 / t_eff
    assert rp.p_peak_1 == pytest.approx(expect, rel=1e-12)
    assert rp.p_peak_1 == pytest.approx(11.74, abs=0.01)
    assert rp.p_peak_2 == rp.p_peak_1


def test_l_match_proportional_to_tau():
    cfg = table1_config()
    tmax = tau_max_of(cfg)
    for frac in (0.0, 0.25, 0.5, 1.0):
        rp = derive_run_params(cfg.replace(pump={"tau": frac * tmax}))
        assert rp.l_match == pytest.approx(frac * cfg.geometry.length, abs=1e-15)


def test_loss_conversion_round_trip():
    for a in (0.2, 0.4, 1.7):
        assert per_m_to_dbcm(dbcm_to_per_m(a)) == pytest.approx(a, rel=1e-14)
    # 0.4 dB/cm over 1.5 cm is a 0.6 dB power loss
    assert math.exp(-dbcm_to_per_m(0.4) * 1.5e-2) == pytest.approx(10 ** (-0.06), rel=1e-12)


def test_grid_duality():
    g = Grid.from_numerics(table1_config().numerics)
    assert g.dw * g.dt * g.n == pytest.approx(2.0 * math.pi, rel=1e-12)
    assert np.all(np.diff(g.t_axis) > 0)
    assert np.all(np.diff(g.w_axis) > 0)


def test_width_taper_endpoints():
    cfg = table1_config(geometry={"taper_amplitude": 0.25e-6})
    g = cfg.geometry
    assert g.width_at(0.0) == pytest.approx(2.50e-6)
    assert g.width_at(g.length) == pytest.approx(2.00e-6)
    assert g.width_at(0.5 * g.length) == pytest.approx(2.25e-6)


def test_nonpositive_width_fatal():
    cfg = table1_config(geometry={"taper_amplitude": 2e-6, "width_offset": -1e-6})
    rep = validate_config(cfg)
    assert not rep.ok
    assert any("width" in e for e in rep.errors)


def test_tau_out_of_range_fatal():
    cfg = table1_config(pump={"tau": 6e-12})
    rep = validate_config(cfg)
    assert not rep.ok
    assert any("tau" in e for e in rep.errors)


def test_n_t_power_of_two_enforced():
    cfg = table1_config(numerics={"n_t": 96})
    assert not validate_config(cfg).ok


def test_window_must_contain_idler_drift():
    cfg = table1_config(numerics={"t_window": (-2.0, 2.0)})
    rep = validate_config(cfg)
    assert not rep.ok
    assert any("t_window" in e for e in rep.errors)


def test_calibration_zero_and_linear():
    disp = table1_config().dispersion
    assert calibrate_mismatch(0.0, 1.0, disp).c_kappa_w == 0.0
    m1 = calibrate_mismatch(-15.0, 1.0, disp)
    m2 = calibrate_mismatch(-30.0, 2.0, disp)
    assert m2.c_kappa_w == pytest.approx(2.0 * m1.c_kappa_w, rel=1e-12)
    assert m2.c_kappa_h == pytest.approx(2.0 * m1.c_kappa_h, rel=1e-12)


def test_calibration_magnitude():
    # |c_kappa_w| ~ (1/v_s - 1/v_i) * (2 pi c / lam_s^2) * 15 nm/um, a few
    # times 1e3 rad/m per um of width deviation
    disp = table1_config().dispersion
    m = calibrate_mismatch(-15.0, 1.0, disp)
    per_um = abs(m.c_kappa_w) * 1e-6
    drate = abs(1.0 / disp.v_s - 1.0 / disp.v_i)
    expect = drate * (2.0 * math.pi * C / disp.lam_s**2) * 15e-9 / 1e-6 * 1e-6
    assert per_um == pytest.approx(expect, rel=1e-9)
    assert 1e3 < per_um < 1e4


def test_kappa_profile_reference_zero():
    kp = kappa_profile(table1_config())
    z = np.linspace(0, 1.5e-2, 7)
    assert np.allclose(kp.kappa(z), 0.0)


def test_kappa_profile_linear_taper():
    cfg = table1_config(geometry={"taper_amplitude": 0.25e-6, "height_offset": 4.3e-9})
    kp = kappa_profile(cfg)
    L = cfg.geometry.length
    mid = kp.kappa(0.5 * L)
    assert mid == pytest.approx(cfg.mismatch.c_kappa_h * 4.3e-9, rel=1e-12)
    # linearity
    z = np.linspace(0, L, 5)
    k = kp.kappa(z)
    assert np.allclose(np.diff(k, 2), 0.0, atol=1e-9 * max(1.0, abs(k).max()))


def test_delta_beta_distribution_sums_to_kappa():
    cfg = table1_config(
        geometry={"taper_amplitude": 0.1e-6},
        mismatch={"distribution": {"p1": 1.5, "p2": 0.0, "s": 0.25, "i": 0.25}},
    )
    kp = kappa_profile(cfg)
    z = np.linspace(0, cfg.geometry.length, 9)
    net = kp.delta_beta("p1", z) + kp.delta_beta("p2", z) - kp.delta_beta("s", z) - kp.delta_beta("i", z)
    assert np.allclose(net, kp.kappa(z), rtol=1e-12)


def test_load_config_defaults_expansion(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"defaults": "table1"}))
    cfg = load_config(p)
    assert cfg == table1_config()


def test_load_config_override(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"defaults": "table1", "geometry": {"taper_amplitude": 0.25e-6}}))
    cfg = load_config(p)
    assert cfg.geometry.taper_amplitude == 0.25e-6
    assert cfg.pump.tau == table1_config().pump.tau


def test_load_config_unknown_key_fatal(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"defaults": "table1", "geometry": {"tapper_amplitude": 1e-9}}))
    with pytest.raises(ConfigError, match="tapper_amplitude"):
        load_config(p)


def test_load_config_bad_json(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_config(p)
