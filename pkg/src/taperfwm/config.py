"""Configuration, physical parameters, grids and derived run quantities.

All user-facing quantities are SI (meters, seconds, watts) except losses,
which follow the usual dB/cm convention and are converted to 1/m in
:func:`derive_run_params`.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class PhysicalConstants:
    c: float = 299792458.0          # m/s
    hbar: float = 1.054571817e-34   # J s
    ln10: float = math.log(10.0)

    def __post_init__(self):
        if self.c <= 0 or self.hbar <= 0 or self.ln10 <= 0:
            raise ValueError("physical constants must be strictly positive")


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class PumpSpec:
    """Input pump pulse train: a single laser split between the TM0 and TM1
    modes with a tunable relative delay."""

    avg_power: float = 1e-3          # W, total average power
    rep_rate: float = 50e6           # Hz
    t0_fwhm: float = 0.8e-12         # s, intensity FWHM of the pulse
    center_wavelength: float = 1550e-9  # m
    split_fraction: float = 0.5      # fraction of power launched in TM0
    tau: float = 2.4e-12             # s, delay of pump 1 (TM0) w.r.t. pump 2


@dataclass(frozen=True)
class GeometrySpec:
    """Waveguide geometry: linear width taper plus fabrication offsets."""

    length: float = 1.5e-2           # m
    mean_width: float = 2.25e-6      # m
    taper_amplitude: float = 0.0     # m, width goes mean+amp -> mean-amp
    width_offset: float = 0.0        # m, fabrication error on mean width
    height_offset: float = 0.0       # m, fabrication error on height

    def width_at(self, z):
        """Local width w(z) including the fabrication offset."""
        frac = np.asarray(z) / self.length
        return self.mean_width + self.width_offset + self.taper_amplitude * (1.0 - 2.0 * frac)


@dataclass(frozen=True)
class DispersionSet:
    """Mode dispersion and nonlinear parameters (Table-style input set).

    Losses are in dB/cm, velocities in m/s, walk-off and dispersion lengths
    in meters (walk-off lengths signed relative to the pump-1 frame),
    gammas in 1/(m W).
    """

    alpha_p1: float = 0.4
    alpha_p2: float = 0.2
    alpha_s: float = 0.2   # Signal lives in TM1, inherits the TM1 loss
    alpha_i: float = 0.4   # Idler lives in TM0, inherits the TM0 loss
    v_p1: float = 75.20e6
    v_p2: float = 73.41e6
    v_s: float = 75.29e6
    v_i: float = 73.50e6
    l_w_p: float = 0.25e-2      # pump walk-off length, > 0
    l_w_s: float = -3.27e-2     # Signal walks off toward earlier times
    l_w_i: float = 0.26e-2      # Idler walks off toward later times
    # Dispersion lengths carry the sign of beta_2 of the field.  The Signal
    # and Idler signs must differ: with equal signs the linearized phase
    # mismatch has a second zero inside the simulation band, and the
    # resulting spurious sideband destroys the reference-state purity.
    # Within that constraint the signs below are the ones that reproduce
    # the measured reference purity (the pump chirp produced by the
    # SPM/dispersion interplay is sensitive to the pump beta_2 signs).
    l_d_p1: float = 4.60e-2
    l_d_p2: float = -4.43e-2
    l_d_s: float = 4.09e-2
    l_d_i: float = -5.18e-2
    gamma_1111: float = 2.73
    gamma_1122: float = 1.77
    gamma_2211: float = 1.77
    gamma_2222: float = 2.60
    gamma_11ss: float = 1.52
    gamma_22ss: float = 2.25
    gamma_11ii: float = 3.12
    gamma_22ii: float = 2.01
    gamma_p1p2si: float = 1.34
    lam_s: float = 1581.4e-9
    lam_i: float = 1519.9e-9


@dataclass(frozen=True)
class MismatchModel:
    """Linear model for the net phase mismatch induced by geometry deviations.

    kappa(z) = c_kappa_w * (w(z) - nominal width) + c_kappa_h * height_offset,
    distributed among the four per-field detunings according to `distribution`
    (weights must satisfy p1 + p2 - s - i = 1 so the net mismatch is kappa).
    """

    c_kappa_w: float = 0.0   # rad/m per m of width deviation
    c_kappa_h: float = 0.0   # rad/m per m of height deviation
    distribution: dict = field(
        default_factory=lambda: {"p1": 0.5, "p2": 0.5, "s": 0.0, "i": 0.0}
    )


@dataclass(frozen=True)
class NumericsSpec:
    n_t: int = 512
    t_window: tuple = (-4.0, 12.0)   # dimensionless time span
    n_z: int = 2000
    snapshot_count: int = 16
    xpm_spm_enabled: bool = True
    dispersion_enabled: bool = True


@dataclass(frozen=True)
class Grid:
    """Dimensionless time axis and its dual frequency axis.

    The frequency axis is the sorted (fftshifted) dual grid; it satisfies
    dw * dt * n == 2 pi.
    """

    t_axis: np.ndarray
    w_axis: np.ndarray
    dt: float
    dw: float

    @property
    def n(self):
        return self.t_axis.size

    @classmethod
    def from_numerics(cls, num: NumericsSpec) -> "Grid":
        t_min, t_max = num.t_window
        dt = (t_max - t_min) / num.n_t
        t_axis = t_min + dt * np.arange(num.n_t)
        w_axis = np.fft.fftshift(2.0 * np.pi * np.fft.fftfreq(num.n_t, d=dt))
        return cls(t_axis=t_axis, w_axis=w_axis, dt=dt, dw=w_axis[1] - w_axis[0])


@dataclass(frozen=True)
class SourceConfig:
    pump: PumpSpec = field(default_factory=PumpSpec)
    geometry: GeometrySpec = field(default_factory=GeometrySpec)
    dispersion: DispersionSet = field(default_factory=DispersionSet)
    mismatch: MismatchModel = field(default_factory=MismatchModel)
    numerics: NumericsSpec = field(default_factory=NumericsSpec)

    def replace(self, **section_updates) -> "SourceConfig":
        """Return a copy with whole sections or nested fields replaced.

        Usage: cfg.replace(pump={"tau": 1e-12}, numerics={"n_t": 256}).
        """
        parts = {}
        for name in ("pump", "geometry", "dispersion", "mismatch", "numerics"):
            cur = getattr(self, name)
            upd = section_updates.pop(name, None)
            if upd is None:
                parts[name] = cur
            elif isinstance(upd, dict):
                parts[name] = dataclasses.replace(cur, **upd)
            else:
                parts[name] = upd
        if section_updates:
            raise TypeError(f"unknown sections: {sorted(section_updates)}")
        return SourceConfig(**parts)

    def grid(self) -> Grid:
        return Grid.from_numerics(self.numerics)

    def cache_key(self) -> tuple:
        """Hashable identity of the full configuration."""

        def freeze(obj):
            if dataclasses.is_dataclass(obj):
                return tuple(freeze(getattr(obj, f.name)) for f in dataclasses.fields(obj))
            if isinstance(obj, dict):
                return tuple(sorted(obj.items()))
            if isinstance(obj, (list, tuple)):
                return tuple(freeze(x) for x in obj)
            return obj

        return freeze(self)


@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.errors


@dataclass(frozen=True)
class RunParams:
    """Quantities derived from a validated SourceConfig."""

    p_peak_1: float          # W, peak power of pump 1 (TM0)
    p_peak_2: float          # W, peak power of pump 2 (TM1)
    t_eff: float             # s, effective duration for energy accounting
    tau_max: float           # s, delay for a full pulse walk-through
    l_match: float           # m, pump collision point for cfg.pump.tau
    alpha_m: dict            # field -> power loss in 1/m
    inv_l_w_s: float         # 1/m, signed Signal drift rate (dT/dz)
    inv_l_w_i: float         # 1/m, signed Idler drift rate


def dbcm_to_per_m(alpha_db_cm: float) -> float:
    """Power loss dB/cm -> 1/m."""
    return alpha_db_cm * (CONSTANTS.ln10 / 10.0) * 100.0


def per_m_to_dbcm(alpha_per_m: float) -> float:
    return alpha_per_m / ((CONSTANTS.ln10 / 10.0) * 100.0)


# effective duration of a gaussian pulse with unit intensity FWHM
_T_EFF_FACTOR = math.sqrt(math.pi / (4.0 * math.log(2.0)))


def tau_max_of(cfg: SourceConfig) -> float:
    d = cfg.dispersion
    return cfg.pump.t0_fwhm * cfg.geometry.length / d.l_w_p


def derive_run_params(cfg: SourceConfig) -> RunParams:
    p, g, d = cfg.pump, cfg.geometry, cfg.dispersion
    t_eff = p.t0_fwhm * _T_EFF_FACTOR
    energy_per_pulse = p.avg_power / p.rep_rate
    p_peak_1 = energy_per_pulse * p.split_fraction / t_eff
    p_peak_2 = energy_per_pulse * (1.0 - p.split_fraction) / t_eff
    tmax = tau_max_of(cfg)
    l_match = (p.tau / tmax) * g.length if tmax > 0 else 0.0
    alpha_m = {
        "p1": dbcm_to_per_m(d.alpha_p1),
        "p2": dbcm_to_per_m(d.alpha_p2),
        "s": dbcm_to_per_m(d.alpha_s),
        "i": dbcm_to_per_m(d.alpha_i),
    }
    # magnitudes from the tabulated walk-off lengths, signs from the velocities
    sign_s = math.copysign(1.0, 1.0 / d.v_s - 1.0 / d.v_p1)
    sign_i = math.copysign(1.0, 1.0 / d.v_i - 1.0 / d.v_p1)
    return RunParams(
        p_peak_1=p_peak_1,
        p_peak_2=p_peak_2,
        t_eff=t_eff,
        tau_max=tmax,
        l_match=l_match,
        alpha_m=alpha_m,
        inv_l_w_s=sign_s / abs(d.l_w_s),
        inv_l_w_i=sign_i / abs(d.l_w_i),
    )


_WALKOFF_CHECK_TOL = 0.10


def validate_config(cfg: SourceConfig) -> ValidationReport:
    rep = ValidationReport()
    p, g, d, num = cfg.pump, cfg.geometry, cfg.dispersion, cfg.numerics

    if p.avg_power < 0:
        rep.errors.append("pump.avg_power must be >= 0")
    if p.rep_rate <= 0:
        rep.errors.append("pump.rep_rate must be > 0")
    if p.t0_fwhm <= 0:
        rep.errors.append("pump.t0_fwhm must be > 0")
    if not 0.0 <= p.split_fraction <= 1.0:
        rep.errors.append("pump.split_fraction must lie in [0, 1]")
    if g.length <= 0:
        rep.errors.append("geometry.length must be > 0")
    if g.taper_amplitude < 0:
        rep.errors.append("geometry.taper_amplitude must be >= 0")

    if g.length > 0:
        widths = g.width_at(np.linspace(0.0, g.length, 1001))
        if np.any(widths <= 0):
            rep.errors.append("local width w(z) must stay positive along the taper")

    for name in ("v_p1", "v_p2", "v_s", "v_i"):
        if getattr(d, name) <= 0:
            rep.errors.append(f"dispersion.{name} must be > 0")
    for name in (
        "gamma_1111", "gamma_1122", "gamma_2211", "gamma_2222",
        "gamma_11ss", "gamma_22ss", "gamma_11ii", "gamma_22ii", "gamma_p1p2si",
    ):
        if getattr(d, name) <= 0:
            rep.errors.append(f"dispersion.{name} must be > 0")
    if not d.lam_i < p.center_wavelength < d.lam_s:
        rep.errors.append("expected lam_i < pump wavelength < lam_s")
    if d.l_w_p <= 0:
        rep.errors.append("dispersion.l_w_p must be > 0")

    if num.n_t < 64:
        rep.errors.append("numerics.n_t must be >= 64")
    if num.n_t & (num.n_t - 1):
        rep.errors.append("numerics.n_t must be a power of two")
    if num.n_z < 100:
        rep.errors.append("numerics.n_z must be >= 100")
    t_min, t_max = num.t_window
    if t_max <= t_min:
        rep.errors.append("numerics.t_window must be an increasing interval")
    elif g.length > 0 and d.l_w_i != 0:
        needed = g.length / abs(d.l_w_i) + 6.0
        if (t_max - t_min) < needed:
            rep.errors.append(
                f"t_window span {t_max - t_min:.2f} too small: Idler drift plus "
                f"margins needs at least {needed:.2f}"
            )

    if not rep.errors:
        tmax = tau_max_of(cfg)
        if not 0.0 <= p.tau <= tmax * (1.0 + 1e-12):
            rep.errors.append(
                f"pump.tau = {p.tau:.3e} s outside [0, tau_max = {tmax:.3e} s]"
            )

    # internal consistency of the tabulated walk-off lengths vs the velocities
    for name, l_w, v in (("l_w_p", d.l_w_p, d.v_p2), ("l_w_s", d.l_w_s, d.v_s), ("l_w_i", d.l_w_i, d.v_i)):
        if v <= 0 or d.v_p1 <= 0 or v == d.v_p1:
            continue
        from_v = p.t0_fwhm / abs(1.0 / v - 1.0 / d.v_p1)
        if abs(from_v - abs(l_w)) > _WALKOFF_CHECK_TOL * from_v:
            rep.warnings.append(
                f"dispersion.{name}: |value| {abs(l_w):.3e} m differs from the "
                f"velocity-implied {from_v:.3e} m; tabulated value is used"
            )

    dist = cfg.mismatch.distribution
    extra = set(dist) - {"p1", "p2", "s", "i"}
    if extra:
        rep.errors.append(f"mismatch.distribution has unknown fields {sorted(extra)}")
    else:
        net = dist.get("p1", 0.0) + dist.get("p2", 0.0) - dist.get("s", 0.0) - dist.get("i", 0.0)
        if abs(net - 1.0) > 1e-12:
            rep.errors.append("mismatch.distribution weights must satisfy p1 + p2 - s - i = 1")

    return rep


def table1_config(**section_updates) -> SourceConfig:
    """Reference configuration: tabulated dispersion set, 1.5 cm waveguide,
    0.8 ps pulses at 1550 nm and 50 MHz, 1 mW split 50/50, tau = tau_max/2,
    mismatch calibrated from the published wavelength sensitivities."""
    from .mismatch import calibrate_mismatch

    cfg = SourceConfig()
    cfg = cfg.replace(mismatch=calibrate_mismatch(-15.0, 1.0, cfg.dispersion))
    cfg = cfg.replace(pump={"tau": 0.5 * tau_max_of(cfg)})
    if section_updates:
        cfg = cfg.replace(**section_updates)
    return cfg


_SECTION_TYPES = {
    "pump": PumpSpec,
    "geometry": GeometrySpec,
    "dispersion": DispersionSet,
    "mismatch": MismatchModel,
    "numerics": NumericsSpec,
}


class ConfigError(ValueError):
    pass


def config_from_dict(doc: dict) -> SourceConfig:
    """Build a SourceConfig from a JSON-style dict; unknown keys are fatal."""
    doc = dict(doc)
    defaults = doc.pop("defaults", None)
    if defaults is None:
        base = SourceConfig()
    elif defaults == "table1":
        base = table1_config()
    else:
        raise ConfigError(f"unknown defaults preset {defaults!r}")

    extra = set(doc) - set(_SECTION_TYPES)
    if extra:
        raise ConfigError(f"unknown config sections: {sorted(extra)}")

    sections = {}
    for name, typ in _SECTION_TYPES.items():
        sub = doc.get(name)
        if sub is None:
            continue
        if not isinstance(sub, dict):
            raise ConfigError(f"section {name!r} must be an object")
        known = {f.name for f in dataclasses.fields(typ)}
        bad = set(sub) - known
        if bad:
            raise ConfigError(f"unknown keys in section {name!r}: {sorted(bad)}")
        sub = dict(sub)
        if name == "numerics" and "t_window" in sub:
            sub["t_window"] = tuple(sub["t_window"])
        sections[name] = sub
    return base.replace(**sections)


def config_to_dict(cfg: SourceConfig) -> dict:
    out = {}
    for name, typ in _SECTION_TYPES.items():
        sec = getattr(cfg, name)
        d = dataclasses.asdict(sec)
        if name == "numerics":
            d["t_window"] = list(d["t_window"])
        out[name] = d
    return out


def load_config(path) -> SourceConfig:
    """Parse, expand defaults and validate a JSON configuration file."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    cfg = config_from_dict(doc)
    rep = validate_config(cfg)
    if not rep.ok:
        raise ConfigError(f"{path}: " + "; ".join(rep.errors))
    return cfg
