"""Geometry -> phase-mismatch mapping and the nonlinear-parameter quadrature."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import CONSTANTS, DispersionSet, MismatchModel, SourceConfig


def calibrate_mismatch(dlam_dw: float, dlam_dh: float, disp: DispersionSet) -> MismatchModel:
    """Convert phase-matching wavelength sensitivities into mismatch coefficients.

    dlam_dw, dlam_dh: shift of the Signal phase-matching wavelength per unit
    width/height deviation, in nm/um and nm/nm (i.e. both m/m).  The sign
    convention makes a wider waveguide shift the generated Signal toward the
    pump (negative wavelength shift for the default negative dlam_dw).
    """
    inv_v_diff = 1.0 / disp.v_s - 1.0 / disp.v_i
    if inv_v_diff == 0.0:
        raise ValueError("calibration impossible: degenerate Signal/Idler walk-off")
    scale = -inv_v_diff * (2.0 * np.pi * CONSTANTS.c / disp.lam_s**2)
    return MismatchModel(
        c_kappa_w=scale * (dlam_dw * 1e-9 / 1e-6),
        c_kappa_h=scale * (dlam_dh * 1e-9 / 1e-9),
    )


@dataclass(frozen=True)
class KappaProfile:
    """Net mismatch kappa(z) and its split among the four fields."""

    cfg: SourceConfig

    def kappa(self, z):
        g, m = self.cfg.geometry, self.cfg.mismatch
        dw = g.width_at(z) - g.mean_width
        return m.c_kappa_w * dw + m.c_kappa_h * g.height_offset

    def delta_beta(self, field: str, z):
        """Per-field detuning; the weighted split reproduces kappa exactly."""
        w = self.cfg.mismatch.distribution.get(field, 0.0)
        return w * self.kappa(z)


def kappa_profile(cfg: SourceConfig) -> KappaProfile:
    return KappaProfile(cfg)


@dataclass(frozen=True)
class ModeProfileGrid:
    """Transverse mode profile sampled on a rectangular (x, y) grid."""

    x: np.ndarray        # 1D, m
    y: np.ndarray        # 1D, m
    values: np.ndarray   # 2D (len(y), len(x)), arbitrary scale

    def __post_init__(self):
        if self.values.shape != (self.y.size, self.x.size):
            raise ValueError("profile shape does not match the axes")


def _quad2d(field, x, y):
    return np.trapezoid(np.trapezoid(field, x, axis=1), y)


def effective_area_and_gamma(profiles, n2: float, omega: float, core_mask=None):
    """Nonlinear effective area of a four-field overlap and the resulting gamma.

    profiles: sequence of four ModeProfileGrid on one common grid, ordered as
    (i, j, k, l); the k and l profiles enter conjugated.  core_mask restricts
    the overlap integral to the waveguide core (None means everywhere).
    Returns (area in m^2, gamma in 1/(m W)); an orthogonal overlap yields
    (inf, 0.0).
    """
    if len(profiles) != 4:
        raise ValueError("need exactly four mode profiles")
    x, y = profiles[0].x, profiles[0].y
    for p in profiles[1:]:
        if not (np.array_equal(p.x, x) and np.array_equal(p.y, y)):
            raise ValueError("mode profiles must share one (x, y) grid")

    normed = []
    for p in profiles:
        norm = _quad2d(np.abs(p.values) ** 2, x, y)
        if norm <= 0:
            raise ValueError("mode profile with zero power")
        normed.append(p.values / np.sqrt(norm))

    overlap = normed[0] * normed[1] * np.conj(normed[2]) * np.conj(normed[3])
    if core_mask is not None:
        overlap = np.where(core_mask, overlap, 0.0)
    denom = _quad2d(overlap, x, y)

    scale = np.abs(denom)
    if scale < 1e-30:
        return float("inf"), 0.0
    area = 1.0 / scale
    gamma = omega * n2 / (CONSTANTS.c * area)
    return area, gamma
