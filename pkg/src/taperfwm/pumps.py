"""Coupled pump propagation with a symmetrized split-step Fourier scheme.

Both pump envelopes are tracked in the frame moving with pump 1, on the
dimensionless time axis of the shared grid.  Envelope units are sqrt(W).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import Grid, SourceConfig, derive_run_params
from .mismatch import kappa_profile
from .spectral import omega_axis

_EDGE_AMPLITUDE = 1e-6


class PropagationError(RuntimeError):
    """Numerical failure (NaN/overflow) during stepping."""


@dataclass
class PumpEnvelopes:
    a_p1: np.ndarray
    a_p2: np.ndarray
    z: float = 0.0
    accumulated_taper_phase_p1: float = 0.0
    accumulated_taper_phase_p2: float = 0.0


@dataclass
class PumpTrace:
    """Envelopes at every z node plus the step midpoints needed downstream."""

    grid: Grid
    z_nodes: np.ndarray          # (n_z + 1,)
    a_p1: np.ndarray             # (n_z + 1, n_t)
    a_p2: np.ndarray
    z_mid: np.ndarray            # (n_z,)
    a_p1_mid: np.ndarray         # (n_z, n_t)
    a_p2_mid: np.ndarray

    @property
    def n_z(self):
        return self.z_nodes.size - 1

    def envelopes_at(self, k: int) -> PumpEnvelopes:
        return PumpEnvelopes(self.a_p1[k].copy(), self.a_p2[k].copy(), z=float(self.z_nodes[k]))


def gaussian_envelope(t_axis, center, peak_power):
    """Gaussian with unit intensity FWHM on the dimensionless axis."""
    return np.sqrt(peak_power) * np.exp(-2.0 * np.log(2.0) * (t_axis - center) ** 2)


def initial_envelopes(cfg: SourceConfig, grid: Grid | None = None) -> PumpEnvelopes:
    """Launch-point envelopes: pump 1 (TM0) delayed by tau, pump 2 (TM1) at T=0."""
    grid = grid or cfg.grid()
    rp = derive_run_params(cfg)
    tau_norm = cfg.pump.tau / cfg.pump.t0_fwhm
    for center in (tau_norm, 0.0):
        edge = max(
            np.exp(-2.0 * np.log(2.0) * (grid.t_axis[0] - center) ** 2),
            np.exp(-2.0 * np.log(2.0) * (grid.t_axis[-1] - center) ** 2),
        )
        if edge > _EDGE_AMPLITUDE:
            raise ValueError(
                f"time window too small: pulse at T={center:.2f} has edge "
                f"amplitude {edge:.2e} (limit {_EDGE_AMPLITUDE})"
            )
    a1 = gaussian_envelope(grid.t_axis, tau_norm, rp.p_peak_1).astype(complex)
    a2 = gaussian_envelope(grid.t_axis, 0.0, rp.p_peak_2).astype(complex)
    return PumpEnvelopes(a_p1=a1, a_p2=a2, z=0.0)


def propagate_pumps(cfg: SourceConfig, env0: PumpEnvelopes | None = None) -> PumpTrace:
    """Integrate the two coupled pump equations over [0, L].

    Internally steps at h/2 so that both the z nodes and the step midpoints
    hold physical envelopes; the trace exposes both.
    """
    grid = cfg.grid()
    if env0 is None:
        env0 = initial_envelopes(cfg, grid)
    d, num = cfg.dispersion, cfg.numerics
    rp = derive_run_params(cfg)
    kp = kappa_profile(cfg)

    n_z = num.n_z
    L = cfg.geometry.length
    h = L / n_z
    hs = h / 2.0  # internal sub-step
    n_sub = 2 * n_z

    w = omega_axis(num.n_t, grid.dt)
    disp = 1.0 if num.dispersion_enabled else 0.0
    nl_on = 1.0 if num.xpm_spm_enabled else 0.0

    # z-independent part of the linear operators (frequency domain)
    lin1 = -0.5 * rp.alpha_m["p1"] + disp * 0.5j * w**2 / d.l_d_p1
    lin2 = -0.5 * rp.alpha_m["p2"] + disp * 0.5j * w**2 / d.l_d_p2 + 1j * w / d.l_w_p
    half1 = np.exp(lin1 * hs / 2.0)
    half2 = np.exp(lin2 * hs / 2.0)

    a1 = env0.a_p1.astype(complex).copy()
    a2 = env0.a_p2.astype(complex).copy()

    nodes_a1 = np.empty((n_z + 1, num.n_t), complex)
    nodes_a2 = np.empty_like(nodes_a1)
    mid_a1 = np.empty((n_z, num.n_t), complex)
    mid_a2 = np.empty_like(mid_a1)
    nodes_a1[0], nodes_a2[0] = a1, a2

    dist = cfg.mismatch.distribution
    w_p1 = dist.get("p1", 0.0)
    w_p2 = dist.get("p2", 0.0)

    fft, ifft = np.fft.fft, np.fft.ifft
    z = 0.0
    for k in range(n_sub):
        # taper phase over each linear half, midpoint rule
        kap_a = kp.kappa(z + hs / 4.0)
        kap_b = kp.kappa(z + 3.0 * hs / 4.0)
        ph1a = np.exp(1j * w_p1 * kap_a * hs / 2.0)
        ph2a = np.exp(1j * w_p2 * kap_a * hs / 2.0)
        ph1b = np.exp(1j * w_p1 * kap_b * hs / 2.0)
        ph2b = np.exp(1j * w_p2 * kap_b * hs / 2.0)

        a1 = fft(half1 * ifft(a1)) * ph1a
        a2 = fft(half2 * ifft(a2)) * ph2a
        if nl_on:
            p1_sq = np.abs(a1) ** 2
            p2_sq = np.abs(a2) ** 2
            a1 = a1 * np.exp(1j * hs * (d.gamma_1111 * p1_sq + 2.0 * d.gamma_1122 * p2_sq))
            a2 = a2 * np.exp(1j * hs * (d.gamma_2222 * p2_sq + 2.0 * d.gamma_2211 * p1_sq))
        a1 = fft(half1 * ifft(a1)) * ph1b
        a2 = fft(half2 * ifft(a2)) * ph2b
        z += hs

        if k % 2 == 0:
            mid_a1[k // 2], mid_a2[k // 2] = a1, a2
        else:
            j = (k + 1) // 2
            nodes_a1[j], nodes_a2[j] = a1, a2
            if j % 128 == 0 and not (np.all(np.isfinite(a1)) and np.all(np.isfinite(a2))):
                raise PropagationError(f"pump propagation diverged at step {j}")

    if not (np.all(np.isfinite(nodes_a1)) and np.all(np.isfinite(nodes_a2))):
        raise PropagationError("pump propagation produced non-finite values")

    z_nodes = np.linspace(0.0, L, n_z + 1)
    z_mid = z_nodes[:-1] + h / 2.0
    return PumpTrace(
        grid=grid,
        z_nodes=z_nodes,
        a_p1=nodes_a1,
        a_p2=nodes_a2,
        z_mid=z_mid,
        a_p1_mid=mid_a1,
        a_p2_mid=mid_a2,
    )


def analytic_pumps(cfg: SourceConfig, z, t):
    """Closed-form moving gaussians in lab coordinates (z in m, t in s),
    ignoring loss, dispersion and nonlinearity."""
    d = cfg.dispersion
    rp = derive_run_params(cfg)
    t0 = cfg.pump.t0_fwhm
    sigma1 = d.v_p1 * t0 / (2.0 * np.sqrt(np.log(2.0)))
    sigma2 = d.v_p2 * t0 / (2.0 * np.sqrt(np.log(2.0)))
    z = np.asarray(z, dtype=float)
    t = np.asarray(t, dtype=float)
    a1 = np.sqrt(rp.p_peak_1) * np.exp(-((z - d.v_p1 * (t - cfg.pump.tau)) ** 2) / (2.0 * sigma1**2))
    a2 = np.sqrt(rp.p_peak_2) * np.exp(-((z - d.v_p2 * t) ** 2) / (2.0 * sigma2**2))
    return a1, a2
