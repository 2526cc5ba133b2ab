"""Driven two-dimensional evolution of the joint temporal amplitude.

The stepped field is the reduced amplitude with the accumulated
signal/idler taper phase factored out; the phase is restored on every
stored snapshot and on the final state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import Grid, SourceConfig, derive_run_params
from .mismatch import kappa_profile
from .pumps import PropagationError, PumpEnvelopes, PumpTrace
from .spectral import omega_axis


@dataclass
class JointAmplitude:
    """Complex two-photon amplitude over (T_s, T_i) or (w'_s, w'_i).

    Axis 0 is the Signal, axis 1 the Idler.  norm_sq is the physical pair
    probability integral of |values|^2 on the stored grid.
    """

    values: np.ndarray
    domain: str            # "time" | "frequency"
    grid: Grid
    z: float
    norm_sq: float = field(default=None)

    def __post_init__(self):
        if self.domain not in ("time", "frequency"):
            raise ValueError(f"bad domain {self.domain!r}")
        if self.norm_sq is None:
            self.norm_sq = self.integrate_norm()

    def cell_measure(self) -> float:
        d = self.grid.dt if self.domain == "time" else self.grid.dw
        return d * d

    def integrate_norm(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.cell_measure())


@dataclass
class XiProfile:
    z_nodes: np.ndarray
    xi: np.ndarray
    spectral_map: np.ndarray | None = None


@dataclass
class SimulationResult:
    jta: JointAmplitude
    xi_profile: XiProfile
    snapshots: list
    xi_from_rhs: float     # cumulative-probability bookkeeping (loss + source)


def source_term(
    pumps: PumpEnvelopes,
    grid: Grid,
    gamma_fwm: float,
    theta_si: float = 0.0,
    form: str = "diagonal",
) -> np.ndarray:
    """FWM driving term on the (T_s, T_i) grid at the pump's position.

    The delta ridge of the driving term lives on the grid diagonal with a
    2*pi/dt weight: 1/dt realizes the Dirac delta on the discrete diagonal
    and the 2*pi carries the pump-spectrum convolution normalization of the
    driving term.  form="spectral" rebuilds the same matrix through the
    pump spectral convolution (direct sum, used as an independent
    cross-check).
    """
    n = grid.n
    diag = 2j * np.pi * gamma_fwm * pumps.a_p1 * pumps.a_p2 * np.exp(-1j * theta_si) / grid.dt
    if form == "diagonal":
        out = np.zeros((n, n), complex)
        np.fill_diagonal(out, diag)
        return out
    if form == "spectral":
        spec1 = np.fft.ifft(pumps.a_p1)
        spec2 = np.fft.ifft(pumps.a_p2)
        conv = np.empty(n, complex)
        idx = np.arange(n)
        for m in range(n):
            conv[m] = np.sum(spec1 * spec2[(m - idx) % n])
        g = 2j * np.pi * gamma_fwm * np.exp(-1j * theta_si) * conv / (n * grid.dt)
        ridge = g[(idx[:, None] + idx[None, :]) % n]
        return np.fft.fft2(ridge)
    raise ValueError(f"unknown source form {form!r}")


def _axis_exponents(cfg: SourceConfig, grid: Grid, include_loss=True):
    """Per-unit-length linear-operator exponents L_hat(w) for both axes
    (no taper phase, which is factored out of the stepped field)."""
    d, num = cfg.dispersion, cfg.numerics
    rp = derive_run_params(cfg)
    w = omega_axis(num.n_t, grid.dt)
    disp = 1.0 if num.dispersion_enabled else 0.0
    loss = 1.0 if include_loss else 0.0
    ls = -0.5 * loss * rp.alpha_m["s"] + 1j * w * rp.inv_l_w_s + disp * 0.5j * w**2 / d.l_d_s
    li = -0.5 * loss * rp.alpha_m["i"] + 1j * w * rp.inv_l_w_i + disp * 0.5j * w**2 / d.l_d_i
    return ls, li


def evolve_jta(
    cfg: SourceConfig,
    pump_trace: PumpTrace,
    initial: JointAmplitude | None = None,
    include_source: bool = True,
) -> SimulationResult:
    """Integrate the driven JTA equation in lockstep with the pump trace."""
    grid = pump_trace.grid
    d, num = cfg.dispersion, cfg.numerics
    rp = derive_run_params(cfg)
    kp = kappa_profile(cfg)
    n = num.n_t
    n_z = pump_trace.n_z
    L = cfg.geometry.length
    h = L / n_z
    dt = grid.dt

    ls, li = _axis_exponents(cfg, grid)
    half_mult = np.exp(0.5 * h * ls)[:, None] * np.exp(0.5 * h * li)[None, :]

    dist = cfg.mismatch.distribution
    w_si = dist.get("s", 0.0) + dist.get("i", 0.0)
    sigma = rp.alpha_m["s"] + rp.alpha_m["i"]
    gamma_fwm = d.gamma_p1p2si
    nl_on = num.xpm_spm_enabled

    if initial is None:
        phi = np.zeros((n, n), complex)
    else:
        if initial.domain != "time":
            raise ValueError("initial amplitude must be in the time domain")
        phi = initial.values.astype(complex).copy()

    # accumulated signal+idler taper phase, midpoint quadrature per step
    kap_mid = kp.kappa(pump_trace.z_mid)
    theta_si_mid = w_si * (np.cumsum(kap_mid) - 0.5 * kap_mid) * h
    theta_si_nodes = np.concatenate([[0.0], w_si * np.cumsum(kap_mid) * h])

    xi = np.empty(n_z + 1)
    xi[0] = float(np.sum(np.abs(phi) ** 2)) * dt * dt
    xi_rhs = xi[0]

    snap_idx = np.unique(np.round(np.linspace(0, n_z, max(2, num.snapshot_count))).astype(int))
    snapshots = []

    def take_snapshot(values_time, k):
        full = values_time * np.exp(1j * theta_si_nodes[k])
        snapshots.append(JointAmplitude(values=full, domain="time", grid=grid, z=float(pump_trace.z_nodes[k])))

    if 0 in snap_idx:
        take_snapshot(phi.copy(), 0)

    fft2, ifft2 = np.fft.fft2, np.fft.ifft2
    spec = ifft2(phi)
    diag_idx = np.arange(n)

    for k in range(n_z):
        spec *= half_mult
        phi = fft2(spec)

        a1 = pump_trace.a_p1_mid[k]
        a2 = pump_trace.a_p2_mid[k]
        if nl_on:
            ns = 2.0 * (d.gamma_11ss * np.abs(a1) ** 2 + d.gamma_22ss * np.abs(a2) ** 2)
            ni = 2.0 * (d.gamma_11ii * np.abs(a1) ** 2 + d.gamma_22ii * np.abs(a2) ** 2)
            phi *= np.exp(1j * h * (ns[:, None] + ni[None, :]))

        if include_source:
            src_diag = 2j * np.pi * gamma_fwm * a1 * a2 * np.exp(-1j * theta_si_mid[k]) / dt
            phi_mid_diag = phi[diag_idx, diag_idx] + 0.5 * h * src_diag
            gain = 2.0 * h * float(np.real(np.vdot(src_diag, phi_mid_diag))) * dt * dt
            phi[diag_idx, diag_idx] += h * src_diag
        else:
            gain = 0.0

        spec = ifft2(phi)
        spec *= half_mult

        # exact discrete loss/source bookkeeping in the spirit of the
        # cumulative-probability integral: losses act through the two half
        # steps, the source is injected between them.
        decay_half = np.exp(-sigma * h / 2.0)
        xi_rhs = decay_half * (decay_half * xi_rhs + gain)
        xi[k + 1] = float(np.sum(np.abs(spec) ** 2)) * n * n * dt * dt

        if (k + 1) in snap_idx:
            take_snapshot(fft2(spec), k + 1)
        if (k + 1) % 256 == 0 and not np.all(np.isfinite(spec)):
            raise PropagationError(f"JTA propagation diverged at step {k + 1}")

    phi = fft2(spec)
    if not np.all(np.isfinite(phi)):
        raise PropagationError("JTA propagation produced non-finite values")
    final = JointAmplitude(
        values=phi * np.exp(1j * theta_si_nodes[-1]),
        domain="time",
        grid=grid,
        z=L,
    )
    profile = XiProfile(z_nodes=pump_trace.z_nodes.copy(), xi=xi)
    return SimulationResult(jta=final, xi_profile=profile, snapshots=snapshots, xi_from_rhs=xi_rhs)


def perturbative_oracle(
    cfg: SourceConfig,
    pump_trace: PumpTrace,
    include_loss: bool = True,
) -> JointAmplitude:
    """Direct quadrature of the driven equation at first order.

    Each step's diagonal source is propagated linearly (walk-off, optional
    dispersion, loss) straight to z = L and accumulated in the frequency
    domain.  Only valid with the nonlinear phases disabled.
    """
    if cfg.numerics.xpm_spm_enabled:
        raise ValueError("perturbative oracle requires xpm_spm_enabled = False")
    grid = pump_trace.grid
    d, num = cfg.dispersion, cfg.numerics
    kp = kappa_profile(cfg)
    n = num.n_t
    n_z = pump_trace.n_z
    L = cfg.geometry.length
    h = L / n_z
    dt = grid.dt

    dist = cfg.mismatch.distribution
    w_si = dist.get("s", 0.0) + dist.get("i", 0.0)

    kap_mid = kp.kappa(pump_trace.z_mid)
    theta_si_mid = w_si * (np.cumsum(kap_mid) - 0.5 * kap_mid) * h
    theta_si_L = w_si * np.sum(kap_mid) * h

    ls, li = _axis_exponents(cfg, grid, include_loss=include_loss)

    idx = np.arange(n)
    ridge_idx = (idx[:, None] + idx[None, :]) % n
    acc = np.zeros((n, n), complex)
    for k in range(n_z):
        a1 = pump_trace.a_p1_mid[k]
        a2 = pump_trace.a_p2_mid[k]
        diag = 2j * np.pi * d.gamma_p1p2si * a1 * a2 * np.exp(-1j * theta_si_mid[k]) / dt
        g = np.fft.ifft(diag) / n
        rest = L - pump_trace.z_mid[k]
        acc += h * np.exp(ls * rest)[:, None] * np.exp(li * rest)[None, :] * g[ridge_idx]

    phi = np.fft.fft2(acc) * np.exp(1j * theta_si_L)
    return JointAmplitude(values=phi, domain="time", grid=grid, z=L)
