"""Two-component 1D Gross-Pitaevskii solver with a lossy excited component.

The condensate fields psi_a, psi_b (trapped) and psi_c (untrapped, lost
at rate Gamma) obey

    i hbar da/dt = [T + V + g_aa|a|^2 + g_ab|b|^2] a + hbar Omega_sw(x,t)/2 c
    i hbar db/dt = [T + V + g_bb|b|^2 + g_ab|a|^2] b + hbar Omega_tw(t)/2 c
                   + hbar (Delta_sw - Delta_tw) b
    i hbar dc/dt = hbar Omega_sw/2 a + hbar Omega_tw/2 b
                   + hbar (Delta_sw - i Gamma/2) c

with g_ij = 2 hbar a_ij omega_t.  Real-time steps use Strang splitting:
spectral kinetic half steps around a pointwise stage in which the
nonlinear/trap phases bracket an exact exponential of the 3x3 coupling
block.  Fields are normalized to the atom number, int |psi|^2 dx = N.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.fft as sfft
from scipy.constants import atomic_mass, hbar

from .analytic import PulsePair, mixing_angle_at, rabi_tw
from .errors import ConvergenceError, NoPeakError, StepSizeError
from .profiles import fwhm_at

RB87_MASS = 86.909180531 * atomic_mass
COMPONENTS = ("a", "b", "c")
EDGE_FRACTION = 0.01
EDGE_THRESHOLD = 1e-6


@dataclass(frozen=True)
class CondensateConfig:
    mass: float = RB87_MASS
    n_atoms: float = 5e4
    a_mean: float = 55e-10
    a_ratios: tuple = (1.03, 1.0, 0.97)  # a_aa : a_ab : a_bb
    omega_x: float = 2 * np.pi * 14.0
    omega_t: float = 2 * np.pi * 715.0
    gamma: float = 2 * np.pi * 5.41e6
    n_points: int = 4096
    extent: Optional[float] = None  # defaults to 8 Thomas-Fermi radii
    interacting: bool = True

    @property
    def scattering_lengths(self) -> tuple:
        r = np.asarray(self.a_ratios, dtype=float)
        a = self.a_mean * r * 3.0 / r.sum()
        return tuple(float(v) for v in a)

    @property
    def g(self) -> tuple:
        """(g_aa, g_ab, g_bb) in J m."""
        if not self.interacting:
            return (0.0, 0.0, 0.0)
        return tuple(2 * hbar * a * self.omega_t for a in self.scattering_lengths)

    def thomas_fermi(self) -> tuple:
        """Chemical potential and radius of the single-component TF profile."""
        g = self.g[0]
        if g == 0:
            raise ValueError("Thomas-Fermi limit needs g_aa > 0")
        mu = (0.75 * g * self.n_atoms * np.sqrt(0.5 * self.mass) * self.omega_x) ** (2 / 3)
        return mu, np.sqrt(2 * mu / self.mass) / self.omega_x

    def length(self) -> float:
        if self.extent is not None:
            return self.extent
        if self.g[0] > 0:
            return 8 * self.thomas_fermi()[1]
        return 20 * np.sqrt(hbar / (self.mass * self.omega_x))

    def grid(self):
        """Positions (x = 0 on the grid), spacing and angular wave numbers."""
        n = self.n_points
        dx = self.length() / n
        x = (np.arange(n) - n // 2) * dx
        k = 2 * np.pi * np.fft.fftfreq(n, dx)
        return x, dx, k

    def potential(self, x) -> np.ndarray:
        return 0.5 * self.mass * self.omega_x**2 * np.asarray(x) ** 2


@dataclass
class CondensateState:
    psi: np.ndarray  # (3, n) complex, rows a, b, c
    x: np.ndarray
    t: float = 0.0

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def psi_a(self):
        return self.psi[0]

    @property
    def psi_b(self):
        return self.psi[1]

    @property
    def psi_c(self):
        return self.psi[2]

    def density(self, component="a") -> np.ndarray:
        return np.abs(self.psi[_component(component)]) ** 2

    def norms(self) -> np.ndarray:
        return np.sum(np.abs(self.psi) ** 2, axis=1) * self.dx

    def copy(self) -> "CondensateState":
        return CondensateState(self.psi.copy(), self.x, self.t)


def _component(c) -> int:
    return COMPONENTS.index(c) if isinstance(c, str) else int(c)


def energy(state: CondensateState, cfg: CondensateConfig, p: Optional[PulsePair] = None) -> float:
    """Gross-Pitaevskii energy functional (J); couplings included when p is given."""
    x, dx, k = cfg.grid()
    g_aa, g_ab, g_bb = cfg.g
    V = cfg.potential(x)
    a, b, c = state.psi
    e = 0.0
    for f in (a, b):
        fk = np.fft.fft(f)
        e += hbar**2 / (2 * cfg.mass) * np.sum(k**2 * np.abs(fk) ** 2) * dx / f.size
        e += np.sum(V * np.abs(f) ** 2) * dx
    na, nb = np.abs(a) ** 2, np.abs(b) ** 2
    e += np.sum(0.5 * g_aa * na**2 + 0.5 * g_bb * nb**2 + g_ab * na * nb) * dx
    if p is not None:
        om_sw = p.omega_sw0 * np.sin(p.k_sw * x) * np.exp(-((state.t - p.t_sw) ** 2) / p.sigma_sw**2)
        om_tw = float(rabi_tw(p, state.t))
        e += hbar * np.sum(np.real(np.conj(c) * (om_sw * a + om_tw * b))) * dx
        e += hbar * np.sum((p.delta_sw - p.delta_tw) * nb + p.delta_sw * np.abs(c) ** 2) * dx
    return float(e)


def gp_residual(psi: np.ndarray, cfg: CondensateConfig) -> tuple:
    """Relative residual |H psi - mu psi| / (mu |psi|) of the single-component GP operator."""
    x, dx, k = cfg.grid()
    h = np.fft.ifft(hbar**2 * k**2 / (2 * cfg.mass) * np.fft.fft(psi))
    h += (cfg.potential(x) + cfg.g[0] * np.abs(psi) ** 2) * psi
    mu = np.vdot(psi, h).real / np.vdot(psi, psi).real
    return float(np.linalg.norm(h - mu * psi) / (abs(mu) * np.linalg.norm(psi))), float(mu)


def ground_state(cfg: CondensateConfig, dtau_schedule: Sequence[float] = (1.0, 0.1, 0.01),
                 tol: float = 1e-10, check_every: int = 100,
                 max_iter: int = 200_000) -> CondensateState:
    """Imaginary-time ground state of component a; b = c = 0.

    ``dtau_schedule`` is in units of hbar / E_scale, with E_scale the
    Thomas-Fermi chemical potential (interacting) or hbar omega_x.  A stage
    ends once the relative energy change per step is below ``tol`` and the
    GP residual has stopped improving; the residual left by the last stage
    scales with its step.
    """
    x, dx, k = cfg.grid()
    V = cfg.potential(x)
    g = cfg.g[0]
    N = cfg.n_atoms
    if g > 0:
        mu, _ = cfg.thomas_fermi()
        psi = np.sqrt(np.maximum(mu - V, 0.0) / g + 1e-6 * mu / g).astype(complex)
        e_scale = mu
    else:
        ell = np.sqrt(hbar / (cfg.mass * cfg.omega_x))
        psi = np.exp(-(x**2) / (2 * (1.5 * ell) ** 2)).astype(complex)
        e_scale = hbar * cfg.omega_x
    psi *= np.sqrt(N / (np.sum(np.abs(psi) ** 2) * dx))
    kin = hbar * k**2 / (2 * cfg.mass)

    def e_of(f):
        st = CondensateState(np.vstack([f, np.zeros_like(f), np.zeros_like(f)]), x)
        return energy(st, cfg)

    it = 0
    residual = np.inf
    for step in dtau_schedule:
        dtau = step * hbar / e_scale
        half_k = np.exp(-0.5 * kin * dtau)
        last_res = np.inf
        while True:
            e_old = e_of(psi)
            for _ in range(check_every):
                psi = np.fft.ifft(half_k * np.fft.fft(psi))
                psi *= np.exp(-(V + g * np.abs(psi) ** 2) * dtau / hbar)
                psi = np.fft.ifft(half_k * np.fft.fft(psi))
                psi *= np.sqrt(N / (np.sum(np.abs(psi) ** 2) * dx))
            it += check_every
            e_new = e_of(psi)
            change = abs(e_new - e_old) / abs(e_new) / check_every
            residual, _ = gp_residual(psi, cfg)
            if change < tol and residual > 0.99 * last_res:
                break
            last_res = residual
            if it >= max_iter:
                raise ConvergenceError(
                    f"imaginary-time propagation did not converge in {max_iter} steps",
                    residual=residual,
                )
    psi = np.abs(psi).astype(complex)
    return CondensateState(np.vstack([psi, np.zeros_like(psi), np.zeros_like(psi)]), x, 0.0)


def coupling_propagator(om_sw, om_tw, delta_b: float, delta_c: float, gamma: float, dt: float):
    """exp(-i M dt) for the pointwise 3x3 coupling block M (units of rad/s).

    Returns an array (3, 3, n).  At two-photon resonance (delta_b = 0) the
    dark combination decouples and the bright/excited 2x2 block is
    exponentiated in closed form; otherwise a batched eigendecomposition
    is used.
    """
    om_sw = np.atleast_1d(np.asarray(om_sw, dtype=float))
    n = om_sw.size
    s = 0.5 * om_sw
    w = np.broadcast_to(0.5 * np.asarray(om_tw, dtype=float), s.shape)
    z = delta_c - 0.5j * gamma
    if delta_b == 0:
        om = np.hypot(s, w)
        q = np.sqrt(0.25 * z * z + om * om + 0j)
        qdt = q * dt
        small = np.abs(qdt) < 1e-8
        S = np.where(small, dt, np.sin(qdt) / np.where(small, 1.0, q))
        ph = np.exp(-0.5j * z * dt)
        cos = np.cos(qdt)
        u_bb = ph * (cos + 0.5j * z * S)
        u_bc = ph * (-1j * om * S)
        u_cc = ph * (cos - 0.5j * z * S)
        safe = np.where(om > 0, om, 1.0)
        cs, cw = np.where(om > 0, s / safe, 0.0), np.where(om > 0, w / safe, 0.0)
        U = np.empty((3, 3, n), dtype=complex)
        d = u_bb - 1.0
        U[0, 0] = 1 + cs * cs * d
        U[0, 1] = U[1, 0] = cs * cw * d
        U[1, 1] = 1 + cw * cw * d
        U[0, 2] = U[2, 0] = cs * u_bc
        U[1, 2] = U[2, 1] = cw * u_bc
        U[2, 2] = u_cc
        return U
    M = np.zeros((n, 3, 3), dtype=complex)
    M[:, 0, 2] = M[:, 2, 0] = s
    M[:, 1, 2] = M[:, 2, 1] = w
    M[:, 1, 1] = delta_b
    M[:, 2, 2] = z
    lam, vec = np.linalg.eig(M)
    U = vec @ (np.exp(-1j * lam * dt)[:, :, None] * np.linalg.inv(vec))
    return np.moveaxis(U, 0, -1)


def _apply_resonant_coupling(a, b, c, s, w, z, dt):
    """Exact coupling step at two-photon resonance via the bright state."""
    om2 = s * s + w * w
    om = np.sqrt(om2)
    q = np.sqrt(0.25 * z * z + om2 + 0j)
    e = np.exp(1j * dt * q)
    einv = 1.0 / e
    cos = 0.5 * (e + einv)
    with np.errstate(invalid="ignore", divide="ignore"):
        S = np.where(q == 0, dt, -0.5j * (e - einv) / q)
        inv_om = np.where(om > 0, 1.0 / om, 0.0)
    ph = np.exp(-0.5j * z * dt)
    half_zS = 0.5j * z * S
    omS = -1j * om * S
    cs, cw = s * inv_om, w * inv_om
    bright = cs * a + cw * b
    new_bright = ph * ((cos + half_zS) * bright + omS * c)
    c = ph * (omS * bright + (cos - half_zS) * c)
    diff = new_bright - bright
    return a + cs * diff, b + cw * diff, c


@dataclass
class Trajectory:
    times: np.ndarray
    states: list
    norms: np.ndarray  # (n_samples, 3)
    params: dict = field(default_factory=dict)

    def densities(self, component="a") -> np.ndarray:
        return np.array([s.density(component) for s in self.states])


def _sw_shape(p: Optional[PulsePair], x):
    if p is None:
        return np.zeros_like(x)
    return np.sin(p.k_sw * x)


def evolve_gpe(state: CondensateState, cfg: CondensateConfig, p: Optional[PulsePair],
               t_end: float, dt: float, sample_times: Optional[Sequence[float]] = None,
               check_edges: bool = True) -> Trajectory:
    """Real-time evolution from ``state.t`` to ``t_end``.

    ``p = None`` switches both fields off.  Snapshots are taken at the step
    closest to each requested sample time (the initial and final states are
    always included).
    """
    x, dx, k = cfg.grid()
    if state.psi.shape != (3, x.size):
        raise ValueError("state does not match the configured grid")
    om_max = 0.0 if p is None else max(p.omega_tw0, p.omega_sw0)
    if dt * om_max >= 0.1:
        raise StepSizeError(f"dt*Omega_max = {dt * om_max:.3g} must be below 0.1")
    kin = hbar * k**2 / (2 * cfg.mass)
    if dt * kin.max() > np.pi:
        raise StepSizeError(f"dt*hbar*k_max^2/2m = {dt * kin.max():.3g} exceeds pi")
    n_steps = int(round((t_end - state.t) / dt))
    if n_steps < 0:
        raise ValueError("t_end precedes the state time")
    g_aa, g_ab, g_bb = cfg.g
    V = cfg.potential(x)
    half_k = np.exp(-0.5j * kin * dt)
    sw_shape = _sw_shape(p, x)
    delta_b = 0.0 if p is None else p.delta_sw - p.delta_tw
    delta_c = 0.0 if p is None else p.delta_sw
    ab = state.psi[:2].copy()
    c = state.psi[2].copy()
    t0 = state.t
    wanted = [] if sample_times is None else sorted(sample_times)
    sample_steps = {0, n_steps}
    for ts in wanted:
        sample_steps.add(int(np.clip(round((ts - t0) / dt), 0, n_steps)))
    times, states, norms = [], [], []
    edge = max(1, int(EDGE_FRACTION * x.size))
    warned = False
    h_over_hbar = 0.5 * dt / hbar
    # coefficient matrix of the nonlinear energies: rows a, b; columns |a|^2, |b|^2
    gmat = np.array([[g_aa, g_ab], [g_ab, g_bb]])

    def record(step, ab):
        st = CondensateState(np.vstack([ab, c[None]]), x, t0 + step * dt)
        times.append(st.t)
        states.append(st)
        norms.append(st.norms())

    def nonlinear(ab, halves=1):
        dens = ab.real ** 2 + ab.imag ** 2
        phase = (V + np.tensordot(gmat, dens, axes=(1, 0))) * (halves * h_over_hbar)
        return ab * np.exp(-1j * phase)

    # Strang step N/2 K/2 C K/2 N/2; the trailing nonlinear phase of one step
    # and the leading one of the next are fused (both leave |psi| unchanged)
    z = delta_c - 0.5j * cfg.gamma
    pending = False
    for step in range(n_steps + 1):
        if step in sample_steps:
            record(step, nonlinear(ab) if pending else ab)
        if step == n_steps:
            break
        t_mid = t0 + (step + 0.5) * dt
        ab = nonlinear(ab, 2 if pending else 1)
        ab = sfft.ifft(half_k * sfft.fft(ab))
        if p is not None or cfg.gamma > 0:
            if p is None:
                om_sw, om_tw = np.zeros_like(x), 0.0
            else:
                om_sw = p.omega_sw0 * np.exp(-((t_mid - p.t_sw) ** 2) / p.sigma_sw**2) * sw_shape
                om_tw = float(rabi_tw(p, t_mid))
            a, b = ab
            if delta_b == 0:
                a, b, c = _apply_resonant_coupling(a, b, c, 0.5 * om_sw, 0.5 * om_tw, z, dt)
            else:
                U = coupling_propagator(om_sw, om_tw, delta_b, delta_c, cfg.gamma, dt)
                a, b, c = (U[0, 0] * a + U[0, 1] * b + U[0, 2] * c,
                           U[1, 0] * a + U[1, 1] * b + U[1, 2] * c,
                           U[2, 0] * a + U[2, 1] * b + U[2, 2] * c)
            ab = np.array([a, b])
        ab = sfft.ifft(half_k * sfft.fft(ab))
        pending = True
        if check_edges and not warned and step % 1000 == 0:
            amp = np.abs(ab)
            peak = max(amp.max(), 1e-300)
            rim = max(amp[:, :edge].max(), amp[:, -edge:].max())
            if rim > EDGE_THRESHOLD * peak:
                warnings.warn(f"boundary contamination: edge amplitude {rim / peak:.2e} of peak "
                              f"at t={t0 + (step + 1) * dt:.4e}", RuntimeWarning)
                warned = True
    return Trajectory(np.array(times), states, np.array(norms),
                      {"dt": dt, "t_end": t_end, "n_points": x.size})


def mixing_angle_trace(p: PulsePair, x: float, times) -> np.ndarray:
    """Dark-state mixing angle at fixed x from the analytic envelope ratio."""
    return np.asarray(mixing_angle_at(p, x, np.asarray(times, dtype=float)))


def fwhm_vs_time(traj: Trajectory, k_sw: float, node_index: int = 0, component="a"):
    """FWHM of the |component> structure at a SW node for every snapshot.

    Returns ``(times, widths, t_min)``; widths are NaN where no peak is
    distinguishable and t_min is the time of the smallest width.
    """
    spacing = np.pi / k_sw
    widths = np.full(len(traj.states), np.nan)
    for i, st in enumerate(traj.states):
        try:
            widths[i] = fwhm_at(st.x, st.density(component), node_index * spacing, spacing)
        except NoPeakError:
            pass
    if np.all(np.isnan(widths)):
        raise NoPeakError("no localized structure in any snapshot")
    return traj.times, widths, float(traj.times[np.nanargmin(widths)])


def beam_quality(state: CondensateState, component="a", k_sw: Optional[float] = None,
                 node_index: int = 0, window_factor: float = 3.0):
    """Beam quality factor M^2 = (2 / hbar) dx dp of one localized structure.

    The component field is multiplied by a Hann window centred on the
    structure's peak with full width ``window_factor`` times its FWHM.  dp
    is the rms width of hbar*k over the windowed field's spectrum; dx is the
    rms width of the windowed density after subtracting the windowed
    baseline (the structure's local minimum density).  Without ``k_sw``
    the structure is taken to be the global maximum of the density.

    Returns ``(m2, info)`` with info holding dx, dp, fwhm, centre and the
    window definition.
    """
    x = state.x
    psi = state.psi[_component(component)]
    n = np.abs(psi) ** 2
    if k_sw is None:
        x0 = float(x[np.argmax(n)])
        spacing = 0.5 * (x[-1] - x[0])
    else:
        spacing = np.pi / k_sw
        x0 = node_index * spacing
    fwhm = fwhm_at(x, n, x0, spacing)
    near = np.abs(x - x0) <= 0.25 * spacing
    centre = float(x[near][np.argmax(n[near])])
    region = np.abs(x - x0) <= spacing
    baseline = float(n[region].min())
    W = window_factor * fwhm
    u = x - centre
    win = np.where(np.abs(u) < 0.5 * W, np.cos(np.pi * u / W) ** 2, 0.0)
    if np.count_nonzero(win) < 5:
        raise NoPeakError("structure is not resolved by the grid")
    phi = psi * win
    dens = np.clip(np.abs(phi) ** 2 - baseline * win**2, 0.0, None)
    w = dens / dens.sum()
    xm = np.sum(w * x)
    dx_rms = float(np.sqrt(np.sum(w * (x - xm) ** 2)))
    k = 2 * np.pi * np.fft.fftfreq(x.size, state.dx)
    power = np.abs(np.fft.fft(phi)) ** 2
    power /= power.sum()
    km = np.sum(power * k)
    dp = float(hbar * np.sqrt(np.sum(power * (k - km) ** 2)))
    m2 = 2.0 / hbar * dx_rms * dp
    info = {"dx": dx_rms, "dp": dp, "fwhm": fwhm, "centre": centre, "baseline": baseline,
            "window": "hann", "window_width": W, "window_factor": window_factor}
    return float(m2), info


def patterning_pulses(period: float = 15e-6) -> PulsePair:
    """Pulse pair of the BEC patterning example; ``period`` is the node spacing."""
    om = 2 * np.pi * 1e7
    return PulsePair(om, 10 * om, 8e-6, 8e-6, 22e-6, 36e-6, k_sw=np.pi / period)


def tw_switch_off_time(p: PulsePair, fraction: float = 0.01) -> float:
    """Time after the TW peak where its envelope falls to ``fraction`` of the peak."""
    return p.t_tw + p.sigma_tw * np.sqrt(np.log(1 / fraction))
