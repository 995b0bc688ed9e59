"""Closed-form localization quantities.

Pulse envelopes, the dark-state mixing angle, the adiabaticity margin, the
CPT and SLAP peak widths, the super-localization threshold and the
Raman-Nath resolution bound.  Everything here is a pure function of its
arguments; angular frequencies are in rad/s (or any consistent unit, e.g.
multiples of a decay rate), times in s and lengths in m.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, UndefinedAngleError, ValidityError

DEFAULT_A = 10.0
DEFAULT_RN_MARGIN = 10.0


@dataclass(frozen=True)
class PulsePair:
    """Gaussian traveling-wave (TW) and standing-wave (SW) driving fields.

    The TW drives the |b>-|c> transition, the SW drives |a>-|c> with a
    sin(k x) spatial profile.
    """

    omega_tw0: float
    omega_sw0: float
    sigma_tw: float
    sigma_sw: float
    t_tw: float
    t_sw: float
    delta_tw: float = 0.0
    delta_sw: float = 0.0
    k_sw: float = 2 * np.pi

    def __post_init__(self):
        if self.omega_tw0 < 0 or self.omega_sw0 < 0:
            raise DomainError("Rabi amplitudes must be non-negative")
        if self.sigma_tw <= 0 or self.sigma_sw <= 0:
            raise DomainError("pulse widths must be positive")
        if self.k_sw <= 0:
            raise DomainError("SW wave number must be positive")

    @property
    def T(self) -> float:
        """STIRAP delay t_sw - t_tw."""
        return self.t_sw - self.t_tw

    @property
    def R(self) -> float:
        """Intensity ratio (omega_sw0 / omega_tw0)**2."""
        if self.omega_tw0 == 0:
            raise DomainError("R is undefined for a zero TW amplitude")
        return (self.omega_sw0 / self.omega_tw0) ** 2

    @property
    def wavelength(self) -> float:
        return 2 * np.pi / self.k_sw

    @property
    def node_spacing(self) -> float:
        """Distance between adjacent SW nodes, pi / k."""
        return np.pi / self.k_sw

    def window(self, n_sigma: float = 4.0) -> tuple[float, float]:
        """Default integration window covering both pulses to +-n_sigma widths."""
        t0 = min(self.t_tw - n_sigma * self.sigma_tw, self.t_sw - n_sigma * self.sigma_sw)
        t1 = max(self.t_tw + n_sigma * self.sigma_tw, self.t_sw + n_sigma * self.sigma_sw)
        return t0, t1

    def with_tw_amplitude(self, omega_tw0: float) -> "PulsePair":
        """Rescale both amplitudes so the TW peak is omega_tw0 at fixed R."""
        return replace(self, omega_tw0=omega_tw0, omega_sw0=omega_tw0 * np.sqrt(self.R))

    def as_cpt(self) -> "PulsePair":
        """Coincident pulses (T = 0) with the SW width set to the TW width."""
        return replace(self, t_sw=self.t_tw, sigma_sw=self.sigma_tw)


@dataclass(frozen=True)
class BeamGeometry:
    """Atomic beam crossing two laser beams separated by ``d``."""

    v_z: float
    d: float
    dv_x: float = 0.0

    def __post_init__(self):
        if self.v_z <= 0:
            raise DomainError("v_z must be positive")
        if self.d < 0 or self.dv_x < 0:
            raise DomainError("d and dv_x must be non-negative")


def rabi_tw(p: PulsePair, t):
    return p.omega_tw0 * np.exp(-((np.asarray(t) - p.t_tw) ** 2) / p.sigma_tw**2)


def rabi_sw(p: PulsePair, x, t):
    """Signed SW Rabi frequency; exactly zero at x = n*pi/k."""
    x = np.asarray(x, dtype=float)
    # sin(k*x) is not exactly zero at float nodes, so snap them
    phase = p.k_sw * x
    s = np.sin(phase)
    n = np.rint(phase / np.pi)
    s = np.where(np.isclose(phase, n * np.pi, rtol=0, atol=1e-12 * max(1.0, np.max(np.abs(n)))), 0.0, s)
    env = np.exp(-((np.asarray(t) - p.t_sw) ** 2) / p.sigma_sw**2)
    return p.omega_sw0 * s * env


def mixing_angle(omega_sw, omega_tw):
    """Dark-state mixing angle, atan2(|omega_sw|, omega_tw), in [0, pi/2]."""
    omega_sw = np.abs(np.asarray(omega_sw, dtype=float))
    omega_tw = np.asarray(omega_tw, dtype=float)
    if np.any((omega_sw == 0) & (omega_tw == 0)):
        raise UndefinedAngleError("mixing angle undefined when both Rabi frequencies vanish")
    theta = np.arctan2(omega_sw, np.abs(omega_tw))
    return float(theta) if theta.ndim == 0 else theta


def mixing_angle_at(p: PulsePair, x, t):
    """Mixing angle from the analytic envelope ratio.

    Works in log space, so the angle stays defined when both envelopes
    underflow far from the pulses.
    """
    t = np.asarray(t, dtype=float)
    s = np.abs(np.sin(p.k_sw * np.asarray(x, dtype=float)))
    if p.omega_tw0 == 0 and p.omega_sw0 == 0:
        raise UndefinedAngleError("both Rabi amplitudes are zero")
    if p.omega_sw0 == 0 or np.all(s == 0):
        return np.zeros_like(t) if t.ndim else 0.0
    if p.omega_tw0 == 0:
        return np.full_like(t, np.pi / 2) if t.ndim else np.pi / 2
    log_ratio = (
        np.log(p.omega_sw0 * s / p.omega_tw0)
        + (t - p.t_tw) ** 2 / p.sigma_tw**2
        - (t - p.t_sw) ** 2 / p.sigma_sw**2
    )
    theta = np.arctan(np.exp(np.clip(log_ratio, -700, 700)))
    return float(theta) if np.ndim(theta) == 0 else theta


def adiabaticity_margin(p: PulsePair, x, A: float = DEFAULT_A):
    """Global adiabaticity margin; positive where the condition holds at x."""
    T = p.T
    if T <= 0:
        raise DomainError("adiabaticity margin requires t_sw > t_tw")
    s2 = np.sin(p.k_sw * np.asarray(x, dtype=float)) ** 2
    return (p.omega_sw0**2 * s2 + p.omega_tw0**2) * (T / A) ** 2 - 1.0


def fwhm_cpt(k: float, R: float) -> float:
    """Width of the Fabry-Perot-like CPT peaks, 2 / (k sqrt(R))."""
    if k <= 0 or R <= 0:
        raise DomainError("k and R must be positive")
    return 2.0 / (k * np.sqrt(R))


def fwhm_slap(k: float, R: float, A: float, T: float, omega_tw0: float) -> float:
    """SLAP peak width; valid only while A > T * omega_tw0."""
    product = T * omega_tw0
    if product <= 0:
        raise DomainError("T * omega_tw0 must be positive")
    if A <= product:
        raise ValidityError(f"A = {A} must exceed T*omega_tw0 = {product}")
    return fwhm_cpt(k, R) * 0.5 * np.sqrt((A / product) ** 2 - 1.0)


def super_localization_threshold(A: float = DEFAULT_A) -> float:
    """Value that T * omega_tw0 must exceed for super-localization."""
    if A <= 0:
        raise DomainError("A must be positive")
    return A / np.sqrt(5.0)


def stirap_time(g: BeamGeometry) -> float:
    return g.d / g.v_z


def raman_nath_resolution_ok(g: BeamGeometry, T: float, dx_slap: float,
                             margin: float = DEFAULT_RN_MARGIN) -> bool:
    """True when transverse smearing T * dv_x is ``margin`` times below dx_slap."""
    if dx_slap <= 0:
        raise DomainError("dx_slap must be positive")
    if margin <= 1:
        raise DomainError("margin must exceed 1")
    return bool(T * g.dv_x * margin < dx_slap)
