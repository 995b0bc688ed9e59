"""Metastable neon lithography scenario.

Open scheme on the Ne* 3s/3p manifold:

    0  3s(3P0)   metastable, initial, couples to 2 via the SW (616.4 nm)
    1  3s(3P1)   couples to 2 via the TW (603.0 nm), decays to the ground state
    2  3p(3P1)   excited, branches into 0, 1, 3 and into 3s(1P1)
    3  3s(3P2)   metastable trap state, lifetime 14.73 s (decay neglected)

Everything that reaches the true ground state (directly or through
3s(1P1)) leaves the modelled space.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Optional

import numpy as np

from .analytic import BeamGeometry, PulsePair, stirap_time
from .errors import ConfigError, DomainError
from .master_eq import EXTERNAL, Coupling, Decay, LevelScheme
from .profiles import LocalizationProfile, XGrid, slap_profile, write_csv

TWO_PI = 2 * np.pi

LABELS = ("3s(3P0)", "3s(3P1)", "3p(3P1)", "3s(3P2)")
P0, P1, EXCITED, P2 = range(4)
REQUIRED_CHANNELS = ("3s(3P0)", "3s(3P1)", "3s(3P2)")


def load_branching() -> dict:
    """Einstein A coefficients (s^-1) of 3p(3P1), keyed by lower level."""
    text = resources.files("slap").joinpath("data/ne_branching.json").read_text()
    return {k: v["A"] for k, v in json.loads(text)["einstein_A"].items()}


@dataclass(frozen=True)
class NeStarConfig:
    lambda_tw: float = 603.0e-9
    lambda_sw: float = 616.4e-9
    einstein_a: Optional[dict] = None
    ground_decay: float = TWO_PI * 7.58e6  # 3s(3P1) -> ground state
    tau_p2: float = 14.73
    energies: tuple = (16.6, 16.67, 18.72, 16.6)  # eV, ordered as LABELS
    depump: bool = False

    def branching(self) -> dict:
        a = load_branching() if self.einstein_a is None else dict(self.einstein_a)
        missing = [k for k in REQUIRED_CHANNELS if k not in a]
        if missing:
            raise ConfigError(f"Ne* configuration incomplete: missing Einstein A for {missing}")
        return a

    def scheme(self) -> LevelScheme:
        a = self.branching()
        index = {"3s(3P0)": P0, "3s(3P1)": P1, "3s(3P2)": P2}
        decays = [Decay(EXCITED, index.get(k, EXTERNAL), float(v)) for k, v in a.items()]
        decays.append(Decay(P1, EXTERNAL, self.ground_decay))
        # 14.73 s lifetime against sub-microsecond pulses
        decays.append(Decay(P2, EXTERNAL, 0.0))
        return LevelScheme(
            n_states=4,
            couplings=(Coupling(P0, EXCITED, "SW"), Coupling(P1, EXCITED, "TW")),
            decays=tuple(decays),
            energies=tuple(self.energies),
            labels=LABELS,
        )

    @property
    def k_sw(self) -> float:
        return TWO_PI / self.lambda_sw


def default_pulses(cfg: NeStarConfig = NeStarConfig(),
                   geometry: BeamGeometry = BeamGeometry(v_z=500.0, d=100e-6),
                   sigma: float = 100e-9, R: float = 400.0,
                   omega_tw0: float = TWO_PI * 1.6e7) -> PulsePair:
    """Pulse pair for the lithography example: T = d / v_z = 200 ns."""
    T = stirap_time(geometry)
    return PulsePair(omega_tw0, omega_tw0 * np.sqrt(R), sigma, sigma, 0.0, T, k_sw=cfg.k_sw)


@dataclass
class EnergyProfile:
    x: np.ndarray
    energy: np.ndarray  # eV per atom
    populations: np.ndarray
    k_sw: float

    def to_csv(self, path) -> None:
        write_csv(path, ["x", "energy_eV"], np.column_stack([self.x, self.energy]))


def energy_profile(profile: LocalizationProfile, energies) -> EnergyProfile:
    energies = np.asarray(energies, dtype=float)
    e = energies @ profile.populations
    return EnergyProfile(profile.x.copy(), np.maximum(e, 0.0), profile.populations.copy(),
                         profile.k_sw)


def apply_depump(profile: LocalizationProfile, scheme=None) -> LocalizationProfile:
    """Ideal depumping: move all 3s(3P2) population into the escaped column."""
    i = profile.index("3s(3P2)") if "3s(3P2)" in profile.labels else P2
    pops = profile.populations.copy()
    esc = profile.escaped.copy()
    esc[i] += pops[i]
    pops[i] = 0.0
    params = dict(profile.params, depumped=True)
    return LocalizationProfile(profile.x.copy(), pops, esc, profile.labels, profile.k_sw, params)


def contrast(e: EnergyProfile) -> float:
    """(E_node - E_background) / E_node.

    E_node is the value at the node nearest the grid centre; the background
    is the median over points at least a quarter node spacing from any node.
    """
    spacing = np.pi / e.k_sw
    if e.x[-1] - e.x[0] < spacing * (1 - 1e-9):
        raise DomainError("energy profile must span a full node spacing")
    centre = 0.5 * (e.x[0] + e.x[-1])
    x_node = np.rint(centre / spacing) * spacing
    peak = e.energy[np.argmin(np.abs(e.x - x_node))]
    if peak <= 0:
        raise DomainError("zero energy at the node")
    dist = np.abs(e.x / spacing - np.rint(e.x / spacing)) * spacing
    background = np.median(e.energy[dist >= 0.25 * spacing])
    return float((peak - background) / peak)


def nestar_profile(cfg: NeStarConfig = NeStarConfig(), p: Optional[PulsePair] = None,
                   grid: XGrid = XGrid(), rtol: float = 1e-8, threads: int = 1):
    """SLAP populations and deposited-energy profile around a SW node.

    Returns ``(LocalizationProfile, EnergyProfile)``; with ``cfg.depump``
    both reflect the ideal removal of 3s(3P2).
    """
    scheme = cfg.scheme()
    if p is None:
        p = default_pulses(cfg)
    prof = slap_profile(scheme, p, grid, rtol=rtol, threads=threads)
    prof.params["nestar"] = {
        "lambda_tw": cfg.lambda_tw, "lambda_sw": cfg.lambda_sw,
        "einstein_a": cfg.branching(), "ground_decay": cfg.ground_decay,
        "energies": list(cfg.energies), "depump": cfg.depump,
    }
    if cfg.depump:
        prof = apply_depump(prof, scheme)
    return prof, energy_profile(prof, cfg.energies)
