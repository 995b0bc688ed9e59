"""
State-selective lithography with metastable neon.

The 3s(3P0) atoms are the ones that damage the substrate (16.6 eV).  The
TW couples 3s(3P1) <-> 3p(3P1) and the SW couples 3s(3P0) <-> 3p(3P1), so
SLAP moves atoms away from the SW nodes into 3s(3P1), which decays to the
ground state within nanoseconds.  Part of the population is diabatically
lost into the long-lived 3s(3P2) level, which lowers the contrast unless
it is depumped by an extra laser.

Branching ratios of 3p(3P1) come from the bundled NIST table.  Outputs:
``neon_populations.csv`` and ``neon_energy.csv``.
"""

import numpy as np

from slap.nestar import (
    NeStarConfig, apply_depump, contrast, default_pulses, energy_profile, nestar_profile,
)
from slap.profiles import XGrid, extract_fwhm

cfg = NeStarConfig()
p = default_pulses(cfg)  # v_z = 500 m/s, d = 100 um, sigma = 100 ns, R = 400
print(f"T = {p.T * 1e9:.0f} ns, node spacing {np.pi / p.k_sw * 1e9:.1f} nm")
print("Einstein A of 3p(3P1) (1/s):")
for name, a in cfg.branching().items():
    print(f"  -> {name:8s} {a:.3g}")

prof, energy = nestar_profile(cfg, p, XGrid(points_per_period=1001), rtol=1e-7)
prof.to_csv("neon_populations.csv")
energy.to_csv("neon_energy.csv")

mid = prof.x.size // 2
print()
print(f"3P0 peak FWHM at the node: {extract_fwhm(prof, '3s(3P0)') * 1e9:.2f} nm")
print(f"3P2 population midway between nodes: {prof.population('3s(3P2)')[mid + 250]:.3f}")
print(f"energy contrast without depumping: {100 * contrast(energy):.1f}%")
dep = energy_profile(apply_depump(prof), cfg.energies)
print(f"energy contrast with depumping:    {100 * contrast(dep):.1f}%")
print(f"largest conservation error: {np.max(np.abs(prof.total() - 1)):.1e}")
