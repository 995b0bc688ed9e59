"""
Closed-form localization estimates.

Walks through the analytic side of the package for the two parameter sets
used throughout the demos:

* a three-level Lambda system in natural units (rates in gamma, lengths in
  the SW wavelength), where the SLAP width formula can be compared with the
  CPT width as the TW amplitude grows;
* the metastable neon beam, where the STIRAP delay comes from the beam
  velocity and the distance between the TW and SW axes.

Nothing here integrates an equation of motion, so the script runs instantly.
"""

import numpy as np

from slap.analytic import (
    BeamGeometry, fwhm_cpt, fwhm_slap, raman_nath_resolution_ok, stirap_time,
    super_localization_threshold,
)
from slap.errors import ValidityError


# =============================================================================
# Natural units: gamma = 1, lambda = 1
# =============================================================================

k = 2 * np.pi
R = 100.0
T = 10.0
A = 10.0

print(f"CPT width for R = {R:g}: {fwhm_cpt(k, R):.4f} lambda")
print(f"super-localization needs T*Omega_TW0 > {super_localization_threshold(A):.3f}, "
      f"i.e. Omega_TW0 > {super_localization_threshold(A) / T:.3f} gamma")
print()
print(" Omega_TW0   FWHM_slap   FWHM_slap/FWHM_cpt")
for omega in (0.2, 0.3, 0.4, 0.45, 0.5, 0.6, 0.8, 0.95, 1.0):
    try:
        w = fwhm_slap(k, R, A, T, omega)
        print(f"  {omega:6.2f}    {w:9.5f}   {w / fwhm_cpt(k, R):8.3f}")
    except ValidityError:
        # the formula needs A > T*Omega_TW0
        print(f"  {omega:6.2f}    (outside validity)")


# =============================================================================
# Ne* beam: T = d / v_z
# =============================================================================

lam_sw = 616.4e-9
k_ne = 2 * np.pi / lam_sw
omega_tw0 = 2 * np.pi * 1.6e7

print()
for d in (100e-6, 2e-6, 0.0):
    g = BeamGeometry(v_z=500.0, d=d, dv_x=0.05)
    T_ne = stirap_time(g)
    line = f"d = {d * 1e6:5.1f} um: T = {T_ne * 1e9:6.1f} ns, T*Omega_TW0 = {T_ne * omega_tw0:7.2f}"
    if T_ne == 0:
        line += "  (no delay: CPT only)"
    else:
        # "drift much smaller than the structure": factor 10 strict, factor 2 loose
        strict = raman_nath_resolution_ok(g, T_ne, 1e-9)
        loose = raman_nath_resolution_ok(g, T_ne, 1e-9, margin=2)
        line += (f", transverse drift {T_ne * g.dv_x * 1e9:.2f} nm, "
                 f"1 nm resolvable: {strict} (x10) / {loose} (x2)")
    print(line)
print(f"CPT width at R = 400: {fwhm_cpt(k_ne, 400) * 1e9:.2f} nm")
