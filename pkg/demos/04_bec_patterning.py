"""
Coherent patterning of a two-component 87Rb condensate.

A cigar-shaped condensate of 5e4 atoms sits in |a>.  A uniform TW and a
standing wave with a 15 um node spacing run the SLAP sequence; atoms away
from the nodes end up in |b>, and |a> is left as a comb of narrow peaks.
The width of the central peak is tracked in time and the beam quality
factor is evaluated when it is smallest.

The full run (0 to 55 us at dt = 0.15 ns, 4096 points) takes about five
minutes.  Pass ``--quick`` to stop at 42 us on a 2048-point grid.
Outputs ``bec_fwhm.csv``.
"""

import sys

import numpy as np

from slap.gpe import (
    CondensateConfig, beam_quality, evolve_gpe, patterning_pulses, fwhm_vs_time, ground_state,
    tw_switch_off_time,
)
from slap.profiles import write_csv

quick = "--quick" in sys.argv
cfg = CondensateConfig(n_points=2048 if quick else 4096)
p = patterning_pulses()
t_end = 42e-6 if quick else 55e-6

mu, R = cfg.thomas_fermi()
print(f"Thomas-Fermi radius {R * 1e6:.1f} um, grid spacing {cfg.grid()[1] * 1e9:.0f} nm")

gs = ground_state(cfg)
tr = evolve_gpe(gs, cfg, p, t_end, 1.5e-10, sample_times=np.arange(0, t_end + 1e-9, 0.25e-6))
times, widths, t_min = fwhm_vs_time(tr, p.k_sw)
write_csv("bec_fwhm.csv", ["t", "fwhm_a"], [[t, None if np.isnan(w) else w]
                                           for t, w in zip(times, widths)])

print(f"minimum width {np.nanmin(widths) * 1e6:.3f} um at t = {t_min * 1e6:.2f} us")
print(f"TW at 1% of its peak at t = {tw_switch_off_time(p) * 1e6:.2f} us")
i = int(np.argmin(np.abs(times - t_min)))
try:
    m2, info = beam_quality(tr.states[i], "a", p.k_sw)
    print(f"M^2 = {m2:.3f} (dx = {info['dx'] * 1e9:.1f} nm, dp/hbar = {info['dp'] / 1.0546e-34:.3g} 1/m)")
except Exception as exc:
    # a structure narrower than a few grid points cannot be measured
    print(f"M^2 not available: {exc}")
print("atoms left in a, b, c:", np.round(tr.norms[-1]).astype(int))
