"""Spatial localization profiles, peak widths and amplitude sweeps."""
from __future__ import annotations

import csv
import json
import logging
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .analytic import PulsePair, fwhm_cpt
from .errors import DomainError, NoPeakError, PhysicsError
from .master_eq import LevelScheme, evolve_batch, projector

log = logging.getLogger(__name__)

MIN_CONTRAST = 0.01
RESOLUTION_POINTS = 4


@dataclass(frozen=True)
class XGrid:
    """Uniform transverse grid centred on SW node ``node``.

    ``periods`` counts node spacings (pi / k) covered; the sample spacing
    is ``(pi / k) / (points_per_period - 1)``.
    """

    node: int = 0
    periods: float = 1.0
    points_per_period: int = 2001

    def positions(self, k_sw: float) -> np.ndarray:
        spacing = np.pi / k_sw
        n = int(round(self.periods * (self.points_per_period - 1))) + 1
        half = 0.5 * (n - 1) / (self.points_per_period - 1)
        u = np.linspace(-half, half, n)
        return (self.node + u) * spacing


@dataclass
class LocalizationProfile:
    x: np.ndarray
    populations: np.ndarray  # (n_states, nx)
    escaped: np.ndarray  # (n_states, nx), by state of origin
    labels: tuple
    k_sw: float
    params: dict = field(default_factory=dict)

    def index(self, state) -> int:
        return self.labels.index(state) if isinstance(state, str) else int(state)

    def population(self, state) -> np.ndarray:
        return self.populations[self.index(state)]

    def total(self) -> np.ndarray:
        return self.populations.sum(axis=0) + self.escaped.sum(axis=0)

    def columns(self):
        header = ["x"] + [f"pop_{s}" for s in self.labels] + [f"escaped_{s}" for s in self.labels]
        data = np.vstack([self.x[None], self.populations, self.escaped]).T
        return header, data

    def to_csv(self, path) -> None:
        header, data = self.columns()
        write_csv(path, header, data)

    def to_json(self, path) -> None:
        header, data = self.columns()
        doc = {"params": self.params, "columns": header, "data": data.tolist()}
        Path(path).write_text(json.dumps(doc, indent=1))


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def pulse_params(p: PulsePair) -> dict:
    d = {k: float(v) for k, v in asdict(p).items()}
    d.update(T=float(p.T), R=float(p.R))
    return d


def scheme_params(scheme: LevelScheme) -> dict:
    return {
        "labels": list(scheme.labels),
        "couplings": [[c.lower, c.upper, c.field] for c in scheme.couplings],
        "decays": [[d.upper, d.lower, float(d.rate)] for d in scheme.decays],
        "energies": [float(e) for e in scheme.energies],
    }


def scan(scheme: LevelScheme, p: PulsePair, xs, rtol: float = 1e-8, threads: int = 1,
         t_window: Optional[tuple] = None):
    """Evolve |initial> at every x; returns populations and escaped arrays.

    The grid is split into ``threads`` contiguous chunks, each integrated
    as one batch, so results depend on the thread count only at the
    tolerance level.
    """
    xs = np.asarray(xs, dtype=float)
    t0, t1 = t_window if t_window is not None else p.window()
    rho0 = projector(scheme.n_states, scheme.initial)
    chunks = np.array_split(np.arange(xs.size), max(1, int(threads)))
    chunks = [c for c in chunks if c.size]

    def run(idx):
        try:
            rho, esc, _ = evolve_batch(scheme, p, xs[idx], rho0, t0, t1, rtol=rtol)
        except PhysicsError as exc:
            raise type(exc)(f"{exc} (x in [{xs[idx[0]]:.6e}, {xs[idx[-1]]:.6e}])") from exc
        pops = np.einsum("bii->ib", rho).real
        return pops, esc.T

    if len(chunks) == 1:
        results = [run(chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            results = list(pool.map(run, chunks))
    pops = np.concatenate([r[0] for r in results], axis=1)
    esc = np.concatenate([r[1] for r in results], axis=1)
    return pops, esc


def _profile(scheme, p, grid, rtol, threads, mode):
    xs = grid.positions(p.k_sw)
    pops, esc = scan(scheme, p, xs, rtol=rtol, threads=threads)
    params = {
        "mode": mode,
        "pulses": pulse_params(p),
        "scheme": scheme_params(scheme),
        "grid": asdict(grid),
        "rtol": rtol,
        "threads": threads,
    }
    return LocalizationProfile(xs, pops, esc, tuple(scheme.labels), p.k_sw, params)


def slap_profile(scheme: LevelScheme, p: PulsePair, grid: XGrid = XGrid(),
                 rtol: float = 1e-8, threads: int = 1) -> LocalizationProfile:
    """Final populations across x after the counterintuitive TW-then-SW sequence."""
    if p.T <= 0:
        raise DomainError("SLAP needs t_sw > t_tw")
    return _profile(scheme, p, grid, rtol, threads, "slap")


def cpt_profile(scheme: LevelScheme, p: PulsePair, grid: XGrid = XGrid(),
                rtol: float = 1e-8, threads: int = 1) -> LocalizationProfile:
    """Final populations across x for coincident, equal-width pulses."""
    if p.t_sw != p.t_tw or p.sigma_sw != p.sigma_tw:
        raise DomainError("CPT needs t_sw == t_tw and sigma_sw == sigma_tw")
    rates = [d.rate for d in scheme.decays if d.rate > 0]
    if rates and min(rates) * p.sigma_tw < 5:
        warnings.warn("gamma*sigma < 5: CPT steady state may not be reached", RuntimeWarning)
    return _profile(scheme, p, grid, rtol, threads, "cpt")


def fwhm_at(x: np.ndarray, y: np.ndarray, x_node: float, node_spacing: float) -> float:
    """FWHM of the peak of ``y`` at ``x_node`` above its local baseline.

    The baseline is the minimum over the two node spacings adjacent to the
    node; crossings of the half-maximum are linearly interpolated and must
    fall within half a node spacing of the node.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    near = np.abs(x - x_node) <= 0.25 * node_spacing * (1 + 1e-9)
    if not near.any():
        raise NoPeakError(f"grid does not contain the node at x={x_node:.6e}")
    region = np.abs(x - x_node) <= node_spacing * (1 + 1e-9)
    i_peak = int(np.flatnonzero(near)[np.argmax(y[near])])
    peak = y[i_peak]
    base = y[region].min()
    if peak - base < MIN_CONTRAST * max(abs(peak), 1e-300):
        raise NoPeakError(f"no distinguishable peak at x={x_node:.6e}")
    half = base + 0.5 * (peak - base)
    # a structure belongs to its node: both crossings lie within half a spacing
    cell = np.abs(x - x_node) <= 0.5 * node_spacing * (1 + 1e-9)
    lo, hi = np.flatnonzero(cell)[[0, -1]]

    def crossing(step):
        i = i_peak
        while lo <= i + step <= hi:
            j = i + step
            if y[j] < half:
                return x[i] + (half - y[i]) * (x[j] - x[i]) / (y[j] - y[i])
            i = j
        raise NoPeakError(f"half maximum not reached around x={x_node:.6e}")

    return float(crossing(1) - crossing(-1))


def extract_fwhm(profile: LocalizationProfile, state=0, node_index: int = 0) -> float:
    spacing = np.pi / profile.k_sw
    return fwhm_at(profile.x, profile.population(state), node_index * spacing, spacing)


@dataclass
class SweepRow:
    omega_tw0: float
    fwhm_slap: Optional[float]
    fwhm_cpt: Optional[float]
    superlocalized: Optional[bool]
    resolution_limited: bool = False
    error: Optional[str] = None


SWEEP_HEADER = ["omega_tw0", "fwhm_slap", "fwhm_cpt", "superlocalized", "resolution_limited", "error"]


def sweep_tw_amplitude(scheme: LevelScheme, p: PulsePair, grid: XGrid,
                       omega_tw0_values: Sequence[float], state=0, rtol: float = 1e-8,
                       threads: int = 1) -> list[SweepRow]:
    """SLAP and CPT widths versus TW amplitude at the fixed R of ``p``.

    The CPT runs use T = 0 and sigma_sw = sigma_tw.  Errors in one row are
    recorded and the sweep continues.
    """
    dx = np.pi / p.k_sw / (grid.points_per_period - 1)
    rows = []
    for w in omega_tw0_values:
        if w <= 0:
            raise DomainError("sweep amplitudes must be positive")
        pw = p.with_tw_amplitude(w)
        widths, errors = [], []
        for make, pulses in ((slap_profile, pw), (cpt_profile, pw.as_cpt())):
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", RuntimeWarning)
                    prof = make(scheme, pulses, grid, rtol=rtol, threads=threads)
                widths.append(extract_fwhm(prof, state, grid.node))
            except PhysicsError as exc:
                widths.append(None)
                errors.append(f"{make.__name__}: {exc}")
        s, c = widths
        sl = None if s is None or c is None else bool(s < c)
        limited = any(v is not None and v < RESOLUTION_POINTS * dx for v in widths)
        rows.append(SweepRow(float(w), s, c, sl, limited, "; ".join(errors) or None))
        log.info("sweep omega_tw0=%g slap=%s cpt=%s", w, s, c)
    return rows


def crossing_amplitude(rows: Sequence[SweepRow], reference: Optional[float] = None) -> float:
    """Amplitude where the SLAP width first drops below the CPT width.

    With ``reference`` the SLAP width is compared against that fixed value
    instead of the row's numeric CPT width.  The crossing is linearly
    interpolated between the bracketing rows.
    """
    pts = [(r.omega_tw0, r.fwhm_slap, reference if reference is not None else r.fwhm_cpt)
           for r in rows if r.fwhm_slap is not None]
    pts = [q for q in pts if q[2] is not None]
    pts.sort()
    for (w0, s0, c0), (w1, s1, c1) in zip(pts, pts[1:]):
        d0, d1 = s0 - c0, s1 - c1
        if d0 >= 0 > d1:
            return w0 + d0 * (w1 - w0) / (d0 - d1)
    raise NoPeakError("no SLAP/CPT width crossing inside the sweep")


def write_sweep_csv(path, rows: Sequence[SweepRow]) -> None:
    write_csv(path, SWEEP_HEADER, [[getattr(r, k) for k in SWEEP_HEADER] for r in rows])


def cpt_dark_population(p: PulsePair, x) -> np.ndarray:
    """Dark-state population of |a>, 1 / (1 + R sin^2 kx)."""
    return 1.0 / (1.0 + p.R * np.sin(p.k_sw * np.asarray(x)) ** 2)


def predicted_cpt_width(p: PulsePair) -> float:
    return fwhm_cpt(p.k_sw, p.R)
