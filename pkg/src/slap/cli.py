"""Command-line scenario runner.

    slap run <config> [-o DIR] [--threads N]
    slap analyze <config> [--json]
    slap list-scenarios

Exit status is 0 on success, 2 for configuration errors, 3 for physics
errors (domain, validity, stiffness, missing peaks) and 4 for I/O errors.
The default thread count comes from ``SLAP_THREADS``.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import struct
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import (
    DEFAULT_A, DEFAULT_RN_MARGIN, BeamGeometry, PulsePair, fwhm_cpt, fwhm_slap,
    raman_nath_resolution_ok, stirap_time, super_localization_threshold,
)
from .config import ScenarioConfig, load_config
from .errors import ConfigError, DomainError, NoPeakError, PhysicsError, ValidityError
from .master_eq import lambda_scheme
from .profiles import (
    XGrid, cpt_profile, crossing_amplitude, extract_fwhm, slap_profile, sweep_tw_amplitude,
    write_csv, write_sweep_csv,
)

log = logging.getLogger("slap")

EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS, EXIT_IO = 0, 2, 3, 4
THREADS_ENV = "SLAP_THREADS"
SNAPSHOT_MAGIC = b"SLAPSNP1"


# --- config -> objects -------------------------------------------------------

def _k_sw(cfg: ScenarioConfig, default=None) -> float:
    given = [key for key in ("k_sw", "wavelength", "period") if cfg.has("pulses", key)]
    if len(given) > 1:
        raise ConfigError(f"{cfg.source}: give only one of [pulses] k_sw, wavelength, period")
    if cfg.has("pulses", "k_sw"):
        return cfg.get("pulses", "k_sw")
    if cfg.has("pulses", "wavelength"):
        return 2 * math.pi / cfg.get("pulses", "wavelength")
    if cfg.has("pulses", "period"):
        # period of the SW intensity, i.e. the node spacing
        return math.pi / cfg.get("pulses", "period")
    if default is None:
        raise ConfigError(f"{cfg.source}: [pulses] needs k_sw, wavelength or period")
    return default


def geometry_from(cfg: ScenarioConfig):
    if not cfg.has("geometry"):
        return None
    try:
        return BeamGeometry(cfg.require("geometry", "v_z"), cfg.require("geometry", "d"),
                            cfg.get("geometry", "dv_x", 0.0))
    except ValueError as exc:
        raise ConfigError(f"{cfg.source}: [geometry] {exc}") from None


def pulses_from(cfg: ScenarioConfig, default_k=None) -> PulsePair:
    """Build a PulsePair; without t_sw the delay comes from [geometry] as d / v_z."""
    get = lambda key, default=None: cfg.get("pulses", key, default)  # noqa: E731
    w_tw = cfg.require("pulses", "omega_tw0")
    if get("omega_sw0") is not None and get("R") is not None:
        raise ConfigError(f"{cfg.source}: give [pulses] omega_sw0 or R, not both")
    if get("omega_sw0") is not None:
        w_sw = get("omega_sw0")
    else:
        w_sw = w_tw * math.sqrt(cfg.require("pulses", "R"))
    sigma = get("sigma")
    s_tw, s_sw = get("sigma_tw", sigma), get("sigma_sw", sigma)
    if s_tw is None or s_sw is None:
        raise ConfigError(f"{cfg.source}: [pulses] needs sigma or sigma_tw and sigma_sw")
    t_tw = get("t_tw", 0.0)
    t_sw = get("t_sw")
    geom = geometry_from(cfg)
    if t_sw is None:
        if geom is None:
            raise ConfigError(f"{cfg.source}: [pulses] t_sw or a [geometry] section is required")
        t_sw = t_tw + stirap_time(geom)
    try:
        return PulsePair(w_tw, w_sw, s_tw, s_sw, t_tw, t_sw, get("delta_tw", 0.0),
                         get("delta_sw", 0.0), k_sw=_k_sw(cfg, default_k))
    except ValueError as exc:
        raise ConfigError(f"{cfg.source}: [pulses] {exc}") from None


def scheme_from(cfg: ScenarioConfig):
    gamma = cfg.get("scheme", "gamma")
    ga = cfg.get("scheme", "gamma_a", gamma)
    gb = cfg.get("scheme", "gamma_b", gamma)
    if ga is None:
        raise ConfigError(f"{cfg.source}: [scheme] needs gamma or gamma_a")
    return lambda_scheme(ga, gb, cfg.get("scheme", "loss_b", 0.0))


def grid_from(cfg: ScenarioConfig) -> XGrid:
    g = XGrid(cfg.get("grid", "node", 0), cfg.get("grid", "periods", 1.0),
              cfg.get("grid", "points_per_period", 2001))
    if g.points_per_period < 3 or g.periods <= 0:
        raise ConfigError(f"{cfg.source}: [grid] needs points_per_period >= 3 and periods > 0")
    return g


def _rtol(cfg: ScenarioConfig) -> float:
    return cfg.get("solver", "rtol", 1e-8)


# --- analytic summary --------------------------------------------------------

def analytic_summary(cfg: ScenarioConfig) -> dict:
    """Closed-form predictions for the configured pulses; no simulation."""
    A = cfg.get("analysis", "A", DEFAULT_A)
    if cfg.name == "nestar" and not cfg.has("pulses"):
        from .nestar import default_pulses
        p = default_pulses(_nestar_config(cfg), geometry_from(cfg) or BeamGeometry(500.0, 100e-6))
    else:
        p = pulses_from(cfg, default_k=_default_k(cfg))
    geom = geometry_from(cfg)
    T = stirap_time(geom) if geom is not None else p.T
    threshold = super_localization_threshold(A)
    out = {
        "A": A,
        "T": T,
        "T_omega_tw0": T * p.omega_tw0,
        "threshold": threshold,
        "R": p.R,
        "k_sw": p.k_sw,
        "fwhm_cpt": fwhm_cpt(p.k_sw, p.R),
        "mode": "cpt" if T == 0 else "slap",
        "notes": [],
    }
    out["superlocalized"] = None if T == 0 else bool(T * p.omega_tw0 > threshold)
    if T == 0:
        out["fwhm_slap"] = None
        out["notes"].append("zero STIRAP delay: CPT mode, SLAP prediction suppressed")
    else:
        try:
            out["fwhm_slap"] = fwhm_slap(p.k_sw, p.R, A, T, p.omega_tw0)
        except ValidityError as exc:
            out["fwhm_slap"] = None
            out["notes"].append(f"SLAP width formula not applicable: {exc}")
    dx_slap = cfg.get("analysis", "dx_slap", out["fwhm_slap"] or out["fwhm_cpt"])
    if geom is not None and T > 0:
        margin = cfg.get("analysis", "rn_margin", DEFAULT_RN_MARGIN)
        out["raman_nath_ok"] = bool(raman_nath_resolution_ok(geom, T, dx_slap, margin))
        out["raman_nath_drift"] = T * geom.dv_x
    else:
        out["raman_nath_ok"] = None
    return out


def format_summary(s: dict) -> str:
    def f(v):
        return "n/a" if v is None else (f"{v:.6g}" if isinstance(v, float) else str(v))

    rows = [
        ("mode", s["mode"]), ("T", f(s["T"])), ("T*Omega_TW0", f(s["T_omega_tw0"])),
        ("A/sqrt(5)", f(s["threshold"])), ("super-localization", f(s["superlocalized"])),
        ("R", f(s["R"])), ("FWHM_cpt", f(s["fwhm_cpt"])), ("FWHM_slap", f(s["fwhm_slap"])),
        ("Raman-Nath ok", f(s["raman_nath_ok"])),
    ]
    lines = [f"{k:<20} {v}" for k, v in rows]
    lines += [f"note: {n}" for n in s["notes"]]
    return "\n".join(lines)


# --- scenarios ---------------------------------------------------------------

def _default_k(cfg):
    # natural-unit configs may omit the wavelength: lengths in units of lambda
    return 2 * math.pi if cfg.name in ("fig2-sweep", "cpt-vs-slap") else None


def _width(prof, state=0, node=0):
    try:
        return extract_fwhm(prof, state, node)
    except NoPeakError:
        return None


def run_cpt_vs_slap(cfg, out: Path, threads: int) -> dict:
    scheme, p, grid, rtol = scheme_from(cfg), pulses_from(cfg, 2 * math.pi), grid_from(cfg), _rtol(cfg)
    files, ws = [], None
    if p.T > 0:
        slap = slap_profile(scheme, p, grid, rtol=rtol, threads=threads)
        slap.to_csv(out / "profile_slap.csv")
        files.append("profile_slap.csv")
        ws = _width(slap, 0, grid.node)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RuntimeWarning)
        cpt = cpt_profile(scheme, p.as_cpt(), grid, rtol=rtol, threads=threads)
    cpt.to_csv(out / "profile_cpt.csv")
    files.append("profile_cpt.csv")
    wc = _width(cpt, 0, grid.node)
    return {
        "mode": "slap" if p.T > 0 else "cpt",
        "fwhm_slap": ws, "fwhm_cpt": wc, "fwhm_cpt_analytic": fwhm_cpt(p.k_sw, p.R),
        "superlocalized": None if ws is None or wc is None else ws < wc,
        "warnings": [str(w.message) for w in caught],
        "files": files,
    }


def run_sweep(cfg, out: Path, threads: int) -> dict:
    if pulses_from(cfg, 2 * math.pi).T <= 0:
        raise DomainError("the SLAP sweep needs t_sw > t_tw")
    res = run_cpt_vs_slap(cfg, out, threads)
    values = cfg.require("sweep", "omega_tw0_values")
    scheme, p, grid = scheme_from(cfg), pulses_from(cfg, 2 * math.pi), grid_from(cfg)
    rows = sweep_tw_amplitude(scheme, p, grid, values, rtol=_rtol(cfg), threads=threads)
    write_sweep_csv(out / "sweep.csv", rows)
    res["files"].append("sweep.csv")
    res["sweep"] = [r.__dict__ for r in rows]
    for key, ref in (("crossing_numeric", None), ("crossing_vs_analytic_cpt", fwhm_cpt(p.k_sw, p.R))):
        try:
            res[key] = crossing_amplitude(rows, reference=ref)
        except NoPeakError:
            res[key] = None
    res["threshold_amplitude"] = super_localization_threshold(cfg.get("analysis", "A", DEFAULT_A)) / p.T
    return res


def _nestar_config(cfg):
    from .nestar import NeStarConfig

    sec = cfg.sections.get("nestar", {})
    kw = {}
    for key in ("lambda_tw", "lambda_sw", "ground_decay"):
        if key in sec:
            kw[key] = sec[key]
    if "tau_3P2" in sec:
        kw["tau_p2"] = sec["tau_3P2"]
    given = {name: sec[f"A_{tag}"] for tag, name in
             (("3P0", "3s(3P0)"), ("3P1", "3s(3P1)"), ("3P2", "3s(3P2)"), ("1P1", "3s(1P1)"))
             if f"A_{tag}" in sec}
    if not sec.get("use_nist_defaults", True):
        kw["einstein_a"] = given
    elif given:
        from .nestar import load_branching
        kw["einstein_a"] = {**load_branching(), **given}
    defaults = NeStarConfig().energies
    kw["energies"] = tuple(sec.get(f"energy_{tag}", d)
                           for tag, d in zip(("3P0", "3P1", "3p", "3P2"), defaults))
    kw["depump"] = sec.get("depump", False)
    return NeStarConfig(**kw)


def run_nestar(cfg, out: Path, threads: int) -> dict:
    from .nestar import apply_depump, contrast, default_pulses, energy_profile, nestar_profile

    ncfg = _nestar_config(cfg)
    if cfg.has("pulses"):
        p = pulses_from(cfg, default_k=ncfg.k_sw)
    else:
        p = default_pulses(ncfg, geometry_from(cfg) or BeamGeometry(500.0, 100e-6))
    ncfg_raw = ncfg.__class__(**{**ncfg.__dict__, "depump": False})
    prof, energy = nestar_profile(ncfg_raw, p, grid_from(cfg), rtol=_rtol(cfg), threads=threads)
    dep = apply_depump(prof)
    energy_dep = energy_profile(dep, ncfg.energies)
    prof.to_csv(out / "populations.csv")
    energy.to_csv(out / "energy.csv")
    energy_dep.to_csv(out / "energy_depumped.csv")
    return {
        "contrast": contrast(energy),
        "contrast_depumped": contrast(energy_dep),
        "fwhm_3P0": _width(prof, "3s(3P0)", grid_from(cfg).node),
        "depump_requested": ncfg.depump,
        "einstein_a": ncfg.branching(),
        "pulses": {"T": p.T, "R": p.R, "omega_tw0": p.omega_tw0},
        "files": ["populations.csv", "energy.csv", "energy_depumped.csv"],
    }


def condensate_from(cfg):
    from .gpe import RB87_MASS, CondensateConfig

    sec = dict(cfg.sections.get("gpe", {}))
    kw = {"mass": sec.get("mass", RB87_MASS)}
    for key in ("n_atoms", "a_mean", "omega_x", "omega_t", "gamma", "n_points", "extent"):
        if key in sec:
            kw[key] = sec[key]
    if "a_ratios" in sec:
        if len(sec["a_ratios"]) != 3:
            raise ConfigError(f"{cfg.source}: [gpe] a_ratios needs three values")
        kw["a_ratios"] = tuple(sec["a_ratios"])
    try:
        return CondensateConfig(**kw)
    except ValueError as exc:
        raise ConfigError(f"{cfg.source}: [gpe] {exc}") from None


def write_snapshots(path, x, times, densities) -> None:
    """Little-endian binary snapshot file.

    Layout: 8-byte magic ``SLAPSNP1``; uint32 n_components, n_times, n_x;
    float64 x[n_x]; float64 t[n_times]; float64 density[n_times, n_components, n_x].
    """
    dens = np.ascontiguousarray(densities, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<III", dens.shape[1], dens.shape[0], dens.shape[2]))
        fh.write(np.asarray(x, dtype="<f8").tobytes())
        fh.write(np.asarray(times, dtype="<f8").tobytes())
        fh.write(dens.tobytes())


def read_snapshots(path):
    data = Path(path).read_bytes()
    if data[:8] != SNAPSHOT_MAGIC:
        raise ValueError("not a slap snapshot file")
    nc, nt, nx = struct.unpack("<III", data[8:20])
    arr = np.frombuffer(data, dtype="<f8", offset=20)
    x, t = arr[:nx], arr[nx:nx + nt]
    return x, t, arr[nx + nt:].reshape(nt, nc, nx)


def run_bec(cfg, out: Path, threads: int) -> dict:
    from .gpe import (
        CondensateState, beam_quality, evolve_gpe, patterning_pulses, fwhm_vs_time, ground_state,
        tw_switch_off_time,
    )

    ccfg = condensate_from(cfg)
    p = pulses_from(cfg) if cfg.has("pulses") else patterning_pulses()
    g = lambda key, default: cfg.get("gpe", key, default)  # noqa: E731
    dt, t_end = g("dt", 1.5e-10), g("t_end", 55e-6)
    t_start, every = g("t_start", 0.0), g("sample_every", 0.25e-6)
    wf = g("window_factor", 3.0)
    gs = ground_state(ccfg)
    state = CondensateState(gs.psi, gs.x, t_start)
    samples = np.arange(t_start, t_end + 0.5 * every, every)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RuntimeWarning)
        traj = evolve_gpe(state, ccfg, p, t_end, dt, sample_times=samples)
    times, widths, t_min = fwhm_vs_time(traj, p.k_sw)
    i_min = int(np.argmin(np.abs(times - t_min)))
    t_off = tw_switch_off_time(p, g("switch_off_fraction", 0.01))
    i_off = int(np.argmin(np.abs(times - t_off)))
    m2 = {}
    for label, i in (("min_fwhm", i_min), ("tw_off", i_off)):
        try:
            m2[label] = beam_quality(traj.states[i], "a", p.k_sw, window_factor=wf)
        except NoPeakError:
            m2[label] = (None, {})
    rows = []
    for i, t in enumerate(times):
        m = m2["min_fwhm"][0] if i == i_min else (m2["tw_off"][0] if i == i_off else None)
        w = None if np.isnan(widths[i]) else widths[i]
        rows.append([t, w, *traj.norms[i], m])
    write_csv(out / "observables.csv", ["t", "fwhm_a", "norm_a", "norm_b", "norm_c", "m2_a"], rows)
    files = ["observables.csv"]
    dens = np.array([[st.density(c) for c in "abc"] for st in traj.states])
    if cfg.get("outputs", "binary_snapshots", False):
        write_snapshots(out / "snapshots.bin", traj.states[0].x, times, dens)
        files.append("snapshots.bin")
    else:
        stride = max(1, cfg.get("outputs", "snapshot_stride", 8))
        x = traj.states[0].x[::stride]
        snap_rows = ([t, xi, *d[:, j]] for t, d in zip(times, dens[:, :, ::stride])
                     for j, xi in enumerate(x))
        write_csv(out / "snapshots.csv", ["t", "x", "n_a", "n_b", "n_c"], snap_rows)
        files.append("snapshots.csv")
    return {
        "t_min_fwhm": t_min,
        "min_fwhm": float(np.nanmin(widths)),
        "tw_switch_off_time": t_off,
        "m2_at_min_fwhm": m2["min_fwhm"][0],
        "m2_at_tw_off": m2["tw_off"][0],
        "m2_definition": {k: v for k, v in m2["min_fwhm"][1].items()
                          if k in ("window", "window_factor", "window_width", "dx", "dp")},
        "final_norms": traj.norms[-1].tolist(),
        "thomas_fermi": dict(zip(("mu", "radius"), ccfg.thomas_fermi())),
        "dt": dt,
        "warnings": sorted({str(w.message) for w in caught}),
        "files": files,
    }


SCENARIOS = {
    "fig2-sweep": (run_sweep, "SLAP and CPT widths versus TW amplitude at fixed R, "
                                   "plus both profiles at the base amplitude"),
    "cpt-vs-slap": (run_cpt_vs_slap, "SLAP and CPT localization profiles across one node spacing"),
    "nestar": (run_nestar, "Ne* lithography: populations and deposited energy, with and "
                           "without 3P2 depumping"),
    "bec-patterning": (run_bec, "two-component GP evolution of a trapped BEC through SLAP pulses"),
}


# --- entry points ------------------------------------------------------------

def _to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def run(config_path, out_dir=None, threads: int = 1) -> dict:
    cfg = load_config(config_path)
    if cfg.name not in SCENARIOS:
        raise ConfigError(f"{cfg.source}: unknown scenario {cfg.name!r}; "
                          f"choose from {', '.join(sorted(SCENARIOS))}")
    out = Path(out_dir) if out_dir is not None else Path(f"{cfg.name}-out")
    out.mkdir(parents=True, exist_ok=True)
    func = SCENARIOS[cfg.name][0]
    try:
        results = func(cfg, out, threads)
        analytic = analytic_summary(cfg) if cfg.has("pulses") or cfg.name == "nestar" else None
    except PhysicsError as exc:
        raise type(exc)(f"scenario {cfg.name}: {exc}") from exc
    (out / "config.cfg").write_text(cfg.to_text())
    summary = {
        "scenario": cfg.name,
        "version": __version__,
        "config": cfg.snapshot(),
        "config_file": "config.cfg",
        "solver": {"rtol": _rtol(cfg), "threads": threads},
        "analytic": analytic,
        "results": results,
    }
    (out / "summary.json").write_text(json.dumps(_to_jsonable(summary), indent=2, sort_keys=True) + "\n")
    return summary


def _threads(arg) -> int:
    if arg is not None:
        return arg
    env = os.environ.get(THREADS_ENV)
    if not env:
        return 1
    try:
        n = int(env)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {env!r}") from None
    if n < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {env!r}")
    return n


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="slap", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"slap {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run the scenario named in a config file")
    r.add_argument("config")
    r.add_argument("-o", "--output", help="output directory (default: <scenario>-out)")
    r.add_argument("--threads", type=int, help=f"worker threads (default: ${THREADS_ENV} or 1)")
    a = sub.add_parser("analyze", help="closed-form predictions only, no simulation")
    a.add_argument("config")
    a.add_argument("--json", action="store_true", help="print JSON instead of a table")
    sub.add_parser("list-scenarios", help="list the available scenarios")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "list-scenarios":
            for name in sorted(SCENARIOS):
                print(f"{name:<16} {SCENARIOS[name][1]}")
        elif args.command == "analyze":
            s = analytic_summary(load_config(args.config))
            print(json.dumps(_to_jsonable(s), indent=2, sort_keys=True) if args.json
                  else format_summary(s))
        else:
            threads = _threads(args.threads)
            if threads < 1:
                raise ConfigError("--threads must be at least 1")
            summary = run(args.config, args.output, threads)
            print(json.dumps(_to_jsonable(summary["results"]), indent=2, sort_keys=True))
    except ConfigError as exc:
        print(f"slap: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PhysicsError as exc:
        print(f"slap: physics error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except OSError as exc:
        print(f"slap: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
