"""Lindblad master equation for driven N-level schemes at fixed position.

The Hamiltonian is written in the rotating frame with the rotating-wave
approximation.  Each coherent transition ``(lower, upper, field)`` enters
as ``hbar * Omega_field / 2`` and fixes the frame energy of its upper
state to ``E_lower + Delta_field``, which for the Lambda scheme reproduces
``Delta_sw`` on |c> and ``Delta_sw - Delta_tw`` on |b>.

Decays into :data:`EXTERNAL` remove population from the modelled space;
the removed amount is integrated separately per state of origin.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .analytic import PulsePair, rabi_sw, rabi_tw
from .errors import NonUniqueSteadyStateError, PhysicsError
from .integrate import dopri5, rk4_fixed

EXTERNAL = -1
FIELDS = ("TW", "SW")

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-8
POSITIVITY_TOL = 1e-8


@dataclass(frozen=True)
class Coupling:
    lower: int
    upper: int
    field: str


@dataclass(frozen=True)
class Decay:
    upper: int
    lower: int  # EXTERNAL for loss out of the modelled space
    rate: float


@dataclass(frozen=True)
class LevelScheme:
    """Internal states, their laser couplings and their radiative decays.

    Detunings live on the :class:`~slap.analytic.PulsePair`; energies are
    the per-state internal energies (eV) used for deposition profiles.
    """

    n_states: int
    couplings: tuple
    decays: tuple
    energies: tuple = ()
    labels: tuple = ()
    initial: int = 0

    def __post_init__(self):
        n = self.n_states
        object.__setattr__(self, "couplings", tuple(Coupling(*c) if not isinstance(c, Coupling) else c
                                                    for c in self.couplings))
        object.__setattr__(self, "decays", tuple(Decay(*d) if not isinstance(d, Decay) else d
                                                 for d in self.decays))
        if not self.energies:
            object.__setattr__(self, "energies", (0.0,) * n)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"s{i}" for i in range(n)))
        if len(self.energies) != n or len(self.labels) != n:
            raise ValueError("energies and labels need one entry per state")
        if not 0 <= self.initial < n:
            raise ValueError("initial state out of range")
        seen = set()
        for c in self.couplings:
            if c.field not in FIELDS:
                raise ValueError(f"unknown field {c.field!r}")
            if not (0 <= c.lower < n and 0 <= c.upper < n) or c.lower == c.upper:
                raise ValueError(f"bad coupling indices {c}")
            key = frozenset((c.lower, c.upper))
            if key in seen:
                raise ValueError(f"duplicate coupling {c}")
            seen.add(key)
        for d in self.decays:
            if d.rate < 0:
                raise ValueError("decay rates must be non-negative")
            if not 0 <= d.upper < n or not (d.lower == EXTERNAL or 0 <= d.lower < n) \
                    or d.lower == d.upper:
                raise ValueError(f"bad decay indices {d}")
        self.frame_offsets({"TW": 0.0, "SW": 0.0})  # validates connectivity

    @property
    def is_closed(self) -> bool:
        return all(d.lower != EXTERNAL or d.rate == 0 for d in self.decays)

    def frame_offsets(self, detunings: dict) -> np.ndarray:
        """Rotating-frame diagonal (rad/s), state 0 as the zero reference."""
        offsets = np.full(self.n_states, np.nan)
        offsets[0] = 0.0
        queue = deque([0])
        while queue:
            i = queue.popleft()
            for c in self.couplings:
                for a, b, sign in ((c.lower, c.upper, 1.0), (c.upper, c.lower, -1.0)):
                    if a != i:
                        continue
                    value = offsets[i] + sign * detunings[c.field]
                    if np.isnan(offsets[b]):
                        offsets[b] = value
                        queue.append(b)
                    elif not np.isclose(offsets[b], value, rtol=1e-12, atol=1e-12):
                        raise ValueError("coupling loop with inconsistent detunings")
        # states not reached by any coupling keep a zero offset
        return np.nan_to_num(offsets)

    def decay_rate_from(self, state: int) -> float:
        return sum(d.rate for d in self.decays if d.upper == state)


def lambda_scheme(gamma_a: float, gamma_b: Optional[float] = None,
                  loss_b: float = 0.0) -> LevelScheme:
    """Three-level Lambda scheme |a>=0, |b>=1, |c>=2.

    The SW couples a-c, the TW couples b-c; |c> decays to |a> at gamma_a
    and to |b> at gamma_b (equal by default).  ``loss_b`` optionally
    removes |b> population from the modelled space.
    """
    if gamma_b is None:
        gamma_b = gamma_a
    decays = [Decay(2, 0, gamma_a), Decay(2, 1, gamma_b)]
    if loss_b:
        decays.append(Decay(1, EXTERNAL, loss_b))
    return LevelScheme(
        n_states=3,
        couplings=(Coupling(0, 2, "SW"), Coupling(1, 2, "TW")),
        decays=tuple(decays),
        labels=("a", "b", "c"),
    )


class _Generator:
    """Precomputed pieces of the Lindblad generator for one scheme/pulse pair."""

    def __init__(self, scheme: LevelScheme, p: PulsePair, x):
        n = self.n = scheme.n_states
        self.p = p
        self.x = np.atleast_1d(np.asarray(x, dtype=float))
        self.offsets = scheme.frame_offsets({"TW": p.delta_tw, "SW": p.delta_sw})
        self.tw_pairs = [(c.lower, c.upper) for c in scheme.couplings if c.field == "TW"]
        self.sw_pairs = [(c.lower, c.upper) for c in scheme.couplings if c.field == "SW"]
        # spatial factor of the SW, evaluated once (time envelope separately)
        unit = PulsePair(1.0, 1.0, p.sigma_tw, p.sigma_sw, 0.0, 0.0, k_sw=p.k_sw)
        self.sw_shape = rabi_sw(unit, self.x, 0.0)
        self.jumps = [(d.upper, d.lower, d.rate) for d in scheme.decays
                      if d.lower != EXTERNAL and d.rate > 0]
        # -1/2 {L^dag L, rho} summed over all channels is diagonal in the state basis
        gam = np.zeros(n)
        self.ext = np.zeros(n)
        for d in scheme.decays:
            gam[d.upper] += d.rate
            if d.lower == EXTERNAL:
                self.ext[d.upper] += d.rate
        self.half_gamma_sum = 0.5 * (gam[:, None] + gam[None, :])

    def hamiltonian(self, t: float) -> np.ndarray:
        """H / hbar at time t, shape (batch, n, n)."""
        b = self.x.size
        H = np.zeros((b, self.n, self.n), dtype=complex)
        idx = np.arange(self.n)
        H[:, idx, idx] = self.offsets
        w_tw = 0.5 * float(rabi_tw(self.p, t))
        env_sw = self.p.omega_sw0 * np.exp(-((t - self.p.t_sw) ** 2) / self.p.sigma_sw**2)
        w_sw = 0.5 * env_sw * self.sw_shape
        for i, j in self.tw_pairs:
            H[:, i, j] = H[:, j, i] = w_tw
        for i, j in self.sw_pairs:
            H[:, i, j] = H[:, j, i] = w_sw
        return H

    def apply(self, t: float, rho: np.ndarray) -> np.ndarray:
        H = self.hamiltonian(t)
        drho = -1j * (H @ rho - rho @ H)
        drho -= self.half_gamma_sum * rho
        for u, l, g in self.jumps:
            drho[:, l, l] += g * rho[:, u, u]
        return drho

    def escape_rate(self, rho: np.ndarray) -> np.ndarray:
        idx = np.arange(self.n)
        return self.ext * rho[:, idx, idx].real


def liouvillian_apply(scheme: LevelScheme, p: PulsePair, x: float, t: float,
                      rho: np.ndarray) -> np.ndarray:
    """Time derivative of ``rho`` at position x and time t."""
    gen = _Generator(scheme, p, [x])
    return gen.apply(t, np.asarray(rho, dtype=complex)[None])[0]


def _pack(rho, esc):
    b, n, _ = rho.shape
    return np.concatenate([rho.reshape(b, n * n), esc.astype(complex)], axis=1)


def _unpack(y, n):
    b = y.shape[0]
    return y[:, : n * n].reshape(b, n, n), y[:, n * n:]


def _rhs(gen: _Generator):
    n = gen.n

    def fun(t, y):
        rho, _ = _unpack(y, n)
        return _pack(gen.apply(t, rho), gen.escape_rate(rho))

    return fun


def _hermitize(n):
    def post(y):
        rho, esc = _unpack(y, n)
        rho = 0.5 * (rho + rho.conj().transpose(0, 2, 1))
        return _pack(rho, esc.real)

    return post


def _initial_batch(rho0, batch):
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.ndim == 2:
        rho0 = np.broadcast_to(rho0, (batch,) + rho0.shape)
    return np.array(rho0)


def evolve_batch(scheme: LevelScheme, p: PulsePair, xs, rho0, t0: float, t1: float,
                 rtol: float = 1e-8, atol: float = 1e-10, max_step: Optional[float] = None):
    """Evolve one initial state at many positions with a shared step size.

    Returns ``(rho, escaped, stats)`` with rho of shape (len(xs), n, n)
    and escaped of shape (len(xs), n): the population lost to EXTERNAL,
    by state of origin.
    """
    gen = _Generator(scheme, p, xs)
    n = scheme.n_states
    rho = _initial_batch(rho0, gen.x.size)
    y0 = _pack(rho, np.zeros((gen.x.size, n)))
    if max_step is None:
        max_step = 0.25 * min(p.sigma_tw, p.sigma_sw)
    y1, stats = dopri5(_rhs(gen), t0, t1, y0, rtol=rtol, atol=atol, max_step=max_step,
                       post_step=_hermitize(n))
    rho1, esc = _unpack(y1, n)
    return rho1, esc.real.copy(), stats


def evolve(scheme: LevelScheme, p: PulsePair, x: float, rho0, t0: float, t1: float,
           tol: float = 1e-8) -> np.ndarray:
    """Density matrix at t1 for an atom held at transverse position x."""
    rho, _, _ = evolve_batch(scheme, p, [x], rho0, t0, t1, rtol=tol)
    return rho[0]


def evolve_reference(scheme: LevelScheme, p: PulsePair, xs, rho0, t0: float, t1: float,
                     nsteps: int):
    """Fixed-step RK4 counterpart of :func:`evolve_batch` (no symmetrization)."""
    gen = _Generator(scheme, p, xs)
    n = scheme.n_states
    y0 = _pack(_initial_batch(rho0, gen.x.size), np.zeros((gen.x.size, n)))
    y1 = rk4_fixed(_rhs(gen), t0, t1, y0, nsteps)
    rho1, esc = _unpack(y1, n)
    return rho1, esc.real.copy()


def liouvillian_matrix(scheme: LevelScheme, omega_tw: float, omega_sw: float,
                       delta_tw: float = 0.0, delta_sw: float = 0.0) -> np.ndarray:
    """Superoperator for constant couplings acting on row-major vec(rho)."""
    n = scheme.n_states
    H = np.diag(scheme.frame_offsets({"TW": delta_tw, "SW": delta_sw})).astype(complex)
    for c in scheme.couplings:
        w = 0.5 * (omega_tw if c.field == "TW" else omega_sw)
        H[c.lower, c.upper] = H[c.upper, c.lower] = w
    eye = np.eye(n)
    # row-major vec: vec(A X B) = kron(A, B^T) vec(X)
    L = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
    for d in scheme.decays:
        if d.rate == 0:
            continue
        P = np.zeros((n, n))
        P[d.upper, d.upper] = 1.0
        L -= 0.5 * d.rate * (np.kron(P, eye) + np.kron(eye, P))
        if d.lower != EXTERNAL:
            J = np.zeros((n, n))
            J[d.lower, d.upper] = np.sqrt(d.rate)
            L += np.kron(J, J.conj())
    return L


def steady_state(scheme: LevelScheme, omega_tw: float, omega_sw: float,
                 delta_tw: float = 0.0, delta_sw: float = 0.0,
                 null_tol: float = 1e-10) -> np.ndarray:
    """Unique steady state of a closed scheme under constant couplings."""
    if not scheme.is_closed:
        raise PhysicsError("steady_state needs a trace-preserving scheme")
    n = scheme.n_states
    L = liouvillian_matrix(scheme, omega_tw, omega_sw, delta_tw, delta_sw)
    _, s, vh = scipy.linalg.svd(L)
    scale = max(s[0], 1.0)
    null_dim = int(np.sum(s < null_tol * scale))
    if null_dim != 1:
        raise NonUniqueSteadyStateError(f"Liouvillian null space has dimension {null_dim}")
    rho = vh[-1].conj().reshape(n, n)
    rho = rho / np.trace(rho)
    return 0.5 * (rho + rho.conj().T)


def check_density_matrix(rho, closed: bool = True) -> None:
    """Raise :class:`PhysicsError` if rho violates the density-matrix invariants."""
    rho = np.asarray(rho)
    norm = max(np.max(np.abs(rho)), 1e-300)
    if np.max(np.abs(rho - rho.conj().swapaxes(-1, -2))) > HERMITICITY_TOL * norm:
        raise PhysicsError("density matrix is not Hermitian")
    tr = np.trace(rho, axis1=-2, axis2=-1).real
    if np.any(tr > 1 + TRACE_TOL) or (closed and np.any(np.abs(tr - 1) > TRACE_TOL)):
        raise PhysicsError(f"trace out of bounds: {tr}")
    lam = np.linalg.eigvalsh(0.5 * (rho + rho.conj().swapaxes(-1, -2)))
    if np.min(lam) < -POSITIVITY_TOL:
        raise PhysicsError(f"negative eigenvalue {np.min(lam):.3e}")


def projector(n: int, i: int) -> np.ndarray:
    rho = np.zeros((n, n), dtype=complex)
    rho[i, i] = 1.0
    return rho
