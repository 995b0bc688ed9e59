"""Time integrators for batched complex ODE systems.

``dopri5`` is the Dormand-Prince 5(4) embedded pair with FSAL and
proportional step control.  The state is an array of shape ``(batch, m)``;
one step size is shared by the whole batch and the error norm is the
worst row, so every member meets the tolerance.  ``rk4_fixed`` is a plain
classical Runge-Kutta stepper used as an independent reference.
"""
from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from .errors import StiffnessError

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array(_A[6] + [0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0


def _error_norm(err, y0, y1, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.max(np.sqrt(np.mean(np.abs(err / scale) ** 2, axis=-1))))


def dopri5(
    fun: Callable[[float, np.ndarray], np.ndarray],
    t0: float,
    t1: float,
    y0: np.ndarray,
    rtol: float = 1e-8,
    atol: float = 1e-10,
    max_step: float = np.inf,
    first_step: Optional[float] = None,
    post_step: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    min_step: Optional[float] = None,
):
    """Integrate ``y' = fun(t, y)`` from t0 to t1.

    Parameters
    ----------
    post_step : callable, optional
        Applied to every accepted state (e.g. re-symmetrization).  The
        derivative at the start of the next step is re-evaluated when it is
        given, so FSAL is only used without it.
    min_step : float, optional
        Steps below this raise :class:`StiffnessError`.  Defaults to
        ``1e-14 * |t1 - t0|``.

    Returns
    -------
    y1 : ndarray
        State at t1.
    stats : dict
        ``nsteps``, ``nrejected`` and ``nfev``.
    """
    if not t1 > t0:
        raise ValueError("t1 must be greater than t0")
    y = np.array(y0, dtype=complex, copy=True)
    if y.ndim == 1:
        y = y[None, :]
        squeeze = True
    else:
        squeeze = False
    span = t1 - t0
    if min_step is None:
        min_step = 1e-14 * span
    t = t0
    f = fun(t, y)
    nfev = 1
    if first_step is None:
        scale = atol + rtol * np.abs(y)
        d0 = np.max(np.abs(y) / scale)
        d1 = np.max(np.abs(f) / scale)
        h = 1e-6 * span if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        h = min(h, max_step, span)
    else:
        h = min(first_step, max_step, span)
    nsteps = nrejected = 0
    k = np.empty((7,) + y.shape, dtype=complex)
    while t < t1:
        h = min(h, t1 - t)
        if h < min_step and t1 - t > min_step:
            raise StiffnessError(t, h, min(1e-3, rtol * 100))
        k[0] = f
        for s in range(1, 7):
            ys = y + h * np.tensordot(_A[s], k[:s], axes=(0, 0))
            k[s] = fun(t + _C[s] * h, ys)
        nfev += 6
        y_new = ys  # stage 7 argument is the 5th-order solution
        err = h * np.tensordot(_E, k, axes=(0, 0))
        en = _error_norm(err, y, y_new, rtol, atol)
        if en <= 1.0:
            t = t + h
            if t1 - t < 1e-15 * span:
                t = t1
            y = y_new
            if post_step is not None:
                y = post_step(y)
                f = fun(t, y)
                nfev += 1
            else:
                f = k[6]
            nsteps += 1
            factor = MAX_FACTOR if en == 0 else min(MAX_FACTOR, SAFETY * en ** -0.2)
        else:
            nrejected += 1
            factor = max(MIN_FACTOR, SAFETY * en ** -0.2)
        h = min(h * factor, max_step)
    stats = {"nsteps": nsteps, "nrejected": nrejected, "nfev": nfev}
    return (y[0] if squeeze else y), stats


def rk4_fixed(fun, t0: float, t1: float, y0: np.ndarray, nsteps: int,
              post_step=None) -> np.ndarray:
    """Classical fourth-order Runge-Kutta with ``nsteps`` equal steps."""
    y = np.array(y0, dtype=complex, copy=True)
    h = (t1 - t0) / nsteps
    for i in range(nsteps):
        t = t0 + i * h
        k1 = fun(t, y)
        k2 = fun(t + h / 2, y + h / 2 * k1)
        k3 = fun(t + h / 2, y + h / 2 * k2)
        k4 = fun(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if post_step is not None:
            y = post_step(y)
    return y
