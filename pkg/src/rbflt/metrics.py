"""Error norms and eventual-periodicity diagnostics."""
from __future__ import annotations

import math

import numpy as np

_ALIGN_TOL = 1e-9


def error_norms(u_num, u_exact) -> tuple[float, float, float]:
    """(L_inf, L_2, RMS) of the pointwise error, with RMS = L_2 / sqrt(N)."""
    u_num = np.asarray(u_num, dtype=float).ravel()
    u_exact = np.asarray(u_exact, dtype=float).ravel()
    if u_num.shape != u_exact.shape:
        raise ValueError(f"length mismatch: {u_num.size} vs {u_exact.size}")
    if u_num.size == 0:
        raise ValueError("need at least one value")
    e = np.abs(u_num - u_exact)
    l2 = float(math.sqrt(np.sum(e * e)))
    return float(np.max(e)), l2, l2 / math.sqrt(e.size)


def _grid_step(times) -> float:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise ValueError("need a one-dimensional time grid with at least two samples")
    steps = np.diff(times)
    dt = float(np.mean(steps))
    if dt <= 0 or np.max(np.abs(steps - dt)) > _ALIGN_TOL * max(1.0, dt) + 1e-12:
        raise ValueError("time grid is not uniform")
    return dt


def periodicity_report(trace, times, period: float, window) -> tuple[float, float]:
    """(defect, amplitude) of a probe trace over ``window``.

    amplitude is max |u| on the window; defect is the largest change
    |u(t) - u(t - period)| for t in [t_lo + period, t_hi], compared on grid
    points only.  The grid step has to divide the period.
    """
    trace = np.asarray(trace, dtype=float)
    times = np.asarray(times, dtype=float)
    if trace.shape != times.shape:
        raise ValueError("trace and times differ in length")
    dt = _grid_step(times)
    lag = period / dt
    shift = int(round(lag))
    if shift < 1 or abs(lag - shift) > 1e-6:
        raise ValueError(f"grid step {dt!r} does not divide the period {period!r}")
    t_lo, t_hi = map(float, window)
    if t_hi - t_lo < 2 * period - 1e-12:
        raise ValueError("window must span at least two periods")
    eps = 1e-9 * dt
    inside = (times >= t_lo - eps) & (times <= t_hi + eps)
    if not inside.any():
        raise ValueError("window holds no samples")
    amplitude = float(np.max(np.abs(trace[inside])))
    idx = np.nonzero((times >= t_lo + period - eps) & (times <= t_hi + eps))[0]
    idx = idx[idx >= shift]
    if idx.size == 0:
        raise ValueError("window does not reach one period past its start")
    if times[idx[0] - shift] < t_lo - eps:
        raise ValueError("window starts before the first sample")
    defect = float(np.max(np.abs(trace[idx] - trace[idx - shift])))
    return defect, amplitude
