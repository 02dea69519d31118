"""
Periods, rotation numbers and switching-time thresholds.
"""
from __future__ import annotations

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from ..errors import FlowError
from .integrate import ATOL, CENTER_EPS, RTOL
from .systems import Phase

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


def _angle_rhs(phase: Phase, n: int):
    cx, cy = phase.center
    sense = phase.sense

    def rhs(_, state):
        x, y = state[:n], state[n:2 * n]
        fx, fy = phase.field(x, y)
        dx, dy = x - cx, y - cy
        r2 = np.maximum(dx * dx + dy * dy, CENTER_EPS ** 2)
        return np.concatenate([fx, fy, sense * (dx * fy - dy * fx) / r2])

    return rhs


def _require_center(phase: Phase) -> Tuple[float, float]:
    if phase.center is None:
        raise FlowError(f"{phase.name} has no center; its orbits do not close")
    return phase.center


def reference_point(phase: Phase, level: float) -> np.ndarray:
    """Point of the level line on the reference ray from the center (angle 0 in the frame).

    Raises:
        FlowError: when ``level <= chi`` or the ray leaves the domain first
    """
    cx, cy = _require_center(phase)
    chi = phase.chi
    if not level > chi:
        raise FlowError(f"{phase.name}: level {level:g} is not above the minimum {chi:g}")
    direction = np.array([math.cos(phase.frame_angle), math.sin(phase.frame_angle)])

    def gap(rho: float) -> float:
        point = np.array([[cx, cy]]) + rho * direction
        value = phase.energy(point)[0]
        return (value - level) if np.isfinite(value) else math.inf

    scale = max(1.0, math.hypot(cx, cy))
    lo, hi = 0.0, 1e-3 * scale
    while gap(hi) < 0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e8 * scale:
            raise FlowError(f"{phase.name}: level {level:g} not reached along the reference ray")
    if not math.isfinite(gap(hi)):
        # crossed out of the domain; shrink back towards it
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            g = gap(mid)
            if math.isfinite(g) and g > 0:
                hi = mid
                break
            if math.isfinite(g):
                lo = mid
            else:
                hi = mid
        else:
            raise FlowError(f"{phase.name}: level {level:g} lies outside the domain on the ray")
    rho = brentq(gap, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    return np.array([cx, cy]) + rho * direction


def orbit_period(phase: Phase, level: float, rel_tol: float = RTOL, abs_tol: float = ATOL,
                 t_max: Optional[float] = None) -> float:
    """Time for the orbit on *level* to turn once about the phase center.

    The turn is detected on the augmented angle by a terminal event, located
    on the dense output.

    Raises:
        FlowError: level at or below the minimum, or no full turn before *t_max*
    """
    z0 = reference_point(phase, level)
    theta0 = float(phase.frame_angles(z0)[0])
    t_max = t_max if t_max is not None else 1e4
    rhs = _angle_rhs(phase, 1)

    def turned(_, state):
        return state[2] - theta0 - TWO_PI * phase.turn_sense * phase.sense

    turned.terminal = True
    sol = solve_ivp(rhs, (0.0, t_max), [z0[0], z0[1], theta0], method="RK45", rtol=rel_tol,
                    atol=abs_tol, events=turned)
    if sol.status != 1 or not len(sol.t_events[0]):
        raise FlowError(f"{phase.name}: no full turn of level {level:g} within t={t_max:g}")
    tau = float(sol.t_events[0][0])
    logger.debug("%s: period of level %.12g is %.12g (%d steps)", phase.name, level, tau, len(sol.t))
    return tau


def rotation_number(phase: Phase, z: Sequence[float], t: float, rel_tol: float = RTOL,
                    abs_tol: float = ATOL) -> float:
    """Normalized angular displacement ``(theta(t) - theta(0)) / 2pi`` about the center.

    Raises:
        FlowError: at the center, or when the trajectory comes within 1e-12 of it
    """
    cx, cy = _require_center(phase)
    z = np.asarray(z, dtype=float).reshape(2)
    if math.hypot(z[0] - cx, z[1] - cy) < CENTER_EPS:
        raise FlowError(f"{phase.name}: rotation number undefined at the center")
    if t == 0:
        return 0.0
    theta0 = float(phase.frame_angles(z)[0])
    sol = solve_ivp(_angle_rhs(phase, 1), (0.0, t), [z[0], z[1], theta0], method="RK45",
                    rtol=rel_tol, atol=abs_tol)
    if sol.status != 0:
        raise FlowError(f"{phase.name}: integration failed: {sol.message}")
    radii = np.hypot(sol.y[0] - cx, sol.y[1] - cy)
    if radii.min() < CENTER_EPS:
        raise FlowError(f"{phase.name}: trajectory passes through the center")
    return float((sol.y[2, -1] - theta0) / TWO_PI)


def switching_thresholds(m1: int, m2: int, tau0_1: float, tau0_2: float,
                         taumu_1: float, taumu_2: float) -> Tuple[float, float]:
    """Phase durations beyond which each twist winds the required number of times.

    ``alpha = (m1 + 3.5) tau0_1 tau0_2 / (tau0_2 - tau0_1)`` and the same for
    ``beta`` with the second phase's periods.

    Raises:
        FlowError: non-increasing periods or winding counts below 1
    """
    if m1 < 1 or m2 < 1:
        raise FlowError("winding counts must be at least 1")

    def threshold(m: int, t1: float, t2: float) -> float:
        if not 0 < t1 < t2:
            raise FlowError(f"periods must satisfy 0 < {t1:g} < {t2:g} (degenerate twist)")
        return (m + 3.5) * t1 * t2 / (t2 - t1)

    return threshold(m1, tau0_1, tau0_2), threshold(m2, taumu_1, taumu_2)


def minimal_twist_time(phase: Phase, z_inner: Sequence[float], z_outer: Sequence[float], m: int,
                       t_max: float, n_grid: int = 4096, rel_tol: float = RTOL,
                       abs_tol: float = ATOL) -> float:
    """Smallest ``r`` with ``rot(r, z_inner) - rot(r, z_outer) > m + 1``.

    Raises:
        FlowError: when the gap is not reached before *t_max*
    """
    z_inner = np.asarray(z_inner, dtype=float).reshape(2)
    z_outer = np.asarray(z_outer, dtype=float).reshape(2)
    pts = np.vstack([z_inner, z_outer])
    theta0 = phase.frame_angles(pts)
    y0 = np.concatenate([pts[:, 0], pts[:, 1], theta0])
    sol = solve_ivp(_angle_rhs(phase, 2), (0.0, t_max), y0, method="RK45", rtol=rel_tol,
                    atol=abs_tol, dense_output=True)
    if sol.status != 0:
        raise FlowError(f"{phase.name}: integration failed: {sol.message}")

    def excess(t: float) -> float:
        angle = sol.sol(t)[4:6]
        return float(((angle[0] - theta0[0]) - (angle[1] - theta0[1])) / TWO_PI - (m + 1))

    grid = np.linspace(0.0, t_max, n_grid)
    values = np.array([excess(t) for t in grid])
    above = np.flatnonzero(values > 0)
    if above.size == 0:
        raise FlowError(f"{phase.name}: twist gap {m + 1} not reached within t={t_max:g}")
    k = int(above[0])
    if k == 0:
        return 0.0
    time = brentq(excess, grid[k - 1], grid[k], xtol=1e-10)
    logger.debug("%s: minimal twist time for gap %d is %.6g", phase.name, m + 1, time)
    return float(time)
