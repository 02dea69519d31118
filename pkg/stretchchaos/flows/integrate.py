"""
Adaptive integration of phases and switching systems.

Single trajectories go through ``solve_ivp`` (RK45, dense output) piece by
piece, stopping exactly at switch times. Batches of initial conditions are
stacked into one system, optionally augmented with the continuous angle about
the phase center

    theta' = sense * ((x - cx) y' - (y - cy) x') / r^2

so winding counts come out of the integration instead of being unwrapped
from samples.
"""
from __future__ import annotations

import logging
import math
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.integrate import solve_ivp

from ..errors import IntegrationError
from ..geometry.regions import as_points
from ..models.base import PlanarMap
from .systems import Phase, SwitchingSystem, VOLTERRA_GUARD, VolterraPhase

logger = logging.getLogger(__name__)

RTOL = 1e-10
ATOL = 1e-12
CHUNK = 512
CENTER_EPS = 1e-12


# --------------------------------------------------------------------------- #
# Single trajectories
# --------------------------------------------------------------------------- #
@dataclass
class Trajectory:
    """Dense solution through one or more phases.

    ``pieces`` holds ``(phase index, t0, t1, OdeSolution)``; ``t`` and
    ``states`` are the accepted solver steps.
    """

    t: np.ndarray
    states: np.ndarray
    phase_ids: np.ndarray
    phases: List[Phase]
    pieces: List[Tuple[int, float, float, object]] = field(default_factory=list)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def __call__(self, t) -> np.ndarray:
        """States at times *t* (``(N, 2)``), from the piece that contains each time."""
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.full((len(ts), 2), np.nan)
        for _, t0, t1, sol in self.pieces:
            sel = (ts >= t0) & (ts <= t1) & np.isnan(out[:, 0])
            if sel.any():
                out[sel] = sol(ts[sel]).T
        return out

    @property
    def energies(self) -> np.ndarray:
        out = np.empty(len(self.t))
        for k, phase in enumerate(self.phases):
            sel = self.phase_ids == k
            if sel.any():
                out[sel] = phase.energy(self.states[sel])
        return out

    def to_rows(self) -> List[tuple]:
        """``(t, x, y, phase name, energy)`` per step."""
        energies = self.energies
        return [(float(t), float(x), float(y), self.phases[p].name, float(e))
                for t, (x, y), p, e in zip(self.t, self.states, self.phase_ids, energies)]


def _guard_event(phase: Phase):
    if not isinstance(phase, VolterraPhase):
        return None

    def guard(t, z):
        return min(z[0], z[1]) - VOLTERRA_GUARD

    guard.terminal = True
    guard.direction = -1
    return guard


def _solve_piece(phase: Phase, z0: np.ndarray, t0: float, t1: float, rtol: float, atol: float):
    def rhs(t, z):
        fx, fy = phase.field(z[0], z[1])
        return [fx, fy]

    guard = _guard_event(phase)
    sol = solve_ivp(rhs, (t0, t1), z0, method="RK45", dense_output=True, rtol=rtol, atol=atol,
                    events=guard)
    if sol.status != 0:
        reason = "approached the boundary of the first quadrant" if sol.status == 1 else sol.message
        raise IntegrationError(f"{phase.name}: integration stopped at t={sol.t[-1]:.6g}: {reason}",
                               float(sol.t[-1]), sol.y[:, -1].copy())
    return sol


def integrate(
    field: Union[Phase, SwitchingSystem],
    z0: Sequence[float],
    t_span: Tuple[float, float],
    rel_tol: float = RTOL,
    abs_tol: float = ATOL,
) -> Trajectory:
    """Integrate a phase or a switching system from *z0* over *t_span*.

    Raises:
        IntegrationError: initial state outside the domain, step-size failure or
            domain guard; carries the last valid state
    """
    z = np.asarray(z0, dtype=float).reshape(2)
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 >= t0:
        raise IntegrationError(f"invalid time span {t_span}", t0, z)
    if isinstance(field, SwitchingSystem):
        schedule = field.schedule(t0, t1)
    else:
        schedule = [(field, t0, t1)]
    phases: List[Phase] = []
    ts, states, ids, pieces = [np.array([t0])], [z[None, :]], [np.array([0])], []
    for phase, a, b in schedule:
        if phase not in phases:
            phases.append(phase)
        pid = phases.index(phase)
        if not phase.in_domain(z[None, :])[0]:
            raise IntegrationError(f"{phase.name}: initial state {tuple(z)} outside the domain", a, z)
        sol = _solve_piece(phase, z, a, b, rel_tol, abs_tol)
        pieces.append((pid, a, b, sol.sol))
        ts.append(sol.t[1:])
        states.append(sol.y[:, 1:].T)
        ids.append(np.full(len(sol.t) - 1, pid))
        z = sol.y[:, -1].copy()
    if not phases:
        phases = [field.phases[0][0] if isinstance(field, SwitchingSystem) else field]
    return Trajectory(np.concatenate(ts), np.vstack(states), np.concatenate(ids), phases, pieces)


# --------------------------------------------------------------------------- #
# Stacked flows
# --------------------------------------------------------------------------- #
def _stacked_flow(phase: Phase, points: np.ndarray, t: float, rtol: float, atol: float,
                  with_angle: bool) -> Tuple[np.ndarray, np.ndarray]:
    """Flow all *points* for time *t* in one system; rows that fail come back NaN."""
    n = len(points)
    if with_angle:
        cx, cy = phase.center
        sense = phase.sense
        y0 = np.concatenate([points[:, 0], points[:, 1], phase.frame_angles(points)])
    else:
        y0 = np.concatenate([points[:, 0], points[:, 1]])

    def rhs(_, state):
        x, y = state[:n], state[n:2 * n]
        fx, fy = phase.field(x, y)
        if not with_angle:
            return np.concatenate([fx, fy])
        dx, dy = x - cx, y - cy
        r2 = np.maximum(dx * dx + dy * dy, CENTER_EPS ** 2)
        return np.concatenate([fx, fy, sense * (dx * fy - dy * fx) / r2])

    sol = solve_ivp(rhs, (0.0, t), y0, method="RK45", rtol=rtol, atol=atol, t_eval=[t])
    if sol.status != 0:
        if n == 1:
            return np.full((1, 2), np.nan), np.full(1, np.nan)
        half = n // 2
        first = _stacked_flow(phase, points[:half], t, rtol, atol, with_angle)
        second = _stacked_flow(phase, points[half:], t, rtol, atol, with_angle)
        return np.vstack([first[0], second[0]]), np.concatenate([first[1], second[1]])

    final = sol.y[:, -1]
    images = np.column_stack([final[:n], final[n:2 * n]])
    angles = final[2 * n:] if with_angle else np.full(n, np.nan)
    bad = ~phase.in_domain(images)
    if isinstance(phase, VolterraPhase):
        bad |= images.min(axis=1, initial=np.inf) < VOLTERRA_GUARD
    if with_angle:
        bad |= np.hypot(images[:, 0] - cx, images[:, 1] - cy) < CENTER_EPS
    images[bad] = np.nan
    angles[bad] = np.nan
    return images, angles


def flow_points(
    phase: Phase,
    points,
    t: float,
    rel_tol: float = RTOL,
    abs_tol: float = ATOL,
    with_angle: bool = False,
    chunk: int = CHUNK,
) -> Tuple[np.ndarray, np.ndarray]:
    """Time-*t* flow of many points; returns images and total angles (NaN when not requested)."""
    pts, _ = as_points(points)
    images = np.full((len(pts), 2), np.nan)
    angles = np.full(len(pts), np.nan)
    if with_angle and phase.center is None:
        raise IntegrationError(f"{phase.name} has no center; angles are undefined")
    ok = phase.in_domain(pts)
    if t == 0:
        images[ok] = pts[ok]
        if with_angle:
            angles[ok] = phase.frame_angles(pts[ok])
        return images, angles
    idx = np.flatnonzero(ok)
    for start in range(0, len(idx), chunk):
        sel = idx[start:start + chunk]
        img, ang = _stacked_flow(phase, pts[sel], t, rel_tol, abs_tol, with_angle)
        images[sel] = img
        angles[sel] = ang
    return images, angles


class PhaseMap(PlanarMap):
    """Time-*t* map of one phase, with an LRU cache keyed by the exact point bytes."""

    parallel_safe = False

    def __init__(self, phase: Phase, t: float, rel_tol: float = RTOL, abs_tol: float = ATOL,
                 map_id: Optional[str] = None, cache_size: int = 200_000):
        super().__init__(map_id or f"Psi_{phase.name}(t={t:g})")
        self.phase = phase
        self.t = float(t)
        self.rel_tol = rel_tol
        self.abs_tol = abs_tol
        self.cache_size = cache_size
        self._cache: "OrderedDict[bytes, np.ndarray]" = OrderedDict()
        self.hits = 0
        self.misses = 0

    def evaluate_with_angle(self, points) -> Tuple[np.ndarray, np.ndarray]:
        pts, _ = as_points(points)
        pts = np.ascontiguousarray(pts, dtype=float)
        out = np.full((len(pts), 3), np.nan)
        keys = [row.tobytes() for row in pts]
        missing = {}
        for i, key in enumerate(keys):
            hit = self._cache.get(key)
            if hit is None:
                missing.setdefault(key, []).append(i)
            else:
                self._cache.move_to_end(key)
                out[i] = hit
        self.hits += len(keys) - sum(len(v) for v in missing.values())
        if missing:
            first = [rows[0] for rows in missing.values()]
            with_angle = self.phase.center is not None
            images, angles = flow_points(self.phase, pts[first], self.t, self.rel_tol,
                                         self.abs_tol, with_angle=with_angle)
            for (key, rows), image, angle in zip(missing.items(), images, angles):
                value = np.array([image[0], image[1], angle])
                out[rows] = value
                self._cache[key] = value
            self.misses += len(first)
            while len(self._cache) > self.cache_size:
                self._cache.popitem(last=False)
            logger.debug("%s: integrated %d points (%d cached hits so far)", self.map_id,
                         len(first), self.hits)
        return out[:, :2], out[:, 2]

    def _evaluate(self, points: np.ndarray) -> np.ndarray:
        return self.evaluate_with_angle(points)[0]


class PoincareMap(PlanarMap):
    """Period map of a switching system, ``Psi = Psi_last o ... o Psi_first``."""

    parallel_safe = False

    def __init__(self, system: SwitchingSystem, rel_tol: float = RTOL, abs_tol: float = ATOL):
        super().__init__(f"Poincare[{system.name}](T={system.period:g})")
        self.system = system
        self.phase_maps = [PhaseMap(phase, duration, rel_tol, abs_tol)
                           for phase, duration in system.phases if duration > 0]

    def _evaluate(self, points: np.ndarray) -> np.ndarray:
        out = points
        for phase_map in self.phase_maps:
            out = phase_map.evaluate(out)
        return out

    def inverse(self) -> "PoincareMap":
        first = self.phase_maps[0] if self.phase_maps else None
        rtol = first.rel_tol if first else RTOL
        atol = first.abs_tol if first else ATOL
        return PoincareMap(self.system.reversed(), rtol, atol)


def poincare(system: SwitchingSystem, z0: Sequence[float], rel_tol: float = RTOL,
             abs_tol: float = ATOL) -> np.ndarray:
    """Image of *z0* after one switching period, integrated piece by piece.

    Raises:
        IntegrationError: when the trajectory does not reach ``T``
    """
    return integrate(system, z0, (0.0, system.period), rel_tol, abs_tol).final.copy()


def poincare_orbit(system: SwitchingSystem, z0: Sequence[float], n: int,
                   rel_tol: float = RTOL, abs_tol: float = ATOL) -> np.ndarray:
    """``(n + 1, 2)`` iterates ``z0, Psi(z0), ...``; stops early with NaN rows on failure."""
    out = np.full((n + 1, 2), np.nan)
    out[0] = np.asarray(z0, dtype=float)
    for i in range(n):
        try:
            out[i + 1] = poincare(system, out[i], rel_tol, abs_tol)
        except IntegrationError as exc:
            logger.warning("Poincare iteration stopped at n=%d: %s", i + 1, exc)
            break
    return out

