"""
Autonomous phases of the switched systems and their first integrals.

The harvested Volterra system alternates between

    x' = x (a - b y),        y' = y (-c + d x)           (phase E0)
    x' = x (a_mu - b y),     y' = y (-c_mu + d x)        (phase Emu)

with ``a_mu = a - mu`` and ``c_mu = c + mu``; the forced Duffing equation
``x'' + k x^+ = p(t)`` alternates between ``p = q`` (phase Eq) and ``p = -s``
(phase Es).
"""
from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ConfigError, DomainError, FlowError
from ..geometry.regions import as_points
from ..models.maps import _Params

logger = logging.getLogger(__name__)

#: integration stops treating a Volterra state as valid below this coordinate
VOLTERRA_GUARD = 1e-9


# --------------------------------------------------------------------------- #
# Parameters
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class VolterraParams(_Params):
    a: float = 1.0
    b: float = 1.0
    c: float = 1.0
    d: float = 1.0
    mu: float = 0.5
    r0: float = 0.0
    rmu: float = 0.0

    def validate(self):
        if min(self.a, self.b, self.c, self.d) <= 0:
            raise ConfigError("volterra rates a, b, c, d must be positive")
        if not 0.0 <= self.mu < self.a:
            raise ConfigError("volterra harvesting rate must satisfy 0 <= mu < a")
        if self.r0 < 0 or self.rmu < 0:
            raise ConfigError("phase durations must be nonnegative")

    @property
    def a_mu(self) -> float:
        return self.a - self.mu

    @property
    def c_mu(self) -> float:
        return self.c + self.mu

    @property
    def period(self) -> float:
        return self.r0 + self.rmu

    def with_times(self, r0: float, rmu: float) -> "VolterraParams":
        return VolterraParams(self.a, self.b, self.c, self.d, self.mu, r0, rmu)


@dataclass(frozen=True)
class DuffingParams(_Params):
    k: float = 10.0
    q: float = 4.0
    s: float = 0.5
    rq: float = 0.0
    rs: float = 0.0

    def validate(self):
        if min(self.k, self.q, self.s) <= 0:
            raise ConfigError("duffing k, q, s must be positive")
        if self.rq < 0 or self.rs < 0:
            raise ConfigError("phase durations must be nonnegative")

    @property
    def period(self) -> float:
        return self.rq + self.rs

    def with_times(self, rq: float, rs: float) -> "DuffingParams":
        return DuffingParams(self.k, self.q, self.s, rq, rs)


# --------------------------------------------------------------------------- #
# Phases
# --------------------------------------------------------------------------- #
class Phase(ABC):
    """One autonomous vector field with a first integral.

    ``sense`` is +1 when orbits turn counterclockwise about ``center`` and -1
    when they turn clockwise; angles reported by the integrators are measured
    in that sense, from the direction ``frame_angle``.
    """

    name: str = "phase"
    sense: int = 1
    frame_angle: float = 0.0
    reverse: bool = False

    @abstractmethod
    def _field(self, x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Forward-time vector field on coordinate arrays."""

    @abstractmethod
    def energy(self, points) -> np.ndarray:
        """First integral on ``(N, 2)`` points; NaN outside the domain."""

    @property
    @abstractmethod
    def center(self) -> Optional[Tuple[float, float]]:
        """Equilibrium the orbits turn around, or None."""

    @abstractmethod
    def reversed(self) -> "Phase":
        """The same phase in reversed time."""

    def field(self, x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        fx, fy = self._field(x, y)
        if self.reverse:
            return -fx, -fy
        return fx, fy

    def in_domain(self, points: np.ndarray) -> np.ndarray:
        return np.isfinite(points).all(axis=1)

    @property
    def chi(self) -> float:
        """Minimum of the first integral (its value at the center)."""
        if self.center is None:
            return -math.inf
        return float(self.energy(np.array([self.center]))[0])

    @property
    def turn_sense(self) -> int:
        """Sense of rotation of the trajectories actually followed."""
        return -self.sense if self.reverse else self.sense

    def frame_angles(self, points) -> np.ndarray:
        """Angle about the center in ``(-pi, pi]``, from ``frame_angle``, in the phase's sense."""
        pts, _ = as_points(points)
        if self.center is None:
            raise FlowError(f"{self.name} has no center to measure angles about")
        cx, cy = self.center
        dx, dy = pts[:, 0] - cx, pts[:, 1] - cy
        cos_f, sin_f = math.cos(self.frame_angle), math.sin(self.frame_angle)
        # rotate by -frame_angle, then mirror for clockwise phases
        u = cos_f * dx + sin_f * dy
        v = -sin_f * dx + cos_f * dy
        return np.arctan2(self.sense * v, u)

    def __repr__(self) -> str:
        suffix = ", reversed" if self.reverse else ""
        return f"{type(self).__name__}({self.name}{suffix})"


class VolterraPhase(Phase):
    """Predator-prey phase, unharvested (``E0``) or harvested (``Emu``)."""

    sense = 1

    def __init__(self, params: VolterraParams, harvested: bool = False, reverse: bool = False):
        self.params = params
        self.harvested = harvested
        self.reverse = reverse
        self.name = "Emu" if harvested else "E0"
        self.rate_a = params.a_mu if harvested else params.a
        self.rate_c = params.c_mu if harvested else params.c
        # direction of the line through both centers, by + dx = a + c
        self.frame_angle = -math.atan2(params.d, params.b)

    def _field(self, x, y):
        p = self.params
        return x * (self.rate_a - p.b * y), y * (-self.rate_c + p.d * x)

    def in_domain(self, points):
        return np.isfinite(points).all(axis=1) & (points[:, 0] > 0) & (points[:, 1] > 0)

    def energy(self, points) -> np.ndarray:
        pts, _ = as_points(points)
        p = self.params
        out = np.full(len(pts), np.nan)
        ok = self.in_domain(pts)
        x, y = pts[ok, 0], pts[ok, 1]
        out[ok] = p.d * x - self.rate_c * np.log(x) + p.b * y - self.rate_a * np.log(y)
        return out

    @property
    def center(self):
        return (self.rate_c / self.params.d, self.rate_a / self.params.b)

    def reversed(self) -> "VolterraPhase":
        return VolterraPhase(self.params, self.harvested, not self.reverse)


class DuffingPhase(Phase):
    """Forced oscillator ``x' = y, y' = -k x^+ + p`` with ``p = q`` or ``p = -s``."""

    sense = -1

    def __init__(self, params: DuffingParams, forcing: str = "q", reverse: bool = False):
        if forcing not in ("q", "s"):
            raise ValueError(f"forcing must be 'q' or 's', got {forcing!r}")
        self.params = params
        self.forcing = forcing
        self.reverse = reverse
        self.name = f"E{forcing}"
        self.p = params.q if forcing == "q" else -params.s

    def _field(self, x, y):
        return y, -self.params.k * np.maximum(x, 0.0) + self.p

    def energy(self, points) -> np.ndarray:
        pts, _ = as_points(points)
        x, y = pts[:, 0], pts[:, 1]
        xp = np.maximum(x, 0.0)
        return 0.5 * y ** 2 + 0.5 * self.params.k * xp ** 2 - self.p * x

    @property
    def center(self):
        if self.p <= 0:
            return None
        return (self.p / self.params.k, 0.0)

    def reversed(self) -> "DuffingPhase":
        return DuffingPhase(self.params, self.forcing, not self.reverse)


def first_integral(phase: Phase, point: Sequence[float]) -> float:
    """Energy of a single point.

    Raises:
        DomainError: outside the phase's domain
    """
    value = float(phase.energy(np.asarray(point, dtype=float).reshape(1, 2))[0])
    if not math.isfinite(value):
        raise DomainError(f"{phase.name} is undefined at {tuple(point)}", point)
    return value


# --------------------------------------------------------------------------- #
# Switching systems
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class SwitchingSystem:
    """Periodic switching between autonomous phases, in the listed order."""

    phases: Tuple[Tuple[Phase, float], ...]
    name: str = "switched"

    def __post_init__(self):
        phases = tuple((phase, float(duration)) for phase, duration in self.phases)
        if not phases:
            raise FlowError("a switching system needs at least one phase")
        if any(duration < 0 for _, duration in phases):
            raise FlowError("phase durations must be nonnegative")
        if sum(duration for _, duration in phases) <= 0:
            raise FlowError("switching period must be positive")
        object.__setattr__(self, "phases", phases)

    @property
    def period(self) -> float:
        return sum(duration for _, duration in self.phases)

    def reversed(self) -> "SwitchingSystem":
        """Phases in reverse order with reversed time: its period map inverts this one's."""
        return SwitchingSystem(tuple((phase.reversed(), duration)
                                     for phase, duration in reversed(self.phases)),
                               f"{self.name}^-1")

    def schedule(self, t0: float, t1: float) -> List[Tuple[Phase, float, float]]:
        """Pieces ``(phase, start, end)`` covering ``[t0, t1]`` with exact stops at switch times."""
        pieces: List[Tuple[Phase, float, float]] = []
        period = self.period
        k = math.floor(t0 / period)
        t = t0
        while t < t1:
            start = k * period
            for phase, duration in self.phases:
                end = start + duration
                if duration > 0 and end > t:
                    stop = min(end, t1)
                    pieces.append((phase, t, stop))
                    t = stop
                    if t >= t1:
                        break
                start = end
            k += 1
        return pieces


def volterra_system(params: VolterraParams) -> SwitchingSystem:
    return SwitchingSystem(((VolterraPhase(params, False), params.r0),
                            (VolterraPhase(params, True), params.rmu)), "volterra")


def duffing_system(params: DuffingParams) -> SwitchingSystem:
    return SwitchingSystem(((DuffingPhase(params, "q"), params.rq),
                            (DuffingPhase(params, "s"), params.rs)), "duffing")
