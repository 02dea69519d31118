"""
Linked annuli of the switched systems and the rectangles they cut out.

Volterra: both centers lie on the line ``r: b y + d x = a + c``; the four
level lines meet it in eight points whose interleaving decides whether the
annuli are linked. The two lenses are charted exactly: ``E0 - Emu =
mu log(x / y)``, so a pair of levels fixes the ray ``x = rho y`` and one of
the two roots of ``E0`` along it.

Duffing: on ``x <= 0`` the level lines of ``Eq`` and ``Es`` are parabolas and
a pair of levels fixes the intersection point in closed form.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from ..errors import FlowError, GeometryError
from ..geometry import OrientedRectangle, RegionPredicate, bisect_roots, make_rect_from_chart
from .integrate import PhaseMap
from .systems import DuffingParams, DuffingPhase, Phase, VolterraParams, VolterraPhase

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
ROOT_XTOL = 1e-12


@dataclass(frozen=True)
class Annulus:
    phase: str
    inner: float
    outer: float
    center: Tuple[float, float]

    def __post_init__(self):
        if not self.inner < self.outer:
            raise FlowError(f"annulus of {self.phase}: inner level {self.inner:g} "
                            f"must be below outer level {self.outer:g}")

    def to_dict(self) -> dict:
        return {"phase": self.phase, "inner": self.inner, "outer": self.outer,
                "center": list(self.center)}


# --------------------------------------------------------------------------- #
# Volterra
# --------------------------------------------------------------------------- #
def _line_r(params: VolterraParams):
    """Points of the line through both centers, parameterized by ``x`` on ``(0, (a+c)/d)``."""
    total = params.a + params.c

    def point(x: float) -> np.ndarray:
        return np.array([[x, (total - params.d * x) / params.b]])

    return point, total / params.d


def line_roots(phase: VolterraPhase, level: float) -> Tuple[float, float]:
    """``x``-coordinates of the two points where the level line meets line ``r``.

    Brackets are found by marching geometrically from the center towards each
    end of the segment, then refined with brentq.

    Raises:
        FlowError: level not above the minimum, or no bracket found
    """
    if not level > phase.chi:
        raise FlowError(f"{phase.name}: level {level:g} is not above the minimum {phase.chi:g}")
    point, x_end = _line_r(phase.params)
    xc = phase.center[0]

    def gap(x: float) -> float:
        return float(phase.energy(point(x))[0]) - level

    roots = []
    for end in (0.0, x_end):
        inner = xc
        outer = xc
        for k in range(1, 200):
            outer = end + (xc - end) * 2.0 ** (-k)
            if gap(outer) > 0:
                break
            inner = outer
        else:
            raise FlowError(f"{phase.name}: no bracket for level {level:g} along line r")
        lo, hi = sorted((inner, outer))
        roots.append(brentq(gap, lo, hi, xtol=ROOT_XTOL))
    return roots[0], roots[1]


def _ray_chart(params: VolterraParams, lower: bool, u_is_e0: bool):
    """Chart ``(s, t) -> point`` of one lens: the point below (or above) line ``r`` on both levels."""
    mu, a, b, c, d = params.mu, params.a, params.b, params.c, params.d

    def chart(s, t):
        s, t = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
        level0, level_mu = (s, t) if u_is_e0 else (t, s)
        rho = np.exp((level0 - level_mu) / mu)
        slope = d * rho + b
        t_star = (a + c) / slope

        def g(tau):
            with np.errstate(divide="ignore", invalid="ignore"):
                return slope * tau - (a + c) * np.log(tau) - c * np.log(rho) - level0

        if lower:
            tau = bisect_roots(g, t_star * 1e-12, t_star)
        else:
            tau = bisect_roots(g, t_star, t_star * 1e4)
        return np.column_stack([rho * tau, tau])

    return chart


def _volterra_rect(params: VolterraParams, levels0: Tuple[float, float],
                   levels_mu: Tuple[float, float], lower: bool, name: str) -> OrientedRectangle:
    e0 = VolterraPhase(params, harvested=False)
    emu = VolterraPhase(params, harvested=True)
    total = params.a + params.c
    u_is_e0 = lower

    def coords(p):
        first, second = e0.energy(p), emu.energy(p)
        return (first, second) if u_is_e0 else (second, first)

    def side(p):
        value = params.d * p[:, 0] + params.b * p[:, 1]
        return value <= total if lower else value >= total

    s_range, t_range = (levels0, levels_mu) if u_is_e0 else (levels_mu, levels0)
    orientation = "sides on E0 levels" if u_is_e0 else "sides on Emu levels"
    return make_rect_from_chart(_ray_chart(params, lower, u_is_e0), coords, s_range, t_range,
                                side, name=name, orientation=orientation)


@dataclass
class LinkedAnnuli:
    """Eight points on line ``r``, the linkage verdict and (when linked) both lenses."""

    linked: bool
    points: Dict[str, float]
    annuli: List[Annulus]
    rect1: Optional[OrientedRectangle] = None
    rect2: Optional[OrientedRectangle] = None

    def __iter__(self):
        return iter((self.rect1, self.rect2, self.linked))

    def to_dict(self) -> dict:
        return {
            "linked": self.linked,
            "points": dict(self.points),
            "annuli": [a.to_dict() for a in self.annuli],
            "rect1": self.rect1.to_dict() if self.rect1 else None,
            "rect2": self.rect2.to_dict() if self.rect2 else None,
        }


LINK_ORDER = ("P2-", "P1-", "Q2-", "Q1-", "P1+", "P2+", "Q1+", "Q2+")
#: strict "<" between these neighbours, "<=" elsewhere
STRICT_PAIRS = {("P2-", "P1-"), ("Q2-", "Q1-"), ("P1+", "P2+"), ("Q1+", "Q2+")}


def linked_annuli(params: VolterraParams, l1: float, l2: float, h1: float, h2: float) -> LinkedAnnuli:
    """Check the interleaving of the four level lines along line ``r`` and build both lenses.

    ``R1`` is the lens below ``r`` with its sides on ``E0 = l1, l2``; ``R2`` is
    the lens above ``r`` with its sides on ``Emu = h1, h2``.

    Raises:
        FlowError: levels not above the minima or not increasing, or no root bracket
    """
    e0 = VolterraPhase(params, harvested=False)
    emu = VolterraPhase(params, harvested=True)
    if not (l1 < l2 and h1 < h2):
        raise FlowError("levels must satisfy l1 < l2 and h1 < h2")
    annuli = [Annulus("E0", l1, l2, e0.center), Annulus("Emu", h1, h2, emu.center)]
    points: Dict[str, float] = {}
    for label, phase, level in (("P1", e0, l1), ("P2", e0, l2), ("Q1", emu, h1), ("Q2", emu, h2)):
        minus, plus = line_roots(phase, level)
        points[f"{label}-"], points[f"{label}+"] = minus, plus

    linked = True
    for first, second in zip(LINK_ORDER, LINK_ORDER[1:]):
        a, b = points[first], points[second]
        ok = a < b if (first, second) in STRICT_PAIRS else a <= b
        if not ok:
            logger.info("annuli not linked: %s=%.6g, %s=%.6g out of order", first, a, second, b)
            linked = False
            break
    result = LinkedAnnuli(linked, points, annuli)
    if linked:
        result.rect1 = _volterra_rect(params, (l1, l2), (h1, h2), lower=True, name="R1")
        result.rect2 = _volterra_rect(params, (l1, l2), (h1, h2), lower=False, name="R2")
        logger.info("annuli linked; R1 bbox %s, R2 bbox %s", result.rect1.bbox, result.rect2.bbox)
    return result


# --------------------------------------------------------------------------- #
# Duffing
# --------------------------------------------------------------------------- #
def duffing_linked_rects(params: DuffingParams, eq_levels: Sequence[float],
                         es_levels: Sequence[float]) -> Tuple[OrientedRectangle, OrientedRectangle]:
    """Lower rectangle ``R1`` (sides on ``Eq`` levels) and its mirror ``R2`` (sides on ``Es`` levels).

    Raises:
        GeometryError: when the levels do not intersect in ``x <= 0``
    """
    q, s = params.q, params.s
    eq1, eq2 = sorted(float(v) for v in eq_levels)
    es1, es2 = sorted(float(v) for v in es_levels)
    if not (eq1 < eq2 and es1 < es2):
        raise GeometryError("level pairs must be distinct")
    if es2 > eq1:
        raise GeometryError(f"Es level {es2:g} above Eq level {eq1:g}: no intersection in x <= 0")
    if eq1 <= 0:
        raise GeometryError("Eq levels must be positive to meet the Es levels in x <= 0")
    phase_q = DuffingPhase(params, "q")
    phase_s = DuffingPhase(params, "s")

    def chart_for(sign: float, u_is_q: bool):
        def chart(u_level, v_level):
            eq, es = (u_level, v_level) if u_is_q else (v_level, u_level)
            x = (es - eq) / (q + s)
            with np.errstate(invalid="ignore"):
                y = sign * np.sqrt(2.0 * (es - s * x))
            return np.column_stack([x, y])

        def coords(p):
            eq, es = phase_q.energy(p), phase_s.energy(p)
            return (eq, es) if u_is_q else (es, eq)

        def side(p):
            return (p[:, 0] <= 0) & (sign * p[:, 1] >= 0)

        return chart, coords, side

    chart, coords, side = chart_for(-1.0, True)
    rect1 = make_rect_from_chart(chart, coords, (eq1, eq2), (es1, es2), side, name="R1",
                                 orientation="sides on Eq levels")
    chart, coords, side = chart_for(1.0, False)
    rect2 = make_rect_from_chart(chart, coords, (es1, es2), (eq1, eq2), side, name="R2",
                                 orientation="sides on Es levels")
    return rect1, rect2


# --------------------------------------------------------------------------- #
# Angular windows
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class AngleWindows:
    """Regions ``{z in rect : image in target, floor((theta - offset) / 2pi) = w}``."""

    regions: List[RegionPredicate]
    windings: Tuple[int, ...]
    offset: float


def angle_windows(phase_map: PhaseMap, rect: OrientedRectangle, target: OrientedRectangle,
                  windings: Optional[Sequence[int]] = None, offset: Optional[float] = None,
                  n_grid: int = 65, prefix: str = "H") -> AngleWindows:
    """Split the part of *rect* mapped into *target* by the total angle turned.

    Without explicit *windings* they are read off an ``n_grid`` sample of
    *rect*. The default *offset* is half a turn before the target's mean
    angle, so a visit to the target never straddles two windows.

    Raises:
        GeometryError: when no sampled point of *rect* reaches *target*
    """
    phase = phase_map.phase
    if offset is None:
        mean = np.angle(np.exp(1j * phase.frame_angles(target.boundary())).mean())
        offset = float(mean) - math.pi

    def turns(angles):
        with np.errstate(invalid="ignore"):
            return np.floor((angles - offset) / TWO_PI)

    if windings is None:
        us, vs = np.meshgrid(np.linspace(0, 1, n_grid), np.linspace(0, 1, n_grid))
        pts = rect.param(us.ravel(), vs.ravel())
        images, angles = phase_map.evaluate_with_angle(pts)
        ok = np.isfinite(images).all(axis=1)
        hit = np.zeros(len(pts), dtype=bool)
        hit[ok] = target.contains(images[ok])
        windings = sorted(int(w) for w in np.unique(turns(angles[hit])))
        if not windings:
            raise GeometryError(f"{phase_map.map_id}: no point of {rect.name} reaches {target.name}")

    regions = []
    for label, w in enumerate(windings):
        def contains(p, w=w):
            inside = rect.contains(p)
            if inside.any():
                idx = np.flatnonzero(inside)
                images, angles = phase_map.evaluate_with_angle(p[idx])
                ok = np.isfinite(images).all(axis=1)
                sub = np.zeros(len(idx), dtype=bool)
                sub[ok] = target.contains(images[ok]) & (turns(angles[ok]) == w)
                inside = inside.copy()
                inside[idx] = sub
            return inside

        regions.append(RegionPredicate(contains, rect.bbox, label, f"{prefix}{label}(w={w})"))
    logger.info("%s: windows %s on %s", phase_map.map_id, list(windings), rect.name)
    return AngleWindows(regions, tuple(int(w) for w in windings), float(offset))


def volterra_windows(phase_map: PhaseMap, rect: OrientedRectangle, target: OrientedRectangle,
                     outer_period: float, count: int, half_turn: bool = False,
                     prefix: str = "H") -> AngleWindows:
    """Windows ``n* + i``, ``i < count``, with ``n* = ceil(t / outer_period)``.

    The first phase moves the lower lens into the upper half turn
    (``offset 0``); the second moves the upper lens into the lower half turn
    (``offset pi``, *half_turn*).
    """
    n_star = math.ceil(phase_map.t / outer_period)
    offset = math.pi if half_turn else 0.0
    return angle_windows(phase_map, rect, target, [n_star + i for i in range(count)], offset,
                         prefix=prefix)
