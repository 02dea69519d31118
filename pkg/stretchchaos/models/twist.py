"""
Linked twist map examples: lens-shaped rectangles in overlapping annuli (or an
annulus and a strip) and the winding regions that split a twist image into
separate crossings.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import GeometryError
from ..geometry import OrientedRectangle, RegionPredicate, make_rect_from_chart
from .base import PlanarMap
from .maps import Twist1Params, Twist2Params, ramp, twist1_maps, twist2_maps

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TwistGeometry:
    rect_a: OrientedRectangle
    rect_b: OrientedRectangle
    annuli: List[Dict[str, object]]
    convention: str

    def __iter__(self):
        return iter((self.rect_a, self.rect_b, self.annuli))


def _bipolar_chart(r: float, upper: bool, swap: bool):
    """Point with distances ``rho1`` from ``(-r, 0)`` and ``rho2`` from ``(r, 0)``."""
    sign = 1.0 if upper else -1.0

    def chart(s, t):
        rho1, rho2 = (t, s) if swap else (s, t)
        x = (rho1 ** 2 - rho2 ** 2) / (4.0 * r)
        with np.errstate(invalid="ignore"):
            y = sign * np.sqrt(rho1 ** 2 - (x + r) ** 2)
        return np.column_stack([x, y])

    def coords(p):
        rho1 = np.hypot(p[:, 0] + r, p[:, 1])
        rho2 = np.hypot(p[:, 0] - r, p[:, 1])
        return (rho2, rho1) if swap else (rho1, rho2)

    def side(p):
        return p[:, 1] >= 0 if upper else p[:, 1] <= 0

    return chart, coords, side


def twist1_geometry(params: Twist1Params) -> TwistGeometry:
    """Upper lens ``A`` (sides on the left annulus) and lower lens ``B`` (sides on the right annulus).

    Raises:
        GeometryError: when the annuli do not overlap in two separate lenses
    """
    r, p1, p2, q1, q2 = params.r, params.p1, params.p2, params.q1, params.q2
    if 2 * r >= p2 + q2:
        raise GeometryError(f"annuli do not overlap: centre distance {2 * r:g} >= {p2 + q2:g}")
    if not p1 + q1 > 2 * r:
        raise GeometryError("inner circles overlap; the annuli meet in one region, not two lenses")
    if not (abs(p2 - q1) < 2 * r and abs(q2 - p1) < 2 * r):
        raise GeometryError("one annulus swallows the other")

    chart, coords, side = _bipolar_chart(r, upper=True, swap=False)
    rect_a = make_rect_from_chart(chart, coords, (p1, p2), (q1, q2), side, name="A",
                                  orientation="left annulus inner/outer")
    chart, coords, side = _bipolar_chart(r, upper=False, swap=True)
    rect_b = make_rect_from_chart(chart, coords, (q1, q2), (p1, p2), side, name="B",
                                  orientation="right annulus inner/outer")
    annuli = [
        {"center": [-r, 0.0], "inner": p1, "outer": p2},
        {"center": [r, 0.0], "inner": q1, "outer": q2},
    ]
    return TwistGeometry(rect_a, rect_b, annuli,
                         "A: upper lens, sides on the left annulus; B: lower lens, sides on the right annulus")


def twist2_geometry(params: Twist2Params) -> TwistGeometry:
    """Right lens ``A`` (sides on the circles) and left lens ``B`` (sides on the strip edges)."""
    p1, p2, q1, q2 = params.p1, params.p2, params.q1, params.q2

    def chart_for(sign: float, swap: bool):
        def chart(s, t):
            rho, y = (t, s) if swap else (s, t)
            with np.errstate(invalid="ignore"):
                x = sign * np.sqrt(rho ** 2 - y ** 2)
            return np.column_stack([x, y])

        def coords(p):
            rho = np.hypot(p[:, 0], p[:, 1])
            return (p[:, 1], rho) if swap else (rho, p[:, 1])

        def side(p):
            return p[:, 0] * sign >= 0

        return chart, coords, side

    chart, coords, side = chart_for(1.0, swap=False)
    rect_a = make_rect_from_chart(chart, coords, (p1, p2), (q1, q2), side, name="A",
                                  orientation="annulus inner/outer")
    chart, coords, side = chart_for(-1.0, swap=True)
    rect_b = make_rect_from_chart(chart, coords, (q1, q2), (p1, p2), side, name="B",
                                  orientation="strip lower/upper")
    annuli = [
        {"center": [0.0, 0.0], "inner": p1, "outer": p2},
        {"strip": [q1, q2]},
    ]
    return TwistGeometry(rect_a, rect_b, annuli,
                         "A: right lens, sides on the circles; B: left lens, sides on the strip edges")


def twist_geometry(example: int, params) -> TwistGeometry:
    if example == 1:
        return twist1_geometry(params)
    if example == 2:
        return twist2_geometry(params)
    raise ValueError(f"unknown twist example {example!r}")


# --------------------------------------------------------------------------- #
# Winding regions
# --------------------------------------------------------------------------- #
def _circular_mean(angles: np.ndarray) -> float:
    return float(np.arctan2(np.sin(angles).mean(), np.cos(angles).mean()))


@dataclass(frozen=True)
class WindingRegions:
    regions: List[RegionPredicate]
    windings: Tuple[int, ...]
    cut: float


def winding_regions(
    mapping: PlanarMap,
    center: Sequence[float],
    added_angle: Callable[[np.ndarray], np.ndarray],
    rect: OrientedRectangle,
    target: OrientedRectangle,
    cut: Optional[float] = None,
    n_grid: int = 257,
) -> WindingRegions:
    """Split ``{z in rect : mapping(z) in target}`` by the number of turns of the twist.

    The total angle is ``arg(z - center) + added_angle(z)`` with ``arg`` taken
    continuously on *rect*; the turn count is ``floor((angle - cut)/2pi)``. The
    default *cut* is opposite the target's mean direction, so every visit to
    the target falls inside a single turn. Turn counts are read off a grid and
    relabelled ``0..m-1`` in increasing order.
    """
    cx, cy = float(center[0]), float(center[1])
    reference = _circular_mean(np.arctan2(rect.boundary()[:, 1] - cy, rect.boundary()[:, 0] - cx))
    if cut is None:
        tb = target.boundary()
        cut = _circular_mean(np.arctan2(tb[:, 1] - cy, tb[:, 0] - cx)) + math.pi

    def total_angle(p):
        raw = np.arctan2(p[:, 1] - cy, p[:, 0] - cx)
        # continuous branch around the rectangle's mean direction
        base = reference + np.mod(raw - reference + math.pi, TWO_PI) - math.pi
        return base + added_angle(p)

    def turns(p):
        return np.floor((total_angle(p) - cut) / TWO_PI).astype(np.int64)

    us, vs = np.meshgrid(np.linspace(0, 1, n_grid), np.linspace(0, 1, n_grid))
    pts = rect.param(us.ravel(), vs.ravel())
    images = mapping.evaluate(pts)
    ok = np.isfinite(images).all(axis=1)
    hit = np.zeros(len(pts), dtype=bool)
    hit[ok] = target.contains(images[ok])
    windings = tuple(int(w) for w in np.unique(turns(pts[hit])))
    if not windings:
        raise GeometryError(f"{mapping.map_id}: no point of {rect.name} maps into {target.name}")

    regions = []
    for label, w in enumerate(windings):
        def contains(p, w=w):
            inside = rect.contains(p) & (turns(p) == w)
            if inside.any():
                idx = np.flatnonzero(inside)
                img = mapping.evaluate(p[idx])
                good = np.isfinite(img).all(axis=1)
                sub = np.zeros(len(idx), dtype=bool)
                sub[good] = target.contains(img[good])
                inside[idx] = sub
            return inside

        regions.append(RegionPredicate(contains, rect.bbox, label, f"H{label}(w={w})"))
    logger.info("%s: %d winding regions %s", mapping.map_id, len(regions), windings)
    return WindingRegions(regions, windings, float(cut))


@dataclass(frozen=True)
class TwistSetup:
    """Everything needed to check a linked twist configuration."""

    phi: PlanarMap
    psi: PlanarMap
    geometry: TwistGeometry
    h_regions: WindingRegions
    k_regions: Optional[WindingRegions] = None


def twist1_setup(params: Twist1Params, double: bool = False) -> TwistSetup:
    """Example with two annuli; *double* also splits ``psi`` into winding regions."""
    geometry = twist1_geometry(params)
    phi, psi = twist1_maps(params)
    r = params.r
    h = winding_regions(phi, (-r, 0.0), lambda p: params.c1 + params.d1 * np.hypot(p[:, 0] + r, p[:, 1]),
                        geometry.rect_a, geometry.rect_b)
    k = None
    if double:
        k = winding_regions(psi, (r, 0.0), lambda p: params.c2 + params.d2 * np.hypot(p[:, 0] - r, p[:, 1]),
                            geometry.rect_b, geometry.rect_a)
    return TwistSetup(phi, psi, geometry, h, k)


def twist2_setup(params: Twist2Params) -> TwistSetup:
    geometry = twist2_geometry(params)
    phi, psi = twist2_maps(params)
    h = winding_regions(
        phi, (0.0, 0.0),
        lambda p: params.c1 + params.d1 * ramp(np.hypot(p[:, 0], p[:, 1]), params.p1, params.p2),
        geometry.rect_a, geometry.rect_b,
    )
    return TwistSetup(phi, psi, geometry, h)


def double_twist_params(params: Optional[Twist1Params] = None) -> Twist1Params:
    """Same twist for both maps; the configuration is symmetric under ``z -> -z``."""
    params = params or Twist1Params()
    return Twist1Params(params.r, params.p1, params.p2, params.q1, params.q2,
                        params.c1, params.d1, params.c1, params.d1)
