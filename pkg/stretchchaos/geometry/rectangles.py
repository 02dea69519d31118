"""
Oriented rectangles: parameterized images of the unit square with two
designated boundary arcs (``side_left`` and ``side_right``) playing the role
of the left and right edges.

Sides are parameter images, not polylines: ``side_distance`` uses the sampled
polyline as a prefilter and refines near a side on the exact curve.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Literal, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.spatial import cKDTree

from ..errors import GeometryError
from .regions import BBox, RegionPredicate, as_points

logger = logging.getLogger(__name__)

ParamFn = Callable[[np.ndarray, np.ndarray], np.ndarray]
Side = Literal["left", "right", "down", "up"]

MEMBERSHIP_EPS = 1e-12
CHART_EPS = 1e-10


def bisect_roots(fn: Callable[[np.ndarray], np.ndarray], lo, hi,
                 xtol: float = 1e-15, max_iter: int = 200) -> np.ndarray:
    """Vectorized bisection for roots of *fn* bracketed elementwise by ``[lo, hi]``.

    Entries without a sign change come back as NaN.
    """
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    f_lo = np.asarray(fn(lo), dtype=float)
    f_hi = np.asarray(fn(hi), dtype=float)
    bad = ~(np.isfinite(f_lo) & np.isfinite(f_hi)) | (np.sign(f_lo) * np.sign(f_hi) > 0)
    for _ in range(max_iter):
        width = np.abs(hi - lo)
        if np.all((width <= xtol * np.maximum(1.0, np.abs(lo))) | bad):
            break
        mid = 0.5 * (lo + hi)
        f_mid = np.asarray(fn(mid), dtype=float)
        go_right = np.sign(f_mid) == np.sign(f_lo)
        lo = np.where(go_right, mid, lo)
        f_lo = np.where(go_right, f_mid, f_lo)
        hi = np.where(go_right, hi, mid)
    root = 0.5 * (lo + hi)
    root[bad] = np.nan
    return root


def _segment_distance(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Distance from each point to segment ``[a_i, b_i]`` and the clamped parameter."""
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    denom = np.where(denom > 0, denom, 1.0)
    s = np.clip(np.einsum("ij,ij->i", points - a, ab) / denom, 0.0, 1.0)
    foot = a + s[:, None] * ab
    return np.linalg.norm(points - foot, axis=1), s


@dataclass(frozen=True, eq=False)
class OrientedRectangle:
    """A generalized rectangle ``param([0,1]^2)`` with left/right sides at ``u = 0, 1``.

    Args:
        param_fn: vectorized ``(u, v) -> (N, 2)`` parameterization of the rectangle
        contains_fn: vectorized membership predicate on ``(N, 2)`` points
        bbox: axis-aligned bounds of the rectangle
        name: identifier used in reports
        n_boundary: number of samples per side polyline
        orientation: free-form description of the side convention, recorded in reports
    """

    param_fn: ParamFn
    contains_fn: Callable[[np.ndarray], np.ndarray]
    bbox: BBox
    name: str = "rect"
    n_boundary: int = 256
    orientation: str = "u"

    # ------------------------------------------------------------------ #
    # Parameterization and membership
    # ------------------------------------------------------------------ #
    def param(self, u, v) -> np.ndarray:
        u, v = np.broadcast_arrays(np.atleast_1d(np.asarray(u, dtype=float)),
                                   np.atleast_1d(np.asarray(v, dtype=float)))
        return np.asarray(self.param_fn(u.ravel(), v.ravel()), dtype=float).reshape(-1, 2)

    def contains(self, points):
        pts, single = as_points(points)
        inside = self.bbox.expanded(CHART_EPS * self.bbox.scale).contains(pts)
        if inside.any():
            idx = np.flatnonzero(inside)
            inside = inside.copy()
            inside[idx] = np.asarray(self.contains_fn(pts[idx]), dtype=bool).reshape(-1)
        return bool(inside[0]) if single else inside

    def region(self, label: int = 0, name: Optional[str] = None) -> RegionPredicate:
        """The whole rectangle as a labelled region."""
        return RegionPredicate(self.contains, self.bbox, label, name or self.name)

    @property
    def diameter(self) -> float:
        return self.bbox.diameter

    # ------------------------------------------------------------------ #
    # Sides
    # ------------------------------------------------------------------ #
    def side_param(self, side: Side, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if side == "left":
            return self.param(np.zeros_like(s), s)
        if side == "right":
            return self.param(np.ones_like(s), s)
        if side == "down":
            return self.param(s, np.zeros_like(s))
        if side == "up":
            return self.param(s, np.ones_like(s))
        raise ValueError(f"unknown side {side!r}")

    @cached_property
    def _side_grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_boundary)

    @cached_property
    def side_left(self) -> np.ndarray:
        return self.side_param("left", self._side_grid)

    @cached_property
    def side_right(self) -> np.ndarray:
        return self.side_param("right", self._side_grid)

    @cached_property
    def side_down(self) -> np.ndarray:
        return self.side_param("down", self._side_grid)

    @cached_property
    def side_up(self) -> np.ndarray:
        return self.side_param("up", self._side_grid)

    def side_samples(self, side: Side) -> np.ndarray:
        return {"left": self.side_left, "right": self.side_right,
                "down": self.side_down, "up": self.side_up}[side]

    @cached_property
    def _side_trees(self) -> dict:
        return {side: cKDTree(self.side_samples(side)) for side in ("left", "right", "down", "up")}

    def boundary(self) -> np.ndarray:
        """Closed counter-clockwise contour: down, right, reversed up, reversed left."""
        return np.vstack([
            self.side_down,
            self.side_right[1:],
            self.side_up[::-1][1:],
            self.side_left[::-1][1:],
        ])

    def side_distance(self, points, side: Side, refine_within: Optional[float] = None) -> np.ndarray:
        """Distance from each point to the exact side curve.

        Points farther than *refine_within* (default ``1e-3 * diameter``) from
        the side polyline keep the polyline distance.
        """
        pts, _ = as_points(points)
        samples = self.side_samples(side)
        grid = self._side_grid
        n = len(samples)
        dist = np.full(len(pts), np.inf)
        s_best = np.zeros(len(pts))
        finite = np.isfinite(pts).all(axis=1)
        if not finite.any():
            return dist
        fp = pts[finite]
        _, nearest = self._side_trees[side].query(fp)
        best = np.full(len(fp), np.inf)
        best_s = np.zeros(len(fp))
        for offset in (-1, 0):
            i0 = np.clip(nearest + offset, 0, n - 2)
            d, s = _segment_distance(fp, samples[i0], samples[i0 + 1])
            better = d < best
            best = np.where(better, d, best)
            best_s = np.where(better, grid[i0] + s * (grid[i0 + 1] - grid[i0]), best_s)
        dist[finite] = best
        s_best[finite] = best_s

        band = 1e-3 * self.diameter if refine_within is None else refine_within
        step = grid[1] - grid[0]
        for idx in np.flatnonzero(finite & (dist <= band)):
            target = pts[idx]
            lo = max(0.0, s_best[idx] - step)
            hi = min(1.0, s_best[idx] + step)

            def gap(s, target=target):
                return float(np.linalg.norm(self.side_param(side, s)[0] - target))

            res = minimize_scalar(gap, bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-13})
            dist[idx] = min(dist[idx], float(res.fun), gap(lo), gap(hi))
        return dist

    # ------------------------------------------------------------------ #
    # Orientation and validation
    # ------------------------------------------------------------------ #
    def reoriented(self, name: Optional[str] = None) -> "OrientedRectangle":
        """Same set, with the down/up arcs promoted to the designated sides."""
        fn = self.param_fn
        return OrientedRectangle(
            lambda u, v: fn(v, u),
            self.contains_fn,
            self.bbox,
            name or f"{self.name}~",
            self.n_boundary,
            f"reoriented({self.orientation})",
        )

    def validate(self, strict: bool = False, n_interior: int = 33) -> "OrientedRectangle":
        """Check side disjointness and membership; *strict* adds contour injectivity."""
        tol = MEMBERSHIP_EPS * self.bbox.scale
        left, right = self.side_left, self.side_right
        if not (np.isfinite(left).all() and np.isfinite(right).all()):
            raise GeometryError(f"{self.name}: side parameterization leaves its domain")
        gap, _ = cKDTree(left).query(right)
        if gap.min() <= tol:
            raise GeometryError(f"{self.name}: left and right sides intersect")
        us, vs = np.meshgrid(np.linspace(0, 1, n_interior), np.linspace(0, 1, n_interior))
        interior = self.param(us.ravel(), vs.ravel())
        outside = ~self.contains(interior)
        if outside.any():
            bad = interior[np.flatnonzero(outside)[0]]
            raise GeometryError(
                f"{self.name}: parameter image ({bad[0]:.6g}, {bad[1]:.6g}) fails membership"
            )
        if strict:
            contour = self.boundary()[:-1]
            pairs = cKDTree(contour).query_pairs(tol)
            if pairs:
                raise GeometryError(f"{self.name}: contour is not injective at sample resolution")
        return self

    def to_dict(self) -> dict:
        return {"name": self.name, "orientation": self.orientation, "bbox": self.bbox.to_dict()}


# --------------------------------------------------------------------------- #
# Constructors
# --------------------------------------------------------------------------- #
def make_rect_from_graphs(
    lower: Callable[[np.ndarray], np.ndarray],
    upper: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    orientation: Literal["ends", "graphs"] = "ends",
    axis: Literal["x", "y"] = "x",
    name: str = "rect",
    tol: float = 1e-12,
    n_check: int = 1025,
) -> OrientedRectangle:
    """Rectangle between two graphs over ``[lo, hi]``.

    With ``axis="x"`` the region is ``{lo <= x <= hi, lower(x) <= y <= upper(x)}``;
    ``axis="y"`` swaps the coordinates. ``orientation="ends"`` puts the sides on
    the end segments at ``lo`` and ``hi``; ``"graphs"`` puts them on the lower
    and upper graphs.

    Raises:
        GeometryError: when ``lo >= hi``, the graphs cross, or the rectangle is degenerate.
    """
    if not lo < hi:
        raise GeometryError(f"{name}: empty interval [{lo}, {hi}]")
    xs = np.linspace(lo, hi, n_check)
    low = np.asarray(lower(xs), dtype=float) * np.ones_like(xs)
    up = np.asarray(upper(xs), dtype=float) * np.ones_like(xs)
    gap = up - low
    scale = max(1.0, float(np.max(np.abs(np.concatenate([low, up, [lo, hi]])))))
    atol = tol * scale
    if not np.isfinite(gap).all():
        raise GeometryError(f"{name}: graphs are not finite on [{lo}, {hi}]")
    if (gap < -atol).any():
        raise GeometryError(f"{name}: lower graph exceeds upper graph")
    thin = gap <= atol
    if (thin[0] and thin[-1]) or (thin[:-1] & thin[1:]).any():
        raise GeometryError(f"{name}: degenerate rectangle (graphs coincide)")

    def along(u, v):
        s = lo + u * (hi - lo)
        a = np.asarray(lower(s), dtype=float) * np.ones_like(s)
        b = np.asarray(upper(s), dtype=float) * np.ones_like(s)
        w = a + v * (b - a)
        return np.column_stack([s, w]) if axis == "x" else np.column_stack([w, s])

    if orientation == "ends":
        param_fn = along
    elif orientation == "graphs":
        def param_fn(u, v):
            return along(v, u)
    else:
        raise ValueError(f"unknown orientation {orientation!r}")

    def contains(pts):
        s, w = (pts[:, 0], pts[:, 1]) if axis == "x" else (pts[:, 1], pts[:, 0])
        eps = MEMBERSHIP_EPS * np.maximum(1.0, np.abs(pts).max(axis=1))
        inside = (s >= lo - eps) & (s <= hi + eps)
        sc = np.clip(s, lo, hi)
        a = np.asarray(lower(sc), dtype=float) * np.ones_like(sc)
        b = np.asarray(upper(sc), dtype=float) * np.ones_like(sc)
        return inside & (w >= a - eps) & (w <= b + eps)

    wmin, wmax = float(np.min(low)), float(np.max(up))
    if axis == "x":
        bbox = BBox(lo, hi, wmin, wmax)
    else:
        bbox = BBox(wmin, wmax, lo, hi)
    rect = OrientedRectangle(param_fn, contains, bbox, name, orientation=f"{orientation}:{axis}")
    logger.debug("built %s with bbox %s", name, bbox)
    return rect.validate()


def make_rect_from_chart(
    chart: Callable[[np.ndarray, np.ndarray], np.ndarray],
    coords: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]],
    s_range: Tuple[float, float],
    t_range: Tuple[float, float],
    side_test: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    name: str = "rect",
    swap: bool = False,
    orientation: str = "chart",
    n_bbox: int = 65,
) -> OrientedRectangle:
    """Rectangle given by an exact coordinate chart.

    *chart* maps coordinate arrays ``(s, t)`` to points and *coords* inverts it;
    the rectangle is ``chart([s0, s1] x [t0, t1])``. The left/right sides are
    ``s = s0, s1`` (``t = t0, t1`` when *swap*). *side_test* selects the sheet
    of the chart when *coords* is many-to-one.
    """
    (s0, s1), (t0, t1) = s_range, t_range
    if not (s0 < s1 and t0 < t1):
        raise GeometryError(f"{name}: empty chart ranges {s_range} x {t_range}")

    def param_fn(u, v):
        if swap:
            u, v = v, u
        return np.asarray(chart(s0 + u * (s1 - s0), t0 + v * (t1 - t0)), dtype=float)

    s_eps = CHART_EPS * max(1.0, abs(s0), abs(s1))
    t_eps = CHART_EPS * max(1.0, abs(t0), abs(t1))

    def contains(pts):
        s, t = coords(pts)
        inside = (s >= s0 - s_eps) & (s <= s1 + s_eps) & (t >= t0 - t_eps) & (t <= t1 + t_eps)
        if side_test is not None:
            inside &= np.asarray(side_test(pts), dtype=bool)
        return inside

    us, vs = np.meshgrid(np.linspace(0, 1, n_bbox), np.linspace(0, 1, n_bbox))
    samples = param_fn(us.ravel(), vs.ravel())
    if not np.isfinite(samples).all():
        raise GeometryError(f"{name}: chart is undefined on part of its coordinate box")
    bbox = BBox.of_points(samples)
    # Curved sides may bulge between samples; the bbox only needs to be an over-estimate.
    pad = 0.02 * bbox.diameter
    rect = OrientedRectangle(param_fn, contains, bbox.expanded(pad), name, orientation=orientation)
    return rect.validate()


def make_rect_from_arcs(
    left: Callable[[np.ndarray], np.ndarray],
    right: Callable[[np.ndarray], np.ndarray],
    down: Callable[[np.ndarray], np.ndarray],
    up: Callable[[np.ndarray], np.ndarray],
    contains_fn: Callable[[np.ndarray], np.ndarray],
    name: str = "rect",
    n_bbox: int = 65,
) -> OrientedRectangle:
    """Corner-anchored transfinite interpolation between four boundary arcs.

    Each arc maps ``s in [0, 1]`` to ``(N, 2)`` points; ``left``/``right`` run
    from ``down`` to ``up`` and ``down``/``up`` run from ``left`` to ``right``.
    Membership comes from *contains_fn*, not from the interpolation.
    """
    corners = np.vstack([left(np.array([0.0])), right(np.array([0.0])),
                         left(np.array([1.0])), right(np.array([1.0]))])
    ends = np.vstack([down(np.array([0.0])), down(np.array([1.0])),
                      up(np.array([0.0])), up(np.array([1.0]))])
    scale = max(1.0, float(np.abs(corners).max()))
    if np.abs(corners - ends).max() > 1e-9 * scale:
        raise GeometryError(f"{name}: boundary arcs do not meet at the corners")
    c00, c10, c01, c11 = corners

    def param_fn(u, v):
        uu, vv = u[:, None], v[:, None]
        return (
            (1 - vv) * down(u) + vv * up(u) + (1 - uu) * left(v) + uu * right(v)
            - ((1 - uu) * (1 - vv) * c00 + uu * (1 - vv) * c10
               + (1 - uu) * vv * c01 + uu * vv * c11)
        )

    us, vs = np.meshgrid(np.linspace(0, 1, n_bbox), np.linspace(0, 1, n_bbox))
    bbox = BBox.of_points(param_fn(us.ravel(), vs.ravel()))
    rect = OrientedRectangle(param_fn, contains_fn, bbox.expanded(0.02 * bbox.diameter), name,
                             orientation="arcs")
    return rect.validate()
