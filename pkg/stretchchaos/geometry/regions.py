"""
Bounding boxes and implicitly defined compact planar regions.

A region is an inequality predicate plus an axis-aligned bounding box. The
box is used for fast rejection and guarantees ``contains(p) is False`` for
every point outside it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Union

import numpy as np

PointsFn = Callable[[np.ndarray], np.ndarray]
ArrayOrBool = Union[bool, np.ndarray]

# Eight unit directions for the ambiguity band test.
_DIRECTIONS = np.array(
    [[math.cos(k * math.pi / 4.0), math.sin(k * math.pi / 4.0)] for k in range(8)]
)


def as_points(points) -> tuple[np.ndarray, bool]:
    """Return ``(array of shape (N, 2), was_single_point)``."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        if arr.shape[0] != 2:
            raise ValueError(f"expected a planar point, got shape {arr.shape}")
        return arr.reshape(1, 2), True
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"expected an (N, 2) array of points, got shape {arr.shape}")
    return arr, False


@dataclass(frozen=True)
class BBox:
    """Axis-aligned bounds ``[xmin, xmax] x [ymin, ymax]``."""

    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self):
        if not (self.xmin <= self.xmax and self.ymin <= self.ymax):
            raise ValueError(f"empty bounding box {self}")

    @classmethod
    def of_points(cls, points: np.ndarray, pad: float = 0.0) -> "BBox":
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        pts = pts[np.isfinite(pts).all(axis=1)]
        if pts.size == 0:
            raise ValueError("cannot bound an empty point set")
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        return cls(lo[0] - pad, hi[0] + pad, lo[1] - pad, hi[1] + pad)

    @property
    def diameter(self) -> float:
        return math.hypot(self.xmax - self.xmin, self.ymax - self.ymin)

    @property
    def scale(self) -> float:
        """Largest absolute coordinate, at least 1 (used for relative slack)."""
        return max(1.0, abs(self.xmin), abs(self.xmax), abs(self.ymin), abs(self.ymax))

    def contains(self, points) -> ArrayOrBool:
        pts, single = as_points(points)
        inside = (
            (pts[:, 0] >= self.xmin)
            & (pts[:, 0] <= self.xmax)
            & (pts[:, 1] >= self.ymin)
            & (pts[:, 1] <= self.ymax)
        )
        return bool(inside[0]) if single else inside

    def expanded(self, pad: float) -> "BBox":
        return BBox(self.xmin - pad, self.xmax + pad, self.ymin - pad, self.ymax + pad)

    def union(self, other: "BBox") -> "BBox":
        return BBox(
            min(self.xmin, other.xmin),
            max(self.xmax, other.xmax),
            min(self.ymin, other.ymin),
            max(self.ymax, other.ymax),
        )

    def intersection(self, other: "BBox") -> Optional["BBox"]:
        xmin, xmax = max(self.xmin, other.xmin), min(self.xmax, other.xmax)
        ymin, ymax = max(self.ymin, other.ymin), min(self.ymax, other.ymax)
        if xmin > xmax or ymin > ymax:
            return None
        return BBox(xmin, xmax, ymin, ymax)

    def grid(self, nx: int, ny: int) -> np.ndarray:
        """Cell-centre grid of ``nx * ny`` points, row-major from the bottom row."""
        xs = self.xmin + (np.arange(nx) + 0.5) * (self.xmax - self.xmin) / nx
        ys = self.ymin + (np.arange(ny) + 0.5) * (self.ymax - self.ymin) / ny
        gx, gy = np.meshgrid(xs, ys)
        return np.column_stack([gx.ravel(), gy.ravel()])

    def to_dict(self) -> dict:
        return {"xmin": self.xmin, "xmax": self.xmax, "ymin": self.ymin, "ymax": self.ymax}


@dataclass(frozen=True)
class RegionPredicate:
    """An implicitly defined compact region with a symbol label.

    Args:
        contains_fn: vectorized predicate mapping an ``(N, 2)`` array to ``N`` booleans
        bbox: bounds outside of which the predicate is never consulted
        label: symbol index carried into itineraries and reports
        name: human readable identifier
    """

    contains_fn: PointsFn
    bbox: BBox
    label: int = 0
    name: str = ""

    def contains(self, points) -> ArrayOrBool:
        pts, single = as_points(points)
        inside = self.bbox.contains(pts)
        if inside.any():
            idx = np.flatnonzero(inside)
            sub = np.asarray(self.contains_fn(pts[idx]), dtype=bool).reshape(-1)
            inside = inside.copy()
            inside[idx] = sub
        return bool(inside[0]) if single else inside

    def near(self, points, eps: float) -> ArrayOrBool:
        """True where the point or one of its eight neighbours at distance *eps* is inside."""
        pts, single = as_points(points)
        hit = self.contains(pts)
        for direction in _DIRECTIONS:
            miss = np.flatnonzero(~hit)
            if miss.size == 0:
                break
            hit[miss] = self.contains(pts[miss] + eps * direction)
        return bool(hit[0]) if single else hit

    def relabel(self, label: int, name: Optional[str] = None) -> "RegionPredicate":
        return RegionPredicate(self.contains_fn, self.bbox, label, self.name if name is None else name)

    def intersect(self, other: "RegionPredicate", label: Optional[int] = None,
                  name: Optional[str] = None) -> "RegionPredicate":
        box = self.bbox.intersection(other.bbox)
        if box is None:
            # Empty intersection; keep a degenerate box that rejects everything useful.
            box = BBox(self.bbox.xmin, self.bbox.xmin, self.bbox.ymin, self.bbox.ymin)
        first, second = self, other
        return RegionPredicate(
            lambda pts: first.contains(pts) & second.contains(pts),
            box,
            self.label if label is None else label,
            name or f"{self.name}&{other.name}",
        )

    def preimage(self, mapping: Callable[[np.ndarray], np.ndarray], target: "RegionPredicate | object",
                 label: Optional[int] = None, name: Optional[str] = None) -> "RegionPredicate":
        """Points of this region whose image under *mapping* lies in *target*.

        *mapping* is a vectorized ``(N, 2) -> (N, 2)`` callable returning NaN rows
        outside its domain; *target* is anything with a vectorized ``contains``.
        """
        base = self

        def _contains(pts: np.ndarray) -> np.ndarray:
            inside = base.contains(pts)
            if inside.any():
                idx = np.flatnonzero(inside)
                images = np.asarray(mapping(pts[idx]), dtype=float)
                ok = np.isfinite(images).all(axis=1)
                hit = np.zeros(idx.size, dtype=bool)
                if ok.any():
                    hit[ok] = target.contains(images[ok])
                inside = inside.copy()
                inside[idx] = hit
            return inside

        return RegionPredicate(
            _contains,
            self.bbox,
            self.label if label is None else label,
            name or f"{self.name}^pre",
        )

    @classmethod
    def box(cls, xmin: float, xmax: float, ymin: float, ymax: float,
            label: int = 0, name: str = "box") -> "RegionPredicate":
        bbox = BBox(xmin, xmax, ymin, ymax)
        return cls(lambda pts: bbox.contains(pts), bbox, label, name)

    @classmethod
    def union_of(cls, regions: Iterable["RegionPredicate"], label: int = 0,
                 name: str = "union") -> "RegionPredicate":
        parts = list(regions)
        if not parts:
            raise ValueError("union of no regions")
        box = parts[0].bbox
        for part in parts[1:]:
            box = box.union(part.bbox)

        def _contains(pts: np.ndarray) -> np.ndarray:
            hit = np.zeros(len(pts), dtype=bool)
            for part in parts:
                hit |= part.contains(pts)
            return hit

        return cls(_contains, box, label, name)
