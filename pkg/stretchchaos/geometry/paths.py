"""
Finitely sampled paths and the test family used by stretching checks.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from ..errors import GeometryError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Path:
    """A sampled curve ``t -> points[t]`` with ``params`` strictly increasing from 0 to 1.

    ``tolerance`` bounds the gap between consecutive points; when omitted it is
    the largest observed gap. ``curve``, when given, is the exact vectorized
    curve the samples were taken from and is used for intermediate parameters.
    """

    params: np.ndarray
    points: np.ndarray
    tolerance: Optional[float] = None
    name: str = ""
    curve: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)

    def __post_init__(self):
        params = np.asarray(self.params, dtype=float).reshape(-1)
        points = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if len(params) < 2:
            raise GeometryError("a path needs at least two samples")
        if len(params) != len(points):
            raise GeometryError(f"{len(params)} params for {len(points)} points")
        if params[0] != 0.0 or params[-1] != 1.0:
            raise GeometryError("path parameters must start at 0 and end at 1")
        if not np.all(np.diff(params) > 0):
            raise GeometryError("path parameters must be strictly increasing")
        gaps = np.linalg.norm(np.diff(points, axis=0), axis=1)
        max_gap = float(gaps.max()) if gaps.size else 0.0
        tolerance = self.tolerance
        if tolerance is None:
            tolerance = max_gap
        elif max_gap > tolerance * (1 + 1e-12):
            raise GeometryError(f"sample gap {max_gap:.3g} exceeds declared tolerance {tolerance:.3g}")
        params.setflags(write=False)
        points.setflags(write=False)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "tolerance", float(tolerance))

    def __len__(self) -> int:
        return len(self.params)

    @property
    def start(self) -> np.ndarray:
        return self.points[0]

    @property
    def end(self) -> np.ndarray:
        return self.points[-1]

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], n_samples: int = 512,
                      name: str = "") -> "Path":
        ts = np.linspace(0.0, 1.0, n_samples)
        return cls(ts, np.asarray(fn(ts), dtype=float), name=name)

    @classmethod
    def segment(cls, start, end, n_samples: int = 512, name: str = "") -> "Path":
        a, b = np.asarray(start, dtype=float), np.asarray(end, dtype=float)
        return cls.from_function(lambda t: a + t[:, None] * (b - a), n_samples, name)

    def at(self, t) -> np.ndarray:
        """Point at parameter *t*: the exact curve if known, else linear interpolation."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if self.curve is not None:
            return np.asarray(self.curve(t), dtype=float).reshape(-1, 2)
        return np.column_stack([
            np.interp(t, self.params, self.points[:, 0]),
            np.interp(t, self.params, self.points[:, 1]),
        ])

    def subpath(self, t0: float, t1: float) -> "Path":
        """Restriction to ``[t0, t1]`` re-parameterized over ``[0, 1]``."""
        if not 0.0 <= t0 < t1 <= 1.0:
            raise GeometryError(f"invalid subinterval [{t0}, {t1}]")
        inner = self.params[(self.params > t0) & (self.params < t1)]
        ts = np.concatenate([[t0], inner, [t1]])
        pts = self.at(ts)
        curve = None
        if self.curve is not None:
            outer = self.curve

            def curve(s):
                return outer(t0 + (t1 - t0) * np.asarray(s, dtype=float))

        return Path((ts - t0) / (t1 - t0), pts, name=f"{self.name}[{t0:.6g},{t1:.6g}]", curve=curve)

    def glue(self, other: "Path") -> "Path":
        """Concatenation ``self * other``; the end of *self* must meet the start of *other*."""
        tol = max(self.tolerance, other.tolerance)
        if np.linalg.norm(self.end - other.start) > tol:
            raise GeometryError("paths do not meet")
        ts = np.concatenate([0.5 * self.params, 0.5 + 0.5 * other.params[1:]])
        pts = np.vstack([self.points, other.points[1:]])
        return Path(ts, pts, name=f"{self.name}*{other.name}")

    def resample(self, n_samples: int) -> "Path":
        ts = np.linspace(0.0, 1.0, n_samples)
        return Path(ts, self.at(ts), name=self.name, curve=self.curve)

    def mapped(self, mapping: Callable[[np.ndarray], np.ndarray], name: Optional[str] = None) -> "Path":
        """Image path under a vectorized map; NaN samples are not allowed."""
        images = np.asarray(mapping(self.points), dtype=float)
        if not np.isfinite(images).all():
            raise GeometryError(f"map is undefined along path {self.name!r}")
        return Path(self.params, images, name=name or f"f({self.name})")

    def to_rows(self) -> List[tuple]:
        return [(float(t), float(x), float(y)) for t, (x, y) in zip(self.params, self.points)]


def _bezier(controls: np.ndarray, t: np.ndarray) -> np.ndarray:
    c0, c1, c2, c3 = controls
    s = 1.0 - t
    return s ** 3 * c0 + 3 * s ** 2 * t * c1 + 3 * s * t ** 2 * c2 + t ** 3 * c3


def sample_test_paths(rect, n_paths: int = 200, n_samples: int = 512, seed: int = 0,
                      max_redraws: int = 100) -> List[Path]:
    """Fibers ``u -> param(u, v)`` plus seeded random monotone Bezier paths.

    The fibers include ``v = 0`` and ``v = 1`` (the down and up arcs) whenever
    more than one fiber is drawn. Random paths use cubic Bezier curves in the
    unit square whose u-controls are sorted, so each path runs from the left
    side to the right side.
    """
    if n_paths < 1 or n_samples < 2:
        raise GeometryError("need n_paths >= 1 and n_samples >= 2")
    n_fibers = n_paths if n_paths <= 3 else max(3, n_paths // 4)
    vs = [0.5] if n_fibers == 1 else list(np.linspace(0.0, 1.0, n_fibers))
    ts = np.linspace(0.0, 1.0, n_samples)

    paths: List[Path] = []
    for i, v in enumerate(vs):
        def fiber(t, v=float(v)):
            t = np.asarray(t, dtype=float)
            return rect.param(t, np.full_like(t, v))

        paths.append(Path(ts, fiber(ts), name=f"fiber{i}", curve=fiber))

    rng = np.random.default_rng(seed)
    redraws = 0
    while len(paths) < n_paths:
        u_ctrl = np.concatenate([[0.0], np.sort(rng.uniform(0.0, 1.0, 2)), [1.0]])
        v_ctrl = rng.uniform(0.0, 1.0, 4)

        def curve(t, u_ctrl=u_ctrl, v_ctrl=v_ctrl):
            t = np.asarray(t, dtype=float)
            u = np.clip(_bezier(u_ctrl, t), 0.0, 1.0)
            v = np.clip(_bezier(v_ctrl, t), 0.0, 1.0)
            return rect.param(u, v)

        pts = curve(ts)
        if not (np.isfinite(pts).all() and rect.contains(pts).all()):
            redraws += 1
            if redraws > max_redraws:
                raise GeometryError(f"{rect.name}: could not draw paths inside the rectangle")
            continue
        paths.append(Path(ts, pts, name=f"bezier{len(paths) - n_fibers}", curve=curve))
    if redraws:
        logger.debug("%s: %d random paths redrawn", rect.name, redraws)
    return paths
