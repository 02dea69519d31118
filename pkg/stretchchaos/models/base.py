"""
Base classes for planar maps.

Every map evaluates batches of points through ``evaluate`` and marks points
outside its domain with NaN rows; calling a map on a single point raises
``DomainError`` instead.
"""
from abc import ABC, abstractmethod
from typing import Callable, Optional, Sequence
import logging

import numpy as np

from ..errors import DomainError
from ..geometry.regions import as_points

logger = logging.getLogger(__name__)

VectorFn = Callable[[np.ndarray], np.ndarray]


class PlanarMap(ABC):
    """Abstract base class for maps of the plane."""

    #: maps backed by shared integrators set this to False
    parallel_safe: bool = True

    def __init__(self, map_id: str):
        """
        Initialize the map.

        Args:
            map_id: Identifier written into reports
        """
        self.map_id = map_id

    @abstractmethod
    def _evaluate(self, points: np.ndarray) -> np.ndarray:
        """
        Evaluate the map on an ``(N, 2)`` array.

        Returns:
            ``(N, 2)`` array of images, NaN rows where undefined

        Raises:
            NotImplementedError: If not implemented by subclass
        """
        raise NotImplementedError("Subclasses must implement _evaluate()")

    def evaluate(self, points) -> np.ndarray:
        pts, _ = as_points(points)
        out = np.array(self._evaluate(pts), dtype=float).reshape(-1, 2)
        bad = ~np.isfinite(pts).all(axis=1)
        if bad.any():
            out[bad] = np.nan
        return out

    def __call__(self, point: Sequence[float]) -> np.ndarray:
        image = self.evaluate(np.asarray(point, dtype=float).reshape(1, 2))[0]
        if not np.isfinite(image).all():
            raise DomainError(f"{self.map_id} is undefined at {tuple(point)}", point)
        return image

    def iterate(self, points, k: int) -> np.ndarray:
        """Apply the map *k* times."""
        out, _ = as_points(points)
        for _ in range(k):
            out = self.evaluate(out)
        return out

    def then(self, other: "PlanarMap", map_id: Optional[str] = None) -> "ComposedMap":
        """``other after self``."""
        return ComposedMap([self, other], map_id)

    def power(self, k: int) -> "PlanarMap":
        if k == 1:
            return self
        return ComposedMap([self] * k, f"{self.map_id}^{k}")

    def __str__(self) -> str:
        return f"{self.__class__.__name__}({self.map_id})"

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(map_id={self.map_id!r})"


class FunctionMap(PlanarMap):
    """A planar map from a vectorized ``(N, 2) -> (N, 2)`` function."""

    def __init__(self, fn: VectorFn, map_id: str, parallel_safe: bool = True):
        super().__init__(map_id)
        self.fn = fn
        self.parallel_safe = parallel_safe

    def _evaluate(self, points: np.ndarray) -> np.ndarray:
        with np.errstate(all="ignore"):
            return self.fn(points)


class ComposedMap(PlanarMap):
    """Composition applying ``maps[0]`` first."""

    def __init__(self, maps: Sequence[PlanarMap], map_id: Optional[str] = None):
        if not maps:
            raise ValueError("composition of no maps")
        super().__init__(map_id or "∘".join(m.map_id for m in reversed(maps)))
        self.maps = list(maps)
        self.parallel_safe = all(m.parallel_safe for m in maps)

    def _evaluate(self, points: np.ndarray) -> np.ndarray:
        out = points
        for m in self.maps:
            out = m.evaluate(out)
        return out


class IntervalMap:
    """A map of an interval ``[lo, hi]`` into the line, with its planar embedding."""

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, map_id: str):
        self.fn = fn
        self.lo = lo
        self.hi = hi
        self.map_id = map_id

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            out = np.asarray(self.fn(x), dtype=float)
        return np.where((x >= self.lo) & (x <= self.hi), out, np.nan)

    def scalar(self, x: float) -> float:
        value = float(self(np.array([x]))[0])
        if not np.isfinite(value):
            raise DomainError(f"{self.map_id} is undefined at {x}", (x, 0.0))
        return value

    def iterate(self, x, k: int):
        out = np.asarray(x, dtype=float)
        for _ in range(k):
            out = self(out)
        return out

    def power(self, k: int) -> "IntervalMap":
        base = self
        return IntervalMap(lambda x: base.iterate(x, k), self.lo, self.hi, f"{self.map_id}^{k}")

    def embedded(self) -> PlanarMap:
        """The planar map ``(x, y) -> (f(x), y)``."""
        f = self
        return FunctionMap(lambda p: np.column_stack([f(p[:, 0]), p[:, 1]]), f"{self.map_id}x1")

    def __repr__(self) -> str:
        return f"IntervalMap({self.map_id!r}, [{self.lo}, {self.hi}])"
