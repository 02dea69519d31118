"""
Discrete cutting property and spanning-continuum extraction on cell grids.

Cells are sub-squares of the unit square; row 0 is the bottom row. The
occupied set is treated as 4-connected and its complement as 8-connected.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path as FilePath
from typing import Callable, Literal, Optional, Union

import numpy as np
from scipy import ndimage

from ..errors import GeometryError, MaskParseError

logger = logging.getLogger(__name__)

Direction = Literal["left_right", "down_up"]

_FOUR = ndimage.generate_binary_structure(2, 1)
_EIGHT = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True, eq=False)
class GridMask:
    """Boolean occupancy over a ``width x height`` grid of unit-square cells."""

    width: int
    height: int
    cells: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise GeometryError(f"grid must be non-empty, got {self.width}x{self.height}")
        cells = np.asarray(self.cells, dtype=bool)
        if cells.shape != (self.height, self.width):
            raise GeometryError(
                f"cells shape {cells.shape} does not match {self.height}x{self.width}"
            )
        cells = cells.copy()
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    # ------------------------------------------------------------------ #
    # Constructors
    # ------------------------------------------------------------------ #
    @classmethod
    def from_array(cls, cells) -> "GridMask":
        arr = np.asarray(cells, dtype=bool)
        if arr.ndim != 2:
            raise GeometryError(f"expected a 2D array, got shape {arr.shape}")
        return cls(arr.shape[1], arr.shape[0], arr)

    @classmethod
    def full(cls, width: int, height: int) -> "GridMask":
        return cls(width, height, np.ones((height, width), dtype=bool))

    @classmethod
    def empty(cls, width: int, height: int) -> "GridMask":
        return cls(width, height, np.zeros((height, width), dtype=bool))

    @classmethod
    def from_predicate(cls, predicate: Callable[[np.ndarray], np.ndarray],
                       width: int, height: int) -> "GridMask":
        """Occupy each cell whose centre ``(u, v)`` satisfies *predicate*."""
        centres = cls.cell_centres(width, height)
        hits = np.asarray(predicate(centres), dtype=bool).reshape(height, width)
        return cls(width, height, hits)

    @classmethod
    def from_rect(cls, rect, region, width: int, height: int) -> "GridMask":
        """Pull *region* back to the unit square through ``rect.param``."""
        centres = cls.cell_centres(width, height)
        points = rect.param(centres[:, 0], centres[:, 1])
        ok = np.isfinite(points).all(axis=1)
        hits = np.zeros(len(points), dtype=bool)
        if ok.any():
            hits[ok] = region.contains(points[ok])
        return cls(width, height, hits.reshape(height, width))

    @staticmethod
    def cell_centres(width: int, height: int) -> np.ndarray:
        us = (np.arange(width) + 0.5) / width
        vs = (np.arange(height) + 0.5) / height
        gu, gv = np.meshgrid(us, vs)
        return np.column_stack([gu.ravel(), gv.ravel()])

    # ------------------------------------------------------------------ #
    # Views
    # ------------------------------------------------------------------ #
    @property
    def count(self) -> int:
        return int(self.cells.sum())

    def transposed(self) -> "GridMask":
        """Swap the roles of columns and rows (down/up becomes left/right)."""
        return GridMask(self.height, self.width, self.cells.T)

    def complement(self) -> "GridMask":
        return GridMask(self.width, self.height, ~self.cells)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GridMask):
            return NotImplemented
        return self.cells.shape == other.cells.shape and bool((self.cells == other.cells).all())

    def __hash__(self) -> int:
        return hash((self.width, self.height, self.cells.tobytes()))

    # ------------------------------------------------------------------ #
    # PBM (P1) text I/O
    # ------------------------------------------------------------------ #
    def to_pbm(self) -> str:
        lines = ["P1", f"{self.width} {self.height}"]
        for row in self.cells[::-1]:
            lines.append(" ".join("1" if c else "0" for c in row))
        return "\n".join(lines) + "\n"

    def write_pbm(self, path: Union[str, FilePath]) -> FilePath:
        path = FilePath(path)
        path.write_text(self.to_pbm(), encoding="ascii")
        return path

    @classmethod
    def from_pbm(cls, text: str) -> "GridMask":
        tokens = []
        for line in text.splitlines():
            line = line.split("#", 1)[0]
            tokens.extend(line.split())
        if not tokens or tokens[0] != "P1":
            raise MaskParseError("missing P1 magic number")
        try:
            width, height = int(tokens[1]), int(tokens[2])
        except (IndexError, ValueError) as exc:
            raise MaskParseError("missing or non-integer PBM dimensions") from exc
        if width < 1 or height < 1:
            raise MaskParseError(f"invalid PBM dimensions {width}x{height}")
        # P1 allows pixel digits without separators.
        digits = "".join(tokens[3:])
        if set(digits) - {"0", "1"}:
            raise MaskParseError("PBM raster may only contain 0 and 1")
        if len(digits) != width * height:
            raise MaskParseError(
                f"expected {width * height} pixels, found {len(digits)}"
            )
        raster = np.frombuffer(digits.encode("ascii"), dtype=np.uint8) == ord("1")
        return cls(width, height, raster.reshape(height, width)[::-1])

    @classmethod
    def read_pbm(cls, path: Union[str, FilePath]) -> "GridMask":
        path = FilePath(path)
        try:
            text = path.read_text(encoding="ascii")
        except (OSError, UnicodeDecodeError) as exc:
            raise MaskParseError(f"{path} cannot be read as a plain PBM file: {exc}") from exc
        return cls.from_pbm(text)


def grid_cut_check(mask: GridMask, direction: Direction = "left_right") -> bool:
    """True iff the occupied cells cut every arc between the two chosen edges.

    Equivalently, no 8-connected corridor of empty cells joins the left and
    right columns (bottom and top rows for ``down_up``).
    """
    if direction == "down_up":
        mask = mask.transposed()
    elif direction != "left_right":
        raise ValueError(f"unknown direction {direction!r}")
    free = ~mask.cells
    if not free.any():
        return True
    labels, _ = ndimage.label(free, structure=_EIGHT)
    left = set(np.unique(labels[:, 0])) - {0}
    right = set(np.unique(labels[:, -1])) - {0}
    return not (left & right)


def grid_spanning_continuum(mask: GridMask) -> Optional[GridMask]:
    """Return a 4-connected occupied component touching bottom and top rows, if any."""
    if not mask.cells.any():
        return None
    labels, count = ndimage.label(mask.cells, structure=_FOUR)
    bottom = set(np.unique(labels[0])) - {0}
    top = set(np.unique(labels[-1])) - {0}
    spanning = sorted(bottom & top)
    logger.debug("%d occupied components, %d spanning", count, len(spanning))
    if not spanning:
        return None
    return GridMask(mask.width, mask.height, labels == spanning[0])
