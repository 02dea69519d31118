"""
CSV tables: paths, trajectories, Poincare iterates, orbits and plot outlines.
"""
import csv
import io
import logging
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .base import BaseExporter

logger = logging.getLogger(__name__)

PATH_HEADER = ("t", "x", "y")
TRAJECTORY_HEADER = ("t", "x", "y", "phase", "energy")
ITERATE_HEADER = ("n", "x", "y")
BOUNDARY_HEADER = ("side", "x", "y")
POINTS_HEADER = ("label", "x", "y")


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return int(value)
    return value


class CSVExporter(BaseExporter):
    """Write a header row followed by data rows."""

    suffix = ".csv"

    def __init__(self, header: Sequence[str], rows: Iterable[Sequence], output_path: Optional[Path] = None,
                 name: str = "table"):
        super().__init__(list(rows), output_path, name)
        self.header = tuple(header)

    def validate(self) -> bool:
        bad = [i for i, row in enumerate(self.payload) if len(row) != len(self.header)]
        if bad:
            logger.error("%s: rows %s do not match header %s", self, bad[:5], self.header)
            return False
        return True

    def render(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(self.header)
        for row in self.payload:
            writer.writerow([_cell(v) for v in row])
        return buffer.getvalue()


def iterate_rows(points: np.ndarray) -> list:
    """``(n, x, y)`` rows for an orbit of the Poincare map."""
    return [(n, float(p[0]), float(p[1])) for n, p in enumerate(np.asarray(points, dtype=float))]


def boundary_rows(rect) -> list:
    """The four sides of an oriented rectangle as ``(side, x, y)`` rows."""
    rows = []
    for side in ("left", "down", "right", "up"):
        rows.extend((side, float(x), float(y)) for x, y in rect.side_samples(side))
    return rows


def region_rows(rect, regions, n_grid: int = 96) -> list:
    """Cell centres of a grid over *rect* that fall into each region."""
    grid = rect.bbox.grid(n_grid, n_grid)
    grid = grid[rect.contains(grid)]
    rows = []
    for region in regions:
        inside = grid[region.contains(grid)]
        rows.extend((region.label, float(x), float(y)) for x, y in inside)
    return rows
