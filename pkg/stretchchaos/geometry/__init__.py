"""Planar geometry: regions, oriented rectangles, paths and grid masks."""
from .grid import GridMask, grid_cut_check, grid_spanning_continuum
from .paths import Path, sample_test_paths
from .rectangles import (
    OrientedRectangle,
    bisect_roots,
    make_rect_from_arcs,
    make_rect_from_chart,
    make_rect_from_graphs,
)
from .regions import BBox, RegionPredicate

__all__ = [
    "BBox",
    "GridMask",
    "OrientedRectangle",
    "Path",
    "RegionPredicate",
    "bisect_roots",
    "grid_cut_check",
    "grid_spanning_continuum",
    "make_rect_from_arcs",
    "make_rect_from_chart",
    "make_rect_from_graphs",
    "sample_test_paths",
]
