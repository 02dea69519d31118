"""Report and plot-data writers."""

from .base import SCHEMA, BaseExporter
from .csv_exporter import (
    BOUNDARY_HEADER,
    ITERATE_HEADER,
    PATH_HEADER,
    POINTS_HEADER,
    TRAJECTORY_HEADER,
    CSVExporter,
    boundary_rows,
    iterate_rows,
    region_rows,
)
from .gnuplot_exporter import GnuplotExporter
from .json_exporter import JSONExporter, dumps, to_jsonable

__all__ = [
    'BOUNDARY_HEADER',
    'ITERATE_HEADER',
    'PATH_HEADER',
    'POINTS_HEADER',
    'SCHEMA',
    'TRAJECTORY_HEADER',
    'BaseExporter',
    'CSVExporter',
    'GnuplotExporter',
    'JSONExporter',
    'boundary_rows',
    'dumps',
    'iterate_rows',
    'region_rows',
    'to_jsonable',
]
