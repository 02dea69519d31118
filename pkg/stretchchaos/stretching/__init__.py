"""Stretching-along-paths checks, crossing counts and composition."""
from .checker import (
    DEFAULT_MEMBERSHIP,
    check_composition,
    check_stretch,
    composite_regions,
    crossing_count,
    crossing_counts,
    default_tolerance,
    replay_witness,
)
from .report import RegionResult, StretchReport, Witness

__all__ = [
    "DEFAULT_MEMBERSHIP",
    "RegionResult",
    "StretchReport",
    "Witness",
    "check_composition",
    "check_stretch",
    "composite_regions",
    "crossing_count",
    "crossing_counts",
    "default_tolerance",
    "replay_witness",
]
