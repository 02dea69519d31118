"""
Exception hierarchy shared by every stretchchaos sub-package.

Library code raises these; only the command line maps them to exit codes.
"""
from __future__ import annotations

from typing import Any, Optional, Sequence, Tuple


class StretchChaosError(Exception):
    """Root of all errors raised by stretchchaos."""


class DomainError(StretchChaosError, ValueError):
    """A map or first integral was evaluated outside its domain."""

    def __init__(self, message: str, point: Optional[Sequence[float]] = None):
        super().__init__(message)
        self.point = None if point is None else tuple(float(c) for c in point)


class GeometryError(StretchChaosError):
    """Invalid or degenerate rectangle, path, region or mask."""


class StretchError(StretchChaosError):
    """Preconditions of a stretching check are violated."""


class RegionOverlapError(StretchError):
    """Two regions that must be disjoint share a sampled point."""

    def __init__(self, first: int, second: int, point: Sequence[float]):
        super().__init__(
            f"regions {first} and {second} overlap at ({point[0]:.6g}, {point[1]:.6g})"
        )
        self.labels = (first, second)
        self.point = tuple(float(c) for c in point)


class ConditionError(StretchChaosError):
    """A geometry construction was refused because a parameter condition fails."""

    def __init__(self, condition: str, message: str = ""):
        super().__init__(message or f"condition {condition!r} does not hold")
        self.condition = condition


class IntegrationError(StretchChaosError):
    """An ODE integration stopped before reaching the requested time."""

    def __init__(self, message: str, t_last: float = float("nan"), state: Any = None):
        super().__init__(message)
        self.t_last = t_last
        self.state = state


class FlowError(StretchChaosError):
    """Periods, rotation numbers or annuli could not be computed."""


class SymbolicDynamicsError(StretchChaosError):
    """Invalid symbol matrix or sequence."""


class MatrixParseError(SymbolicDynamicsError):
    """A matrix file could not be parsed."""


class CoveringError(StretchChaosError):
    """A covering relation required by an itinerary does not hold."""

    def __init__(self, pair: Tuple[int, int], message: str = ""):
        super().__init__(message or f"covering fails between itinerary positions {pair}")
        self.pair = pair


class OrbitNotFound(StretchChaosError):
    """No feasible seed exists for the requested itinerary.

    This is a search outcome, not a claim that no orbit exists.
    """


class ConfigError(StretchChaosError):
    """Configuration file or command-line parameters are unusable."""


class MaskParseError(GeometryError):
    """A PBM mask file could not be parsed."""
