"""
Result records for periodic-point searches.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from ..symdyn import SymbolSequence

#: ``covering_1d`` or ``newton_2d``
METHODS = ("covering_1d", "newton_2d")

ORBIT_CSV_HEADER = ("itinerary", "k", "x", "y", "residual")


@dataclass
class PeriodicOrbitResult:
    """A point realizing a cyclic itinerary, with the evidence for it.

    ``point`` has one coordinate for interval maps and two for planar maps.
    ``orbit`` lists the iterates ``w, psi(w), ..., psi^(k-1)(w)``.
    """

    itinerary: SymbolSequence
    point: Tuple[float, ...]
    residual: float
    itinerary_verified: bool
    method: str
    orbit: List[Tuple[float, ...]] = field(default_factory=list)
    interval: Optional[Tuple[float, float]] = None
    iterations: int = 0
    seeds: int = 0
    duplicate_of: Optional[str] = None

    @property
    def k(self) -> int:
        return len(self.itinerary)

    @property
    def word(self) -> str:
        return str(self.itinerary)

    def to_row(self) -> tuple:
        x = self.point[0]
        y = self.point[1] if len(self.point) > 1 else ""
        return (self.word, self.k, x, y, self.residual)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "itinerary": self.word,
            "k": self.k,
            "point": list(self.point),
            "residual": self.residual,
            "itinerary_verified": self.itinerary_verified,
            "method": self.method,
            "orbit": [list(p) for p in self.orbit],
            "iterations": self.iterations,
        }
        if self.interval is not None:
            out["interval"] = list(self.interval)
        if self.seeds:
            out["seeds"] = self.seeds
        if self.duplicate_of is not None:
            out["duplicate_of"] = self.duplicate_of
        return out
