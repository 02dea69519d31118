"""
Result records for stretching checks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, Optional, Tuple

Status = Literal["pass", "inconclusive", "fail"]


@dataclass(frozen=True)
class Witness:
    """A subinterval ``[t_start, t_end]`` of a path whose image crosses the target.

    ``entry`` and ``exit`` name the target sides (``"left"``/``"right"``)
    touched by the images of the two endpoints.
    """

    path: int
    t_start: float
    t_end: float
    entry: str
    exit: str
    start_image: Tuple[float, float]
    end_image: Tuple[float, float]
    samples: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "path": self.path,
            "interval": [self.t_start, self.t_end],
            "entry": self.entry,
            "exit": self.exit,
            "start_image": list(self.start_image),
            "end_image": list(self.end_image),
            "samples": self.samples,
        }


@dataclass
class RegionResult:
    label: int
    name: str
    tested: int = 0
    witnesses: List[Witness] = field(default_factory=list)
    inconclusive_paths: List[int] = field(default_factory=list)
    failed_paths: List[int] = field(default_factory=list)

    @property
    def witnessed(self) -> int:
        return len(self.witnesses)

    @property
    def inconclusive(self) -> int:
        return len(self.inconclusive_paths)

    @property
    def passed(self) -> bool:
        return self.tested > 0 and self.witnessed == self.tested

    @property
    def status(self) -> Status:
        if self.passed:
            return "pass"
        if not self.failed_paths and self.inconclusive_paths:
            return "inconclusive"
        return "fail"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "name": self.name,
            "paths_tested": self.tested,
            "paths_witnessed": self.witnessed,
            "paths_inconclusive": self.inconclusive,
            "failed_paths": list(self.failed_paths),
            "inconclusive_paths": list(self.inconclusive_paths),
            "pass": self.passed,
            "status": self.status,
            "witnesses": [w.to_dict() for w in self.witnesses],
        }


@dataclass
class StretchReport:
    """Outcome of checking one map against one family of paths.

    The report never claims the relation for all paths: it records the tested
    family (size and seed) next to the verdict.
    """

    map_id: str
    rect_a: str
    rect_b: str
    regions: List[RegionResult]
    tolerances: Dict[str, float]
    n_paths: int
    seed: Optional[int] = None
    min_region_distance: Optional[float] = None
    orientation: str = ""
    pairs: Optional[Dict[int, Tuple[int, int]]] = None
    warnings: List[str] = field(default_factory=list)

    @property
    def crossing_number(self) -> int:
        return sum(1 for r in self.regions if r.passed)

    @property
    def passed(self) -> bool:
        return bool(self.regions) and all(r.passed for r in self.regions)

    @property
    def status(self) -> Status:
        if self.passed:
            return "pass"
        if all(r.status != "fail" for r in self.regions) and self.regions:
            return "inconclusive"
        return "fail"

    def region(self, label: int) -> RegionResult:
        for r in self.regions:
            if r.label == label:
                return r
        raise KeyError(label)

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "map_id": self.map_id,
            "rect_a": self.rect_a,
            "rect_b": self.rect_b,
            "orientation": self.orientation,
            "status": self.status,
            "crossing_number": self.crossing_number,
            "n_paths": self.n_paths,
            "seed": self.seed,
            "tolerances": dict(self.tolerances),
            "min_region_distance": self.min_region_distance,
            "regions": [r.to_dict() for r in self.regions],
            "warnings": list(self.warnings),
        }
        if self.pairs is not None:
            out["pairs"] = {str(k): list(v) for k, v in sorted(self.pairs.items())}
        return out
