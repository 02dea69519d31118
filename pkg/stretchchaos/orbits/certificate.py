"""
Chaos certificates: a stretching report plus the periodic points it promises.

When every region passes, each primitive cyclic itinerary up to
``max_period`` is handed to a periodic-point finder. Finder failures are
recorded in the certificate; they never assert that the orbit is absent.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import CoveringError, OrbitNotFound, StretchChaosError
from ..geometry import OrientedRectangle, Path, RegionPredicate
from ..models.base import IntervalMap, PlanarMap
from ..stretching import StretchReport, check_stretch
from ..symdyn import SymbolMatrix, SymbolSequence, lyndon_words, perron_eigenvalue
from ..utils import parallel_map
from .covering import covering_periodic_point_1d
from .newton import NewtonSettings, newton_periodic_point_2d
from .results import PeriodicOrbitResult

logger = logging.getLogger(__name__)

Interval = Tuple[float, float]


@dataclass
class ChaosCertificate:
    map_id: str
    stretch: StretchReport
    max_period: int
    orbits: List[PeriodicOrbitResult] = field(default_factory=list)
    failures: List[Dict[str, Any]] = field(default_factory=list)
    matrix: Optional[SymbolMatrix] = None
    entropy: Optional[float] = None
    iterate_power: int = 1
    settings: Dict[str, Any] = field(default_factory=dict)

    @property
    def symbols(self) -> int:
        return len(self.stretch.regions)

    @property
    def duplicates(self) -> List[str]:
        return [o.word for o in self.orbits if o.duplicate_of is not None]

    @property
    def passed(self) -> bool:
        return (self.stretch.passed and not self.failures
                and all(o.itinerary_verified for o in self.orbits))

    @property
    def status(self) -> str:
        if self.stretch.status != "pass":
            return self.stretch.status
        return "pass" if self.passed else "inconclusive"

    def orbit_rows(self) -> List[tuple]:
        return [o.to_row() for o in self.orbits]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "map_id": self.map_id,
            "status": self.status,
            "symbols": self.symbols,
            "chaos_claim": self.passed and self.symbols > 1,
            "max_period": self.max_period,
            "stretch": self.stretch.to_dict(),
            "orbits": [o.to_dict() for o in self.orbits],
            "failures": list(self.failures),
            "duplicates": self.duplicates,
            "transition_matrix": None if self.matrix is None else self.matrix.entries.tolist(),
            "entropy_lower_bound": self.entropy,
            "iterate_power": self.iterate_power,
            "settings": dict(self.settings),
        }


def primitive_itineraries(m: int, max_period: int) -> List[SymbolSequence]:
    """Lyndon words over ``m`` symbols, shortest first."""
    words = sorted(lyndon_words(m, max_period), key=lambda w: (len(w), w))
    return [SymbolSequence(w, max(m, 2), periodic=True) for w in words]


def flag_duplicates(orbits: Sequence[PeriodicOrbitResult], tol: float) -> int:
    """Mark orbits of equal period whose points are within ``10 * tol`` of an earlier one."""
    count = 0
    for j, later in enumerate(orbits):
        for earlier in orbits[:j]:
            if earlier.k != later.k or earlier.duplicate_of is not None:
                continue
            # compare against the whole earlier orbit, since its rotations are the same cycle
            gap = min(float(np.abs(np.subtract(p, later.point)).max()) for p in earlier.orbit)
            if gap <= 10 * tol:
                later.duplicate_of = earlier.word
                count += 1
                logger.warning("orbit for %s duplicates %s (gap %.3g)", later.word, earlier.word, gap)
                break
    return count


def chaos_certificate(
    mapping: PlanarMap,
    rect_a: OrientedRectangle,
    regions: Sequence[RegionPredicate],
    max_period: int,
    paths: Sequence[Path],
    tol: Optional[float] = None,
    rect_b: Optional[OrientedRectangle] = None,
    report: Optional[StretchReport] = None,
    interval_map: Optional[IntervalMap] = None,
    intervals: Optional[Sequence[Interval]] = None,
    orbit_tol: Optional[float] = None,
    iterate_power: int = 1,
    newton: Optional[NewtonSettings] = None,
    membership: Optional[float] = None,
    seed: Optional[int] = None,
    workers: Optional[int] = None,
    show_progress: bool = False,
) -> ChaosCertificate:
    """Stretch check, then one periodic point per primitive itinerary.

    With *interval_map* and *intervals* the covering finder is used (the
    planar map is then the embedding of the interval map); otherwise the
    subdivision-seeded Newton finder configured by *newton*. A precomputed
    *report* (for instance from ``check_composition``) skips the stretch
    check. The entropy bound is ``log m / iterate_power``.
    """
    rect_b = rect_b or rect_a
    if report is None:
        report = check_stretch(mapping, rect_a, rect_b, regions, paths, tol, seed=seed,
                               membership=membership)
    one_dim = interval_map is not None and intervals is not None
    orbit_tol = orbit_tol if orbit_tol is not None else (1e-12 if one_dim else 1e-9)
    settings: Dict[str, Any] = {
        "finder": "covering_1d" if one_dim else "newton_2d",
        "orbit_tol": orbit_tol,
        "max_period": max_period,
    }
    if not one_dim:
        newton = newton or NewtonSettings()
        settings.update(newton.to_dict())
    certificate = ChaosCertificate(report.map_id, report, max_period, iterate_power=iterate_power,
                                   settings=settings)
    if not report.passed:
        logger.info("%s: stretching %s; no orbit search", report.map_id, report.status)
        return certificate

    m = len(regions)
    words = primitive_itineraries(m, max_period)

    def find(word: SymbolSequence):
        try:
            if one_dim:
                return covering_periodic_point_1d(interval_map, intervals, word, orbit_tol)
            return newton_periodic_point_2d(mapping, regions, word, newton, orbit_tol)
        except (CoveringError, OrbitNotFound) as exc:
            return exc
        except StretchChaosError as exc:
            logger.warning("%s: search for %s failed: %s", report.map_id, word, exc)
            return exc

    n_workers = workers if mapping.parallel_safe else 1
    outcomes = parallel_map(find, words, workers=n_workers, desc="orbits", show_progress=show_progress)
    for word, outcome in zip(words, outcomes):
        if isinstance(outcome, PeriodicOrbitResult):
            certificate.orbits.append(outcome)
            continue
        failure: Dict[str, Any] = {"itinerary": str(word), "error": type(outcome).__name__,
                                   "message": str(outcome)}
        if isinstance(outcome, CoveringError):
            failure["pair"] = list(outcome.pair)
        certificate.failures.append(failure)

    flag_duplicates(certificate.orbits, orbit_tol)
    certificate.matrix = SymbolMatrix.full(m)
    certificate.entropy = perron_eigenvalue(certificate.matrix).entropy / iterate_power
    logger.info("%s: %d of %d itineraries realized up to period %d; entropy bound %.12g",
                report.map_id, sum(o.itinerary_verified for o in certificate.orbits), len(words),
                max_period, certificate.entropy)
    return certificate
