"""
Ready-to-check configurations of the switched systems.

``volterra_setup`` follows the linked-annuli recipe: pick levels above both
minima, verify the linkage, measure the four periods and switch after the
threshold times. ``duffing_setup`` builds the mirror rectangles; switching
times for Duffing are searched for (see ``scans``), not derived.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence

from ..errors import FlowError
from ..geometry import OrientedRectangle
from .annuli import AngleWindows, LinkedAnnuli, angle_windows, duffing_linked_rects, linked_annuli, volterra_windows
from .integrate import ATOL, RTOL, PhaseMap, PoincareMap, integrate
from .periods import minimal_twist_time, orbit_period, reference_point, switching_thresholds
from .systems import (
    DuffingParams,
    DuffingPhase,
    SwitchingSystem,
    VolterraParams,
    VolterraPhase,
    duffing_system,
    volterra_system,
)

logger = logging.getLogger(__name__)

#: switching times are taken this much beyond the thresholds
TIME_MARGIN = 1.01


@dataclass
class VolterraSetup:
    params: VolterraParams
    levels0: tuple
    levels_mu: tuple
    periods0: tuple
    periods_mu: tuple
    alpha: float
    beta: float
    annuli: LinkedAnnuli
    system: SwitchingSystem
    psi0: PhaseMap
    psi_mu: PhaseMap
    windows_h: AngleWindows
    windows_k: AngleWindows
    empirical: Dict[str, Optional[float]] = field(default_factory=dict)

    @property
    def rect1(self) -> OrientedRectangle:
        return self.annuli.rect1

    @property
    def rect2(self) -> OrientedRectangle:
        return self.annuli.rect2

    @property
    def poincare(self) -> PoincareMap:
        return PoincareMap(self.system, self.psi0.rel_tol, self.psi0.abs_tol)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "params": self.params.to_dict(),
            "levels_E0": list(self.levels0),
            "levels_Emu": list(self.levels_mu),
            "periods_E0": list(self.periods0),
            "periods_Emu": list(self.periods_mu),
            "alpha": self.alpha,
            "beta": self.beta,
            "r0": self.params.r0,
            "rmu": self.params.rmu,
            "annuli": self.annuli.to_dict(),
            "windows_H": list(self.windows_h.windings),
            "windows_K": list(self.windows_k.windings),
            "empirical_twist_times": dict(self.empirical),
        }


def volterra_setup(
    params: Optional[VolterraParams] = None,
    m1: int = 2,
    m2: int = 1,
    l_offsets: Sequence[float] = (0.12, 0.5),
    h_offsets: Sequence[float] = (0.15, 0.5),
    auto_times: bool = True,
    empirical: bool = False,
    rel_tol: float = RTOL,
    abs_tol: float = ATOL,
) -> VolterraSetup:
    """Linked configuration of the harvested Volterra system with ``m1`` and ``m2`` windows.

    Levels are ``chi0 + l_offsets`` and ``chimu + h_offsets``. With
    *auto_times* the phase durations become ``1.01 * alpha`` and
    ``1.01 * beta``; otherwise ``params.r0`` and ``params.rmu`` must already
    exceed them.

    Raises:
        FlowError: unlinked annuli, degenerate periods or switching times below the thresholds
    """
    params = params or VolterraParams()
    e0 = VolterraPhase(params, harvested=False)
    emu = VolterraPhase(params, harvested=True)
    l1, l2 = (e0.chi + float(o) for o in l_offsets)
    h1, h2 = (emu.chi + float(o) for o in h_offsets)
    annuli = linked_annuli(params, l1, l2, h1, h2)
    if not annuli.linked:
        raise FlowError(f"annuli E0 in [{l1:.6g}, {l2:.6g}] and Emu in [{h1:.6g}, {h2:.6g}] are not linked")

    periods0 = (orbit_period(e0, l1, rel_tol, abs_tol), orbit_period(e0, l2, rel_tol, abs_tol))
    periods_mu = (orbit_period(emu, h1, rel_tol, abs_tol), orbit_period(emu, h2, rel_tol, abs_tol))
    alpha, beta = switching_thresholds(m1, m2, *periods0, *periods_mu)
    logger.info("Volterra periods E0 %s, Emu %s; thresholds alpha=%.6g beta=%.6g",
                periods0, periods_mu, alpha, beta)
    if auto_times:
        params = params.with_times(TIME_MARGIN * alpha, TIME_MARGIN * beta)
    elif params.r0 <= alpha or params.rmu <= beta:
        raise FlowError(f"switching times r0={params.r0:g}, rmu={params.rmu:g} do not exceed "
                        f"alpha={alpha:g}, beta={beta:g}")
    e0 = VolterraPhase(params, harvested=False)
    emu = VolterraPhase(params, harvested=True)

    times: Dict[str, Optional[float]] = {}
    if empirical:
        for name, phase, levels, m, bound in (("E0", e0, (l1, l2), m1, alpha),
                                              ("Emu", emu, (h1, h2), m2, beta)):
            try:
                times[name] = minimal_twist_time(phase, reference_point(phase, levels[0]),
                                                 reference_point(phase, levels[1]), m, bound,
                                                 rel_tol=rel_tol, abs_tol=abs_tol)
            except FlowError as exc:
                logger.warning("no empirical twist time for %s: %s", name, exc)
                times[name] = None

    psi0 = PhaseMap(e0, params.r0, rel_tol, abs_tol, map_id=f"Psi0(r0={params.r0:.6g})")
    psi_mu = PhaseMap(emu, params.rmu, rel_tol, abs_tol, map_id=f"Psimu(rmu={params.rmu:.6g})")
    windows_h = volterra_windows(psi0, annuli.rect1, annuli.rect2, periods0[1], m1, prefix="H")
    windows_k = volterra_windows(psi_mu, annuli.rect2, annuli.rect1, periods_mu[1], m2,
                                 half_turn=True, prefix="K")
    return VolterraSetup(params, (l1, l2), (h1, h2), periods0, periods_mu, alpha, beta, annuli,
                         volterra_system(params), psi0, psi_mu, windows_h, windows_k, times)


@dataclass
class DuffingSetup:
    """Linked rectangles of the Duffing system, with the phase maps once the times are set.

    ``system``, ``psi_q`` and ``psi_s`` are ``None`` until both switching
    times are positive; the rectangles and levels never depend on them.
    """

    params: DuffingParams
    eq_levels: tuple
    es_levels: tuple
    rect1: OrientedRectangle
    rect2: OrientedRectangle
    system: Optional[SwitchingSystem] = None
    psi_q: Optional[PhaseMap] = None
    psi_s: Optional[PhaseMap] = None

    @property
    def timed(self) -> bool:
        return self.system is not None

    def _require_times(self) -> None:
        if not self.timed:
            raise FlowError(f"switching times rq={self.params.rq:g}, rs={self.params.rs:g} "
                            "must both be positive")

    @property
    def poincare(self) -> PoincareMap:
        self._require_times()
        return PoincareMap(self.system, self.psi_q.rel_tol, self.psi_q.abs_tol)

    def windows(self, target: Optional[OrientedRectangle] = None) -> AngleWindows:
        """Winding regions of the ``Eq`` phase from ``R1`` into ``R2`` (or *target*)."""
        self._require_times()
        return angle_windows(self.psi_q, self.rect1, target or self.rect2, prefix="H")

    def with_times(self, rq: float, rs: float, rel_tol: float = RTOL,
                   abs_tol: float = ATOL) -> "DuffingSetup":
        """Same rectangles with the phase maps for switching times ``(rq, rs)``."""
        params = self.params.with_times(rq, rs)
        psi_q, psi_s, system = _duffing_maps(params, rel_tol, abs_tol)
        return DuffingSetup(params, self.eq_levels, self.es_levels, self.rect1, self.rect2,
                            system, psi_q, psi_s)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "params": self.params.to_dict(),
            "levels_Eq": list(self.eq_levels),
            "levels_Es": list(self.es_levels),
            "rect1": self.rect1.to_dict(),
            "rect2": self.rect2.to_dict(),
        }


def _duffing_maps(params: DuffingParams, rel_tol: float, abs_tol: float):
    if params.rq <= 0 or params.rs <= 0:
        return None, None, None
    psi_q = PhaseMap(DuffingPhase(params, "q"), params.rq, rel_tol, abs_tol,
                     map_id=f"Psiq(rq={params.rq:g})")
    psi_s = PhaseMap(DuffingPhase(params, "s"), params.rs, rel_tol, abs_tol,
                     map_id=f"Psis(rs={params.rs:g})")
    return psi_q, psi_s, duffing_system(params)


def duffing_setup(
    params: Optional[DuffingParams] = None,
    eq_levels: Sequence[float] = (2.0, 2.5),
    es_levels: Sequence[float] = (0.1, 1.9),
    rel_tol: float = RTOL,
    abs_tol: float = ATOL,
) -> DuffingSetup:
    params = params or DuffingParams()
    rect1, rect2 = duffing_linked_rects(params, eq_levels, es_levels)
    psi_q, psi_s, system = _duffing_maps(params, rel_tol, abs_tol)
    return DuffingSetup(params, tuple(sorted(eq_levels)), tuple(sorted(es_levels)), rect1, rect2,
                        system, psi_q, psi_s)


def energy_drift(phase, z0, t: float, rel_tol: float = RTOL, abs_tol: float = ATOL) -> float:
    """Largest relative change of the first integral along the trajectory from *z0*."""
    trajectory = integrate(phase, z0, (0.0, t), rel_tol, abs_tol)
    energies = trajectory.energies
    scale = max(abs(energies[0]), 1e-300)
    return float(abs(energies - energies[0]).max() / scale)
