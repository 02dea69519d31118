"""
Subdivision-seeded Newton search for periodic points of planar maps.

Seeds start on a grid over the first region of the itinerary. For each
prefix of the itinerary the surviving grid cells are split into finer
sub-cells and kept only when every iterate so far stays within a small band
of the region it should visit, so the seeds track the nested sets
``H_{s_0} ∩ psi^{-1} H_{s_1} ∩ ...`` however thin they get. The best seeds by
residual are refined by damped Newton steps on ``G(w) = psi^k(w) - w`` with a
central-difference Jacobian; when no seed converges, Nelder-Mead on ``|G|^2``
takes over from the same seeds.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Any, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import minimize

from ..errors import ConfigError, OrbitNotFound
from ..geometry import RegionPredicate
from ..models.base import PlanarMap
from ..symdyn import SymbolSequence
from .results import PeriodicOrbitResult

logger = logging.getLogger(__name__)

GRID_DENSITY = 64
SEED_SLACK = 1e-3
BEST_SEEDS = 16
JACOBIAN_STEP = 1e-7
DAMPING = (1.0, 0.5, 0.25)
MAX_NEWTON = 50
SUBDIVISION = 8
SEED_POOL = 4096


@dataclass(frozen=True)
class NewtonSettings:
    """Knobs of the planar periodic-point search (the ``orbits:`` config section).

    Args:
        grid_density: initial seed grid is ``grid_density x grid_density``
        damping: step fractions tried in order until the residual drops
        max_seeds: number of best seeds handed to Newton
        fd_step: relative central-difference step of the Jacobian
        slack: seed band around each region, relative to its diameter
        subdivision: sub-cells per axis when a surviving cell is refined
        pool: cap on the number of seed candidates per prefix
    """

    grid_density: int = GRID_DENSITY
    damping: Tuple[float, ...] = DAMPING
    max_seeds: int = BEST_SEEDS
    fd_step: float = JACOBIAN_STEP
    slack: float = SEED_SLACK
    subdivision: int = SUBDIVISION
    pool: int = SEED_POOL

    def __post_init__(self):
        object.__setattr__(self, "damping", tuple(float(d) for d in self.damping))
        if self.grid_density < 2 or self.subdivision < 2:
            raise ConfigError("grid_density and subdivision must be at least 2")
        if self.max_seeds < 1 or self.pool < self.subdivision ** 2:
            raise ConfigError("max_seeds must be positive and pool must hold one subdivided cell")
        if not self.damping or not all(0.0 < d <= 1.0 for d in self.damping):
            raise ConfigError(f"damping factors must lie in (0, 1], got {self.damping}")
        if not self.fd_step > 0:
            raise ConfigError(f"fd_step must be positive, got {self.fd_step}")

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "NewtonSettings":
        known = {k: values[k] for k in cls.__dataclass_fields__ if k in values}
        try:
            return cls(**known)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid orbit settings {known}: {exc}") from exc

    def to_dict(self) -> dict:
        out = asdict(self)
        out["damping"] = list(self.damping)
        return out


def _word(itinerary: Union[str, Sequence[int], SymbolSequence], m: int) -> SymbolSequence:
    if isinstance(itinerary, SymbolSequence):
        return itinerary
    if isinstance(itinerary, str):
        return SymbolSequence.parse(itinerary, m=max(m, 2))
    return SymbolSequence(tuple(itinerary), max(m, 2))


def _by_label(regions: Sequence[RegionPredicate]) -> dict:
    return {r.label: r for r in regions}


def _orbit(mapping: PlanarMap, points: np.ndarray, k: int) -> np.ndarray:
    """``(k + 1, N, 2)`` iterates of a batch."""
    out = [points]
    for _ in range(k):
        out.append(mapping.evaluate(out[-1]))
    return np.stack(out)


def _residuals(orbit: np.ndarray) -> np.ndarray:
    diff = np.abs(orbit[-1] - orbit[0]).max(axis=1)
    return np.where(np.isfinite(diff), diff, np.inf)


def _prefix_ok(mapping: PlanarMap, labels: dict, word: SymbolSequence, points: np.ndarray,
               depth: int, slack: float) -> np.ndarray:
    """Whether iterates ``0..depth`` of each point stay near the regions of *word*."""
    k = len(word)
    ok = np.ones(len(points), dtype=bool)
    current = points
    for j in range(depth + 1):
        if j:
            current = mapping.evaluate(current)
        region = labels[word.symbol(j % k)]
        live = ok & np.isfinite(current).all(axis=1)
        hit = np.zeros(len(points), dtype=bool)
        if live.any():
            hit[live] = region.near(current[live], slack * region.bbox.diameter)
        ok &= hit
        if not ok.any():
            break
    return ok


def _thin(points: np.ndarray, cap: int) -> np.ndarray:
    if len(points) <= cap:
        return points
    return points[np.linspace(0, len(points) - 1, cap).round().astype(int)]


def _subdivide(points: np.ndarray, h: np.ndarray, r: int) -> Tuple[np.ndarray, np.ndarray]:
    """``r x r`` sub-grid over ``[-h, h]`` around every point; the new spacing is ``2h / r``."""
    offsets = (np.arange(r) + 0.5) / r * 2.0 - 1.0
    ox, oy = np.meshgrid(offsets * h[0], offsets * h[1])
    shifts = np.column_stack([ox.ravel(), oy.ravel()])
    children = (points[:, None, :] + shifts[None, :, :]).reshape(-1, 2)
    return children, 2.0 * h / r


def feasible_seeds(mapping: PlanarMap, regions: Sequence[RegionPredicate], word: SymbolSequence,
                   settings: Optional[NewtonSettings] = None) -> np.ndarray:
    """Seeds in region ``s_0`` whose iterates follow *word* up to the slack band."""
    settings = settings or NewtonSettings()
    labels = _by_label(regions)
    first = labels[word.symbol(0)]
    box = first.bbox
    n = settings.grid_density
    h = np.array([box.xmax - box.xmin, box.ymax - box.ymin]) / n
    seeds = box.grid(n, n)
    k = len(word)
    per_cell = settings.subdivision ** 2
    for depth in range(1, k + 1):
        if depth > 1:
            seeds, h = _subdivide(_thin(seeds, settings.pool // per_cell), h, settings.subdivision)
        seeds = seeds[_prefix_ok(mapping, labels, word, seeds, depth, settings.slack)]
        logger.debug("%s: %d seeds follow the first %d symbols of %s", mapping.map_id, len(seeds),
                     depth + 1, word)
        if not len(seeds):
            break
    return _thin(seeds, settings.pool)


def _jacobian(mapping: PlanarMap, w: np.ndarray, k: int, fd_step: float) -> Tuple[np.ndarray, np.ndarray]:
    """``G(w)`` and its central-difference Jacobian from one batch of five points."""
    h = fd_step * np.maximum(1.0, np.abs(w))
    batch = np.array([w, w + [h[0], 0.0], w - [h[0], 0.0], w + [0.0, h[1]], w - [0.0, h[1]]])
    images = mapping.iterate(batch, k)
    g = images - batch
    jac = np.column_stack([(g[1] - g[2]) / (2 * h[0]), (g[3] - g[4]) / (2 * h[1])])
    return g[0], jac


def _newton(mapping: PlanarMap, w: np.ndarray, k: int, tol: float,
            settings: NewtonSettings) -> Tuple[np.ndarray, float, int]:
    g, jac = _jacobian(mapping, w, k, settings.fd_step)
    residual = float(np.abs(g).max()) if np.isfinite(g).all() else np.inf
    steps = 0
    while residual >= tol and steps < MAX_NEWTON and np.isfinite(jac).all():
        step = np.linalg.lstsq(jac, -g, rcond=None)[0]
        for damping in settings.damping:
            trial = w + damping * step
            g_trial = mapping.iterate(trial.reshape(1, 2), k)[0] - trial
            r_trial = float(np.abs(g_trial).max())
            if np.isfinite(r_trial) and r_trial < residual:
                w, residual = trial, r_trial
                break
        else:
            break
        steps += 1
        g, jac = _jacobian(mapping, w, k, settings.fd_step)
    return w, residual, steps


def _minimize(mapping: PlanarMap, w: np.ndarray, k: int) -> np.ndarray:
    def objective(z):
        g = mapping.iterate(np.asarray(z, dtype=float).reshape(1, 2), k)[0] - z
        value = float(g @ g)
        return value if np.isfinite(value) else 1e300

    scale = max(1.0, float(np.abs(w).max()))
    result = minimize(objective, w, method="Nelder-Mead",
                      options={"xatol": 1e-15 * scale, "fatol": 1e-30, "maxiter": 4000})
    return np.asarray(result.x, dtype=float)


def follows(mapping: PlanarMap, regions: Sequence[RegionPredicate], word: SymbolSequence,
            w: np.ndarray, eps: float = 0.0) -> Tuple[bool, np.ndarray]:
    """Whether ``psi^i(w)`` lies in region ``s_i`` (or within *eps* of it) for ``i < k``, and the orbit."""
    labels = _by_label(regions)
    orbit = _orbit(mapping, np.asarray(w, dtype=float).reshape(1, 2), len(word) - 1)[:, 0, :]

    def inside(i: int) -> bool:
        region = labels[word.symbol(i)]
        if not np.isfinite(orbit[i]).all():
            return False
        return bool(region.near(orbit[i], eps) if eps > 0 else region.contains(orbit[i]))

    return all(inside(i) for i in range(len(word))), orbit


def newton_periodic_point_2d(
    mapping: PlanarMap,
    regions: Sequence[RegionPredicate],
    itinerary: Union[str, Sequence[int], SymbolSequence],
    settings: Optional[NewtonSettings] = None,
    tol: float = 1e-9,
) -> PeriodicOrbitResult:
    """Point ``w`` in region ``s_0`` with ``psi^k(w) = w`` following *itinerary*.

    Iterates within *tol* of their region count as inside it, so fixed points
    on a region's corner are accepted. Returns the best candidate even when it
    misses *tol* or the exact itinerary; ``itinerary_verified`` tells the two
    apart.

    Raises:
        OrbitNotFound: no seed is feasible for the itinerary
    """
    settings = settings or NewtonSettings()
    word = _word(itinerary, len(regions))
    k = len(word)
    missing = {word.symbol(i) for i in range(k)} - set(_by_label(regions))
    if missing:
        raise OrbitNotFound(f"itinerary {word} uses symbols {sorted(missing)} without regions")

    seeds = feasible_seeds(mapping, regions, word, settings)
    if not len(seeds):
        raise OrbitNotFound(f"{mapping.map_id}: no feasible seed for itinerary {word} "
                            f"from a {settings.grid_density}x{settings.grid_density} grid")
    residuals = _residuals(_orbit(mapping, seeds, k))
    order = np.argsort(residuals, kind="stable")[:settings.max_seeds]
    logger.debug("%s: %d feasible seeds for %s, best residual %.3g", mapping.map_id, len(seeds),
                 word, residuals[order[0]])

    def accepted(w: np.ndarray, residual: float) -> bool:
        return residual < tol and follows(mapping, regions, word, w, tol)[0]

    best: Optional[Tuple[np.ndarray, float, int]] = None
    for idx in order:
        w, residual, steps = _newton(mapping, seeds[idx], k, tol, settings)
        if accepted(w, residual):
            best = (w, residual, steps)
            break
        if best is None or residual < best[1]:
            best = (w, residual, steps)

    w, residual, steps = best
    if not accepted(w, residual):
        logger.debug("%s: Newton missed %s (residual %.3g); minimizing", mapping.map_id, word, residual)
        for idx in order:
            start = _minimize(mapping, seeds[idx], k)
            cand, r_cand, s_cand = _newton(mapping, start, k, tol, settings)
            if accepted(cand, r_cand):
                w, residual, steps = cand, r_cand, s_cand
                break
            if r_cand < residual:
                w, residual, steps = cand, r_cand, s_cand

    inside, orbit = follows(mapping, regions, word, w, tol)
    verified = bool(inside and residual < tol)
    if verified:
        logger.info("%s: period-%d point (%.12g, %.12g) for %s, residual %.3g", mapping.map_id, k,
                    w[0], w[1], word, residual)
    else:
        logger.warning("%s: no verified point for %s (best residual %.3g, inside=%s)",
                       mapping.map_id, word, residual, inside)
    return PeriodicOrbitResult(word, (float(w[0]), float(w[1])), float(residual), verified,
                               "newton_2d", orbit=[(float(p[0]), float(p[1])) for p in orbit],
                               iterations=steps, seeds=int(len(seeds)))
