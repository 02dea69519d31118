"""
Sampled verification of the stretching-along-paths relation.

For every test path and every region ``K`` the checker looks for maximal
parameter runs on which the path stays in ``K`` and its image stays in the
target rectangle ``B``. Run ends are sharpened by bisection, and a run is a
witness when its image touches one designated side of ``B`` and then the other.

Usage:
    report = check_stretch(f, rect, rect, regions, sample_test_paths(rect))
    print(report.status, report.crossing_number)
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from ..errors import RegionOverlapError, StretchError
from ..geometry import OrientedRectangle, Path, RegionPredicate
from ..models.base import ComposedMap, FunctionMap, PlanarMap
from .report import RegionResult, StretchReport, Witness

logger = logging.getLogger(__name__)

DEFAULT_RELATIVE_TOL = 1e-6
MIN_RUN_SAMPLES = 8
REFINE_LEVELS = 3
JUMP_LEVELS = 4
JUMP_FRACTION = 0.25
MAX_TRACK_SAMPLES = 1 << 16
INSERTED_PER_GAP = 7
MAX_BISECTIONS = 60
SIDE_BAND = 20.0
DEFAULT_MEMBERSHIP = 1e-12


def default_tolerance(rect: OrientedRectangle) -> float:
    return DEFAULT_RELATIVE_TOL * rect.diameter


def _runs(mask: np.ndarray) -> List[Tuple[int, int]]:
    """Inclusive ``(start, end)`` index pairs of the True stretches of *mask*."""
    if not mask.any():
        return []
    edges = np.diff(np.concatenate([[0], mask.astype(np.int8), [0]]))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    return list(zip(starts.tolist(), ends.tolist()))


@dataclass
class _Touch:
    t: float
    side: str
    image: np.ndarray


@dataclass
class _Run:
    start: int
    end: int
    t0: float
    t1: float
    z0: np.ndarray
    z1: np.ndarray
    w0: np.ndarray
    w1: np.ndarray
    touches: List[_Touch] = field(default_factory=list)

    @property
    def samples(self) -> int:
        return self.end - self.start + 1


class _Track:
    """Samples of one path, refined in place, with their images."""

    def __init__(self, index: int, path: Path):
        self.index = index
        self.path = path
        self.t = np.array(path.params, dtype=float)
        self.z = np.array(path.points, dtype=float)
        self.w = np.empty_like(self.z)
        self.finite = np.zeros(len(self.t), dtype=bool)
        self.in_b = np.zeros(len(self.t), dtype=bool)
        self.in_k = np.zeros((0, len(self.t)), dtype=bool)

    def good(self, i: Optional[int]) -> np.ndarray:
        return self.in_b if i is None else self.in_k[i] & self.in_b

    def insert(self, t_new: np.ndarray, z_new: np.ndarray, w_new: np.ndarray) -> None:
        order = np.argsort(np.concatenate([self.t, t_new]), kind="stable")
        self.t = np.concatenate([self.t, t_new])[order]
        self.z = np.vstack([self.z, z_new])[order]
        self.w = np.vstack([self.w, w_new])[order]


def _evaluate_chunks(mapping: PlanarMap, chunks: Sequence[np.ndarray]) -> List[np.ndarray]:
    """Evaluate several point arrays in one batch call."""
    sizes = [len(c) for c in chunks]
    if sum(sizes) == 0:
        return [np.empty((0, 2)) for _ in chunks]
    images = mapping.evaluate(np.vstack([c.reshape(-1, 2) for c in chunks]))
    return np.split(images, np.cumsum(sizes)[:-1])


class _RunScanner:
    """Shared machinery of :func:`check_stretch` and :func:`crossing_count`.

    ``regions`` may be empty, in which case the only constraint is that the
    image lies in ``rect_b`` (region index ``None``). ``rect_b`` is tested as a
    closed set: images within ``membership * scale`` of it count as inside.
    """

    def __init__(self, mapping: PlanarMap, rect_b: OrientedRectangle,
                 regions: Sequence[RegionPredicate], tol: float,
                 refine_levels: int = REFINE_LEVELS, min_run_samples: int = MIN_RUN_SAMPLES,
                 membership: float = DEFAULT_MEMBERSHIP, jump_levels: int = JUMP_LEVELS):
        self.mapping = mapping
        self.rect_b = rect_b
        self.regions = list(regions)
        self.tol = float(tol)
        self.band = SIDE_BAND * self.tol
        self.refine_levels = refine_levels
        self.jump_levels = jump_levels
        self.min_run_samples = min_run_samples
        self.slack = float(membership) * rect_b.bbox.scale
        self.target = rect_b.region()

    @property
    def indices(self) -> List[Optional[int]]:
        return list(range(len(self.regions))) if self.regions else [None]

    # ------------------------------------------------------------------ #
    # Membership
    # ------------------------------------------------------------------ #
    def _in_b(self, w: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        finite = np.isfinite(w).all(axis=1)
        in_b = np.zeros(len(w), dtype=bool)
        if finite.any():
            in_b[finite] = self.rect_b.contains(w[finite])
        miss = np.flatnonzero(finite & ~in_b)
        if self.slack > 0 and miss.size:
            in_b[miss] = self.target.near(w[miss], self.slack)
        return finite, in_b

    def _classify(self, track: _Track) -> None:
        track.finite, track.in_b = self._in_b(track.w)
        if self.regions:
            track.in_k = np.vstack([r.contains(track.z) for r in self.regions])

    # ------------------------------------------------------------------ #
    # Sampling
    # ------------------------------------------------------------------ #
    def load(self, paths: Sequence[Path]) -> List[_Track]:
        tracks = [_Track(i, p) for i, p in enumerate(paths)]
        images = _evaluate_chunks(self.mapping, [tr.z for tr in tracks])
        for track, w in zip(tracks, images):
            track.w = np.array(w, dtype=float)
            self._classify(track)
        return tracks

    def _short_gaps(self, track: _Track) -> np.ndarray:
        """Gap indices ``g`` (between samples g and g+1) around runs that are too short."""
        n = len(track.t)
        gaps = set()
        for i in self.indices:
            for a, b in _runs(track.good(i)):
                if b - a + 1 >= self.min_run_samples:
                    continue
                gaps.update(range(max(a - 1, 0), min(b + 1, n - 1)))
        return np.array(sorted(gaps), dtype=int)

    def _jump_gaps(self, track: _Track) -> np.ndarray:
        """Gaps whose image step exceeds a fraction of ``B`` and may pass near it."""
        if len(track.t) >= MAX_TRACK_SAMPLES:
            return np.array([], dtype=int)
        w = track.w
        step = np.linalg.norm(np.diff(w, axis=0), axis=1)
        big = np.isfinite(step) & (step > JUMP_FRACTION * self.rect_b.diameter)
        big &= np.diff(track.t) > 1e-12
        if not big.any():
            return np.array([], dtype=int)
        lo = np.minimum(w[:-1], w[1:]) - step[:, None]
        hi = np.maximum(w[:-1], w[1:]) + step[:, None]
        box = self.rect_b.bbox
        near = ((hi[:, 0] >= box.xmin) & (lo[:, 0] <= box.xmax)
                & (hi[:, 1] >= box.ymin) & (lo[:, 1] <= box.ymax))
        return np.flatnonzero(big & near)

    def refine(self, tracks: List[_Track]) -> None:
        """Resample around short runs and around long image steps near ``B``."""
        for level in range(max(self.refine_levels, self.jump_levels)):
            pending = []
            for track in tracks:
                parts = []
                if level < self.refine_levels:
                    parts.append(self._short_gaps(track))
                if level < self.jump_levels:
                    parts.append(self._jump_gaps(track))
                gaps = np.unique(np.concatenate(parts)).astype(int)
                if gaps.size == 0:
                    continue
                frac = np.arange(1, INSERTED_PER_GAP + 1) / (INSERTED_PER_GAP + 1)
                t0, t1 = track.t[gaps], track.t[gaps + 1]
                t_new = (t0[:, None] + (t1 - t0)[:, None] * frac[None, :]).ravel()
                pending.append((track, t_new, track.path.at(t_new)))
            if not pending:
                return
            logger.debug("refinement level %d: %d paths, %d new samples", level + 1, len(pending),
                         sum(len(t) for _, t, _ in pending))
            images = _evaluate_chunks(self.mapping, [z for _, _, z in pending])
            for (track, t_new, z_new), w_new in zip(pending, images):
                track.insert(t_new, z_new, w_new)
                self._classify(track)

    # ------------------------------------------------------------------ #
    # Run ends
    # ------------------------------------------------------------------ #
    def _good_at(self, region: np.ndarray, z: np.ndarray, w: np.ndarray) -> np.ndarray:
        finite, in_b = self._in_b(w)
        good = finite & in_b
        for i in np.unique(region):
            if i < 0:
                continue
            sel = region == i
            good[sel] &= self.regions[i].contains(z[sel])
        return good

    def _bisect(self, brackets: List[dict]) -> None:
        """Shrink every ``(good, bad)`` parameter bracket to float resolution.

        The image gap is no stopping rule: when a run ends on the edge of ``K``
        both bracket images can sit on the same side of a side arc of ``B``.
        """
        if not brackets:
            return
        track_of = [b["track"] for b in brackets]
        region = np.array([-1 if b["region"] is None else b["region"] for b in brackets])
        tg = np.array([b["tg"] for b in brackets])
        tb = np.array([b["tb"] for b in brackets])
        zg = np.array([b["zg"] for b in brackets])
        wg = np.array([b["wg"] for b in brackets])
        open_ = tb != tg

        for _ in range(MAX_BISECTIONS):
            active = np.flatnonzero(open_)
            if active.size == 0:
                break
            tm = 0.5 * (tg[active] + tb[active])
            stalled = (tm == tg[active]) | (tm == tb[active])
            open_[active[stalled]] = False
            active, tm = active[~stalled], tm[~stalled]
            if active.size == 0:
                break
            zm = np.empty((active.size, 2))
            for k, j in enumerate(active):
                zm[k] = track_of[j].path.at(tm[k])[0]
            wm = self.mapping.evaluate(zm)
            good = self._good_at(region[active], zm, wm)
            up, down = active[good], active[~good]
            tg[up], zg[up], wg[up] = tm[good], zm[good], wm[good]
            tb[down] = tm[~good]

        for k, b in enumerate(brackets):
            b["tg"], b["zg"], b["wg"] = float(tg[k]), zg[k], wg[k]

    def runs(self, tracks: List[_Track]) -> Dict[Tuple[int, Optional[int]], List[_Run]]:
        """Maximal runs per ``(track, region)`` with bisected ends and side touches."""
        out: Dict[Tuple[int, Optional[int]], List[_Run]] = {}
        brackets: List[dict] = []
        for track in tracks:
            n = len(track.t)
            for i in self.indices:
                runs = []
                for a, b in _runs(track.good(i)):
                    run = _Run(a, b, track.t[a], track.t[b], track.z[a], track.z[b],
                               track.w[a], track.w[b])
                    if a > 0:
                        brackets.append({"track": track, "region": i, "run": run, "end": 0,
                                         "tg": track.t[a], "zg": track.z[a], "wg": track.w[a],
                                         "tb": track.t[a - 1]})
                    if b < n - 1:
                        brackets.append({"track": track, "region": i, "run": run, "end": 1,
                                         "tg": track.t[b], "zg": track.z[b], "wg": track.w[b],
                                         "tb": track.t[b + 1]})
                    runs.append(run)
                out[(track.index, i)] = runs
        self._bisect(brackets)
        for b in brackets:
            run = b["run"]
            if b["end"] == 0:
                run.t0, run.z0, run.w0 = b["tg"], b["zg"], b["wg"]
            else:
                run.t1, run.z1, run.w1 = b["tg"], b["zg"], b["wg"]

        by_track = {track.index: track for track in tracks}
        for (index, _), runs in out.items():
            for run in runs:
                self._touches(by_track[index], run)
        return out

    # ------------------------------------------------------------------ #
    # Side attribution
    # ------------------------------------------------------------------ #
    def sides(self, images: np.ndarray) -> np.ndarray:
        """``"left"``, ``"right"`` or ``""`` for each image point."""
        dl = self.rect_b.side_distance(images, "left", refine_within=self.band)
        dr = self.rect_b.side_distance(images, "right", refine_within=self.band)
        labels = np.full(len(images), "", dtype=object)
        labels[(dl <= self.tol) & (dl <= dr)] = "left"
        labels[(dr <= self.tol) & (dr < dl)] = "right"
        return labels

    def _touches(self, track: _Track, run: _Run) -> None:
        inner = slice(run.start, run.end + 1)
        ts = np.concatenate([[run.t0], track.t[inner], [run.t1]])
        ws = np.vstack([run.w0, track.w[inner], run.w1])
        # unbisected ends repeat the first or last sample
        keep = np.concatenate([[True], np.diff(ts) > 0])
        ts, ws = ts[keep], ws[keep]
        labels = self.sides(ws)
        run.touches = [_Touch(float(t), str(s), w) for t, s, w in zip(ts, labels, ws) if s]


def _first_witness(path_index: int, runs: List[_Run]) -> Optional[Witness]:
    for run in runs:
        for first, second in zip(run.touches, run.touches[1:]):
            if first.side != second.side:
                return Witness(
                    path=path_index,
                    t_start=first.t,
                    t_end=second.t,
                    entry=first.side,
                    exit=second.side,
                    start_image=(float(first.image[0]), float(first.image[1])),
                    end_image=(float(second.image[0]), float(second.image[1])),
                    samples=run.samples,
                )
    return None


def _count_crossings(runs: List[_Run]) -> int:
    count = 0
    for run in runs:
        sides = [t.side for t in run.touches]
        count += sum(1 for a, b in zip(sides, sides[1:]) if a != b)
    return count


def _check_disjoint(tracks: List[_Track], regions: Sequence[RegionPredicate]) -> Optional[float]:
    """Raise on a shared sample; return the smallest sampled distance between regions."""
    if len(regions) < 2:
        return None
    members = [np.vstack([tr.z[tr.in_k[i]] for tr in tracks]) for i in range(len(regions))]
    for tr in tracks:
        counts = tr.in_k.sum(axis=0)
        if (counts > 1).any():
            j = int(np.flatnonzero(counts > 1)[0])
            first, second = np.flatnonzero(tr.in_k[:, j])[:2]
            raise RegionOverlapError(regions[first].label, regions[second].label, tr.z[j])
    best = np.inf
    for i, j in combinations(range(len(regions)), 2):
        if len(members[i]) == 0 or len(members[j]) == 0:
            continue
        dist, _ = cKDTree(members[i]).query(members[j])
        best = min(best, float(dist.min()))
    return None if not np.isfinite(best) else best


def check_stretch(
    mapping: PlanarMap,
    rect_a: OrientedRectangle,
    rect_b: OrientedRectangle,
    regions: Sequence[RegionPredicate],
    paths: Sequence[Path],
    tol: Optional[float] = None,
    refine_levels: int = REFINE_LEVELS,
    min_run_samples: int = MIN_RUN_SAMPLES,
    seed: Optional[int] = None,
    map_id: Optional[str] = None,
    membership: Optional[float] = None,
) -> StretchReport:
    """Check ``(K_i, mapping): A ⥤ B`` for each region on the given paths.

    Args:
        mapping: planar map evaluated in batches
        rect_a: source rectangle; paths are expected to join its left and right sides
        rect_b: target rectangle whose left and right sides must both be reached
        regions: pairwise disjoint regions ``K_i``
        paths: test family, usually from ``sample_test_paths(rect_a)``
        tol: side band, ``1e-6 * diameter(B)`` by default
        refine_levels: local resampling rounds around short runs
        min_run_samples: runs shorter than this are resolution warnings
        seed: recorded in the report for the path family
        map_id: overrides ``mapping.map_id`` in the report
        membership: closed-set slack of ``rect_b`` relative to its coordinate scale

    Returns:
        StretchReport with one RegionResult per region

    Raises:
        StretchError: when no regions or no paths are given
        RegionOverlapError: when a path sample lies in two regions
    """
    if not regions:
        raise StretchError("at least one region is required")
    if not paths:
        raise StretchError("at least one path is required")
    tol = default_tolerance(rect_b) if tol is None else float(tol)
    if tol <= 0:
        raise StretchError(f"tolerance must be positive, got {tol}")
    name = map_id or mapping.map_id
    logger.info("Checking %s: %s -> %s on %d paths, %d regions (tol=%.3g)",
                name, rect_a.name, rect_b.name, len(paths), len(regions), tol)

    membership = DEFAULT_MEMBERSHIP if membership is None else float(membership)
    scanner = _RunScanner(mapping, rect_b, regions, tol, refine_levels, min_run_samples, membership)
    tracks = scanner.load(paths)
    scanner.refine(tracks)
    min_distance = _check_disjoint(tracks, regions)
    runs = scanner.runs(tracks)

    results = []
    warnings: List[str] = []
    for i, region in enumerate(regions):
        result = RegionResult(label=region.label, name=region.name or f"K{region.label}",
                              tested=len(tracks))
        for track in tracks:
            track_runs = runs[(track.index, i)]
            witness = _first_witness(track.index, track_runs)
            if witness is not None:
                result.witnesses.append(witness)
                continue
            undefined = bool((~track.finite & track.in_k[i]).any())
            short = any(r.samples < min_run_samples for r in track_runs)
            if undefined or short:
                result.inconclusive_paths.append(track.index)
            else:
                result.failed_paths.append(track.index)
        if result.inconclusive_paths:
            warnings.append(f"{result.name}: {result.inconclusive} paths inconclusive "
                            "(undefined images or under-resolved runs)")
        logger.info("  %s: %d/%d witnessed, %d inconclusive -> %s", result.name,
                    result.witnessed, result.tested, result.inconclusive, result.status)
        results.append(result)

    for message in warnings:
        logger.warning(message)
    return StretchReport(
        map_id=name,
        rect_a=rect_a.name,
        rect_b=rect_b.name,
        regions=results,
        tolerances={"tol": tol, "side_band": scanner.band, "refine_levels": refine_levels,
                    "min_run_samples": min_run_samples, "membership": membership,
                    "jump_levels": scanner.jump_levels},
        n_paths=len(paths),
        seed=seed,
        min_region_distance=min_distance,
        orientation=rect_b.orientation,
        warnings=warnings,
    )


def crossing_counts(
    mapping: Optional[PlanarMap],
    rect_b: OrientedRectangle,
    paths: Sequence[Path],
    tol: Optional[float] = None,
    membership: float = DEFAULT_MEMBERSHIP,
) -> List[int]:
    """Crossing count of every path, with all images evaluated in one batch."""
    mapping = mapping or FunctionMap(lambda p: p, "id")
    tol = default_tolerance(rect_b) if tol is None else float(tol)
    scanner = _RunScanner(mapping, rect_b, [], tol, membership=membership)
    tracks = scanner.load(paths)
    scanner.refine(tracks)
    runs = scanner.runs(tracks)
    counts = [_count_crossings(runs[(track.index, None)]) for track in tracks]
    logger.debug("%s: crossings of %s per path %s", mapping.map_id, rect_b.name, counts)
    return counts


def crossing_count(
    mapping: Optional[PlanarMap],
    rect_b: OrientedRectangle,
    path: Path,
    tol: Optional[float] = None,
    membership: float = DEFAULT_MEMBERSHIP,
) -> int:
    """Number of parameter subintervals whose image crosses *rect_b* from side to side.

    With ``mapping=None`` the path is taken to be the image path itself.
    """
    return crossing_counts(mapping, rect_b, [path], tol, membership)[0]


def composite_regions(
    phi: PlanarMap,
    regions_h: Sequence[RegionPredicate],
    regions_k: Sequence[RegionPredicate],
) -> Tuple[List[RegionPredicate], Dict[int, Tuple[int, int]]]:
    """Regions ``H_i ∩ phi^{-1}(K_j)`` labelled ``i * len(regions_k) + j``."""
    width = len(regions_k)
    out, pairs = [], {}
    for i, h in enumerate(regions_h):
        for j, k in enumerate(regions_k):
            label = i * width + j
            out.append(h.preimage(phi.evaluate, k, label=label, name=f"{h.name or f'H{i}'}|{k.name or f'K{j}'}"))
            pairs[label] = (i, j)
    return out, pairs


def check_composition(
    phi: PlanarMap,
    psi: PlanarMap,
    rect_a: OrientedRectangle,
    rect_b: OrientedRectangle,
    rect_c: OrientedRectangle,
    regions_h: Sequence[RegionPredicate],
    regions_k: Sequence[RegionPredicate],
    paths: Sequence[Path],
    tol: Optional[float] = None,
    **kwargs,
) -> StretchReport:
    """Check ``(H_i ∩ phi^{-1}(K_j), psi∘phi): A ⥤ C`` for every pair ``(i, j)``.

    *rect_b* only names the intermediate rectangle in the report; the regions
    ``K_j`` already encode membership in it.
    """
    composed = ComposedMap([phi, psi])
    regions, pairs = composite_regions(phi, regions_h, regions_k)
    logger.info("Composition %s through %s: %d x %d pairs", composed.map_id, rect_b.name,
                len(regions_h), len(regions_k))
    report = check_stretch(composed, rect_a, rect_c, regions, paths, tol, **kwargs)
    report.pairs = pairs
    return report


def replay_witness(
    mapping: PlanarMap,
    rect_b: OrientedRectangle,
    path: Path,
    witness: Witness,
    tol: float,
) -> Tuple[str, str]:
    """Re-evaluate a witness' endpoints and return their side attribution."""
    scanner = _RunScanner(mapping, rect_b, [], tol)
    points = path.at([witness.t_start, witness.t_end])
    labels = scanner.sides(mapping.evaluate(points))
    return str(labels[0]), str(labels[1])
