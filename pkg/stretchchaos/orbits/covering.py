"""
Periodic points of interval maps from covering intervals.

For a cyclic itinerary ``s_0 ... s_(k-1)`` with ``f(I_(s_i)) ⊇ I_(s_(i+1))``
the interval ``J ⊂ I_(s_0)`` with ``f^i(J) ⊂ I_(s_i)`` and
``f^k(J) = I_(s_0)`` is built backwards, one preimage at a time. The end
points of ``J`` are mapped onto the end points of ``I_(s_0) ⊇ J``, so
``f^k(x) - x`` changes sign on ``J`` and a bracketing root finder applies.
"""
from __future__ import annotations

import logging
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import brentq

from ..errors import CoveringError, OrbitNotFound
from ..models.base import IntervalMap
from ..symdyn import SymbolSequence
from .results import PeriodicOrbitResult

logger = logging.getLogger(__name__)

Interval = Tuple[float, float]

N_GRID = 1025
COVER_TOL = 1e-12
POLISH_STEPS = 64


def _as_sequence(itinerary: Union[str, Sequence[int], SymbolSequence], m: int) -> SymbolSequence:
    if isinstance(itinerary, SymbolSequence):
        return itinerary
    if isinstance(itinerary, str):
        return SymbolSequence.parse(itinerary, m=m)
    return SymbolSequence(tuple(itinerary), m)


def _slack(lo: float, hi: float) -> float:
    return COVER_TOL * max(1.0, abs(lo), abs(hi))


def check_coverings(f: IntervalMap, intervals: Sequence[Interval], word: SymbolSequence,
                    n_grid: int = N_GRID) -> None:
    """Raise ``CoveringError((i, i+1))`` at the first position whose covering fails."""
    k = len(word)
    for i in range(k):
        lo, hi = intervals[word.symbol(i)]
        tlo, thi = intervals[word.symbols[(i + 1) % k]]
        values = f(np.linspace(lo, hi, n_grid))
        slack = _slack(tlo, thi)
        if not np.isfinite(values).all() or values.min() > tlo + slack or values.max() < thi - slack:
            raise CoveringError((i, i + 1), f"{f.map_id}: I{word.symbol(i)} does not cover "
                                            f"I{word.symbols[(i + 1) % k]} (itinerary {word})")


def _level_root(f: IntervalMap, level: float, a: float, b: float, fa: float, fb: float) -> float:
    if fa == level:
        return a
    if fb == level:
        return b
    if (fa - level) * (fb - level) < 0:
        return brentq(lambda x: f.scalar(x) - level, a, b, xtol=1e-16, rtol=4 * np.finfo(float).eps)
    return a if abs(fa - level) <= abs(fb - level) else b


def _preimage(f: IntervalMap, source: Interval, target: Interval, n_grid: int) -> Optional[Interval]:
    """Leftmost subinterval of *source* mapped onto *target*, end points onto end points."""
    xs = np.linspace(source[0], source[1], n_grid)
    g = f(xs)
    tlo, thi = target
    slack = _slack(tlo, thi)
    marks = np.zeros(n_grid, dtype=np.int8)
    marks[g <= tlo + slack] |= 1
    marks[g >= thi - slack] |= 2
    idx = np.flatnonzero((marks == 1) | (marks == 2))
    # Consecutive marked points with different marks: every grid value between
    # them lies strictly inside the target.
    pairs = np.flatnonzero(marks[idx[:-1]] != marks[idx[1:]])
    if pairs.size == 0:
        return None
    i, j = int(idx[pairs[0]]), int(idx[pairs[0] + 1])
    lo_end, hi_end = (i, j) if marks[i] == 1 else (j, i)
    inward = 1 if lo_end < hi_end else -1
    p = _level_root(f, tlo, xs[lo_end], xs[lo_end + inward], g[lo_end], g[lo_end + inward])
    q = _level_root(f, thi, xs[hi_end], xs[hi_end - inward], g[hi_end], g[hi_end - inward])
    return (min(p, q), max(p, q))


def nested_interval(f: IntervalMap, intervals: Sequence[Interval], word: SymbolSequence,
                    n_grid: int = N_GRID) -> Interval:
    """``J ⊂ I_(s_0)`` with ``f^i(J) ⊂ I_(s_i)`` and ``f^k(J) = I_(s_0)``."""
    k = len(word)
    target = tuple(intervals[word.symbol(0)])
    for i in range(k - 1, -1, -1):
        source = tuple(intervals[word.symbol(i)])
        piece = _preimage(f, source, target, n_grid)
        if piece is None:
            raise CoveringError((i, i + 1), f"{f.map_id}: no preimage of {target} in I{word.symbol(i)}")
        target = piece
    return target


def _polish(h, x: float) -> Tuple[float, float]:
    """Step through neighbouring floats while the residual decreases."""
    best = abs(h(x))
    for _ in range(POLISH_STEPS):
        moved = False
        for direction in (-np.inf, np.inf):
            cand = float(np.nextafter(x, direction))
            value = abs(h(cand))
            if value < best:
                x, best, moved = cand, value, True
                break
        if not moved:
            break
    return x, best


def covering_periodic_point_1d(
    f: IntervalMap,
    intervals: Sequence[Interval],
    itinerary: Union[str, Sequence[int], SymbolSequence],
    tol: float = 1e-12,
    n_grid: int = N_GRID,
) -> PeriodicOrbitResult:
    """Period-k point of *f* following *itinerary* through *intervals*.

    Raises:
        CoveringError: when ``f(I_(s_i)) ⊇ I_(s_(i+1))`` fails; carries ``(i, i+1)``
        OrbitNotFound: when no sign change survives the nested construction
    """
    word = _as_sequence(itinerary, len(intervals))
    check_coverings(f, intervals, word, n_grid)
    k = len(word)
    lo, hi = nested_interval(f, intervals, word, n_grid)

    def h(x: float) -> float:
        value = f.iterate(np.array([x]), k)[0]
        return float(value - x)

    a, b = lo, hi
    ha, hb = h(a), h(b)
    if not (np.isfinite(ha) and np.isfinite(hb)):
        raise OrbitNotFound(f"{f.map_id}: itinerary {word} leaves the domain on {lo, hi}")
    if ha * hb > 0:
        xs = np.linspace(lo, hi, n_grid)
        hs = np.array([h(x) for x in xs])
        change = np.flatnonzero(np.sign(hs[:-1]) * np.sign(hs[1:]) <= 0)
        if change.size == 0:
            raise OrbitNotFound(f"{f.map_id}: no sign change of f^{k}(x) - x for itinerary {word}")
        a, b, ha = xs[change[0]], xs[change[0] + 1], hs[change[0]]
    x = a if ha == 0 else brentq(h, a, b, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=400)
    x, residual = _polish(h, float(x))

    orbit = [float(v) for v in (f.iterate(np.array([x]), i)[0] for i in range(k))]
    inside = all(
        intervals[word.symbol(i)][0] - _slack(*intervals[word.symbol(i)]) <= orbit[i]
        <= intervals[word.symbol(i)][1] + _slack(*intervals[word.symbol(i)])
        for i in range(k)
    )
    verified = bool(inside and residual < tol)
    if not verified:
        logger.warning("%s: itinerary %s residual %.3g (inside=%s)", f.map_id, word, residual, inside)
    logger.debug("%s: period-%d point %.17g for %s on [%.17g, %.17g]", f.map_id, k, x, word, lo, hi)
    return PeriodicOrbitResult(word, (x,), float(residual), verified, "covering_1d",
                               orbit=[(v,) for v in orbit], interval=(float(lo), float(hi)))

