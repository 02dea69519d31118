"""
Oriented rectangles and compact regions for the interval and planar models.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from ..errors import ConditionError, GeometryError
from ..geometry import (
    OrientedRectangle,
    RegionPredicate,
    make_rect_from_arcs,
    make_rect_from_graphs,
)
from ..symdyn import SymbolMatrix
from .base import IntervalMap, PlanarMap
from .conditions import Mode, duopoly_conditions, olg_conditions
from .maps import (
    CounterexampleParams,
    DuopolyParams,
    Hump,
    LiYorkeParams,
    LogisticParams,
    OlgAltParams,
    OlgParams,
    affine_map,
    duopoly_map,
    logistic_map,
    olg2d_map,
)

logger = logging.getLogger(__name__)

Interval = Tuple[float, float]


def unit_square(name: str = "I^2") -> OrientedRectangle:
    """``[0, 1]^2`` with the standard left/right orientation; ``param`` is the identity."""
    return make_rect_from_graphs(lambda x: 0.0 * x, lambda x: 0.0 * x + 1.0, 0.0, 1.0, name=name)


def strip_region(lo: float, hi: float, label: int, name: str) -> RegionPredicate:
    """``[lo, hi] x [0, 1]``."""
    return RegionPredicate.box(lo, hi, 0.0, 1.0, label, name)


# --------------------------------------------------------------------------- #
# Interval maps
# --------------------------------------------------------------------------- #
def logistic_intervals(mu: float) -> Tuple[Interval, Interval]:
    """``[0, alpha]`` and ``[beta, 1]`` with ``alpha, beta`` the preimages of 1 (needs ``mu > 4``)."""
    if mu <= 4:
        raise ConditionError("mu > 4", f"logistic covering intervals need mu > 4, got {mu}")
    root = math.sqrt(1 - 4 / mu)
    return (0.0, (1 - root) / 2), ((1 + root) / 2, 1.0)


def logistic_geometry(params: LogisticParams) -> Tuple[OrientedRectangle, List[RegionPredicate]]:
    (a0, a1), (b0, b1) = logistic_intervals(params.mu)
    return unit_square(), [strip_region(a0, a1, 0, "K0"), strip_region(b0, b1, 1, "K1")]


@dataclass(frozen=True)
class SecondIterate:
    """Covering structure of ``F^2`` for the logistic map with ``2 < mu <= 4``."""

    mu: float
    x_minus: float
    x_plus: float
    f2_half: float
    f2_crit: float

    @property
    def J0(self) -> Interval:
        return (self.x_minus, 0.5)

    @property
    def J1(self) -> Interval:
        return (0.5, self.x_plus)

    @property
    def I(self) -> Interval:
        return (self.x_minus, self.x_plus)

    @property
    def covers(self) -> bool:
        return self.f2_half <= self.x_minus and self.f2_crit >= self.x_plus

    @property
    def entropy_bound(self) -> float:
        """Lower bound for the entropy of ``F`` itself."""
        return math.log(2) / 2 if self.covers else 0.0

    def to_dict(self) -> dict:
        return {"mu": self.mu, "x_minus": self.x_minus, "x_plus": self.x_plus,
                "F2(1/2)": self.f2_half, "F2(x+-)": self.f2_crit, "covers": self.covers}


def logistic_second_iterate(params: LogisticParams) -> SecondIterate:
    mu = params.mu
    if not 2 < mu <= 4:
        raise ConditionError("2 < mu <= 4", f"second-iterate analysis needs 2 < mu <= 4, got {mu}")
    root = math.sqrt(1 - 2 / mu)
    f = logistic_map(params)
    f2 = f.power(2)
    x_minus, x_plus = (1 - root) / 2, (1 + root) / 2
    return SecondIterate(mu, x_minus, x_plus, float(f2(np.array(0.5))), float(f2(np.array(x_minus))))


def second_iterate_geometry(params: LogisticParams) -> Tuple[OrientedRectangle, List[RegionPredicate], SecondIterate]:
    """``I x [0, 1]`` with ``K_i = (J_i x [0, 1]) ∩ (F^2)^{-1}(I x [0, 1])``."""
    info = logistic_second_iterate(params)
    if not info.covers:
        raise ConditionError("F2 double covering", f"F^2 does not double-cover I for mu={params.mu}")
    lo, hi = info.I
    rect = make_rect_from_graphs(lambda x: 0.0 * x, lambda x: 0.0 * x + 1.0, lo, hi, name="I")
    f2 = logistic_map(params).power(2).embedded()
    target = rect.region()
    regions = [
        strip_region(*info.J0, 0, "J0").preimage(f2.evaluate, target, name="K0"),
        strip_region(*info.J1, 1, "J1").preimage(f2.evaluate, target, name="K1"),
    ]
    return rect, regions, info


def counterexample_geometry(params: CounterexampleParams) -> Tuple[OrientedRectangle, RegionPredicate, RegionPredicate]:
    """``K0 = [a, b] x [0, 1]`` and the disconnected ``K1 = ([0, a] ∪ [b, 1]) x [0, 1]``.

    The pieces of ``K1`` stop ``1e-12`` short of ``a`` and ``b`` so that a sample
    on the shared edge belongs to ``K0`` only.
    """
    eps = 1e-12
    k0 = strip_region(params.a, params.b, 0, "K0")
    k1 = RegionPredicate.union_of(
        [strip_region(0.0, params.a - eps, 1, "K1a"), strip_region(params.b + eps, 1.0, 1, "K1b")], label=1, name="K1"
    )
    return unit_square(), k0, k1


def li_yorke_intervals(params: LiYorkeParams) -> List[Interval]:
    a, b, c = params.a, params.b, params.c
    return [(min(a, b), max(a, b)), (min(b, c), max(b, c))]


def covering_matrix(f: IntervalMap, intervals: Sequence[Interval], n_grid: int = 1025,
                    tol: float = 1e-12) -> SymbolMatrix:
    """``T[i, k] = 1`` iff ``f(I_i) ⊇ I_k`` (image extent sampled on a grid)."""
    n = len(intervals)
    t = np.zeros((n, n), dtype=np.int64)
    for i, (lo, hi) in enumerate(intervals):
        values = f(np.linspace(lo, hi, n_grid))
        if not np.isfinite(values).all():
            continue
        vmin, vmax = float(values.min()), float(values.max())
        for k, (klo, khi) in enumerate(intervals):
            scale = tol * max(1.0, abs(klo), abs(khi))
            t[i, k] = int(vmin <= klo + scale and vmax >= khi - scale)
    return SymbolMatrix(t)


# --------------------------------------------------------------------------- #
# OLG
# --------------------------------------------------------------------------- #
def _refuse(report, mode: Mode) -> None:
    failing = report.failing(mode)
    if failing:
        raise ConditionError(failing[0], f"{report.model}: condition {failing[0]!r} does not hold")


def olg_geometry(params: OlgParams, K: Optional[float] = None, hump: Optional[Hump] = None,
                 mode: Mode = "strict") -> Tuple[OrientedRectangle, List[RegionPredicate]]:
    """Trapezoid ``0 <= x <= K, x <= y <= M`` and ``K_i = R_i ∩ F^{-1}(R)`` split at ``x = xbar``.

    Raises:
        ConditionError: naming the first condition that does not hold
    """
    hump = hump or params.hump()
    K = params.K if K is None else K
    _refuse(olg_conditions(params, K, hump), mode)
    M, xbar = hump.M, hump.xbar
    rect = make_rect_from_graphs(lambda x: x, lambda x: 0.0 * x + M, 0.0, K, name="R(K,M)")
    F = olg2d_map(params, hump)
    target = rect.region()
    eps = 1e-12 * max(1.0, M)

    def half(lo, hi):
        return lambda p: (p[:, 0] >= lo - eps) & (p[:, 0] <= hi + eps) & rect.contains(p)

    r0 = RegionPredicate(half(0.0, xbar), rect.bbox, 0, "R0")
    r1 = RegionPredicate(half(xbar, K), rect.bbox, 1, "R1")
    regions = [r0.preimage(F.evaluate, target, name="K0"), r1.preimage(F.evaluate, target, name="K1")]
    return rect, regions


def olg_alt_geometry(params: OlgAltParams) -> OrientedRectangle:
    """Region ``0 <= y <= b g(x), x <= y <= nu x + d`` with sides on the graph of ``b g``.

    Construction only; no theorem is checked for this shape.
    """
    base = params.base()
    b, nu, d = params.b, params.nu, params.d

    def bg(x):
        return b * base.g(np.asarray(x, dtype=float))

    def h(x):
        return float(bg(x)) - (nu * x + d)

    def k(x):
        return float(bg(x)) - x

    xbar = base.xbar
    if h(xbar) <= 0:
        raise GeometryError("the line y = nu x + d does not cut the graph of b g")
    far = xbar
    while h(far) >= 0 or k(far) >= 0:
        far *= 2
        if far > 1e6:
            raise GeometryError("could not bracket the right corners of the region")
    x1 = brentq(h, 0.0, xbar, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    x2 = brentq(h, xbar, far, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    xr = brentq(k, x2, far, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    logger.debug("olg2d_alt corners x1=%.12g x2=%.12g xr=%.12g", x1, x2, xr)

    def graph(x):
        return np.column_stack([x, bg(x)])

    def left(s):
        return graph(s * x1)

    def right(s):
        return graph(xr + s * (x2 - xr))

    def down(s):
        return np.column_stack([s * xr, s * xr])

    def up(s):
        x = x1 + s * (x2 - x1)
        return np.column_stack([x, nu * x + d])

    def contains(p):
        x, y = p[:, 0], p[:, 1]
        eps = 1e-10 * np.maximum(1.0, np.abs(p).max(axis=1))
        return (x >= -eps) & (y >= x - eps) & (y <= nu * x + d + eps) & (y <= bg(np.clip(x, 0, None)) + eps)

    return make_rect_from_arcs(left, right, down, up, contains, name="R(nu,d)")


# --------------------------------------------------------------------------- #
# Duopoly
# --------------------------------------------------------------------------- #
def duopoly_geometry(params: DuopolyParams, mode: Mode = "strict"
                     ) -> Tuple[OrientedRectangle, List[RegionPredicate], np.ndarray]:
    """Trapezoid ``P <= y <= Q, 0 <= x <= X(y)``, regions split along ``S: x = X(y)/2``.

    Returns the rectangle, ``K_i = R_i ∩ F^{-1}(R)`` and samples of the segment ``S``.
    """
    _refuse(duopoly_conditions(params), mode)
    P, Q = params.P, params.Q
    if not Q > P:
        raise ConditionError("P < Q", "the case P = Q is degenerate")
    rect = make_rect_from_graphs(lambda y: 0.0 * y, params.X, P, Q, orientation="graphs",
                                 axis="y", name="R(P,Q)")
    F = duopoly_map(params)
    target = rect.region()
    eps = 1e-12 * max(1.0, Q)

    def part(first: bool):
        def contains(p):
            mid = params.X(p[:, 1]) / 2
            side = p[:, 0] <= mid + eps if first else p[:, 0] >= mid - eps
            return side & rect.contains(p)
        return contains

    r0 = RegionPredicate(part(True), rect.bbox, 0, "R0")
    r1 = RegionPredicate(part(False), rect.bbox, 1, "R1")
    regions = [r0.preimage(F.evaluate, target, name="K0"), r1.preimage(F.evaluate, target, name="K1")]
    ys = np.linspace(P, Q, 257)
    segment = np.column_stack([params.X(ys) / 2, ys])
    return rect, regions, segment


# --------------------------------------------------------------------------- #
# Orientation counterexample
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class ReorientationExample:
    """A map stretching the unit square onto its re-oriented copy without fixed points."""

    map: PlanarMap
    rect: OrientedRectangle
    target: OrientedRectangle
    region: RegionPredicate


def translation_example(offset: float = 0.85) -> ReorientationExample:
    """``psi(x, y) = (offset + 0.1 y, 2x - 0.5)``.

    The image of the unit square is a thin vertical band crossing the square
    from bottom to top, so left-right paths are stretched onto the re-oriented
    square through ``K' = [1/4, 3/4] x [0, 1]``. For ``offset > 0.75`` the
    overlap of the square and its image is pushed above the square, so no
    fixed point exists.
    """
    psi = affine_map([[0.0, 0.1], [2.0, 0.0]], [offset, -0.5], f"reorient({offset:g})")
    rect = unit_square("R")
    return ReorientationExample(psi, rect, rect.reoriented("R~"), strip_region(0.25, 0.75, 0, "K'"))
