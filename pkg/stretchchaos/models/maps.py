"""
Model parameter records and the maps they define.

Interval maps (logistic, one-dimensional OLG, the piecewise-linear
counterexample and the Li-Yorke broken line) come as ``IntervalMap``; planar
models (two-dimensional OLG, duopoly, twist maps) as ``PlanarMap``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, Optional, Sequence

import numpy as np

from ..errors import ConfigError, DomainError
from .base import FunctionMap, IntervalMap, PlanarMap

logger = logging.getLogger(__name__)


class _Params:
    """Mixin: validation hook plus dict conversion."""

    def __post_init__(self):
        for name, value in asdict(self).items():
            if isinstance(value, float) and not math.isfinite(value):
                raise ConfigError(f"{type(self).__name__}.{name} must be finite")
        self.validate()

    def validate(self) -> None:
        pass

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_mapping(cls, values: Dict[str, Any]):
        names = {f for f in cls.__dataclass_fields__}
        unknown = set(values) - names
        if unknown:
            raise ConfigError(f"unknown {cls.__name__} parameters: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in values.items()})


# --------------------------------------------------------------------------- #
# Parameter records
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class LogisticParams(_Params):
    mu: float = 4.5

    def validate(self):
        if self.mu <= 0:
            raise ConfigError("logistic mu must be positive")


@dataclass(frozen=True)
class Olg1dParams(_Params):
    mu: float = 20.0

    def validate(self):
        if self.mu <= 0:
            raise ConfigError("olg1d mu must be positive")


@dataclass(frozen=True)
class OlgParams(_Params):
    """Two-dimensional OLG map ``F(x, y) = (g(x) - y/b, g(x))``, ``g = (mu x e^-x)^(1/beta)``."""

    mu: float = 80.0
    b: float = 2.0
    beta: float = 1.3
    K: float = 6.0

    def validate(self):
        if self.mu <= 0:
            raise ConfigError("olg2d requires mu > 0")
        if self.b <= 1:
            raise ConfigError("olg2d requires b > 1")
        if self.beta <= 1:
            raise ConfigError("olg2d requires beta > 1")
        if self.K <= 0:
            raise ConfigError("olg2d requires K > 0")

    @property
    def xbar(self) -> float:
        return 1.0

    @property
    def M(self) -> float:
        return (self.mu / math.e) ** (1.0 / self.beta)

    def g(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            return np.where(x >= 0, (self.mu * np.clip(x, 0, None) * np.exp(-x)) ** (1.0 / self.beta), np.nan)

    def hump(self) -> "Hump":
        return Hump(self.g, self.xbar, self.M)


@dataclass(frozen=True)
class Hump:
    """A unimodal ``g`` with ``g(0) = 0`` and maximum ``M`` at ``xbar``."""

    g: Callable[[np.ndarray], np.ndarray]
    xbar: float
    M: float


@dataclass(frozen=True)
class OlgAltParams(_Params):
    mu: float = 14.5
    b: float = 2.0
    beta: float = 1.0 / 0.95
    nu: float = 0.6
    d: float = 3.662313254

    def validate(self):
        OlgParams(self.mu, self.b, self.beta, 1.0)
        if not 0 < self.nu < 1 or self.d <= 0:
            raise ConfigError("olg2d_alt requires 0 < nu < 1 and d > 0")

    def base(self) -> OlgParams:
        return OlgParams(self.mu, self.b, self.beta, 1.0)


@dataclass(frozen=True)
class DuopolyParams(_Params):
    a: float = 10.0
    b: float = 0.5
    c1: float = 3.0
    c2: float = 5.0
    alpha: float = 1.05
    nu: float = 0.5

    def validate(self):
        if min(self.a, self.b, self.c1, self.c2, self.alpha) <= 0:
            raise ConfigError("duopoly requires a, b, c1, c2, alpha > 0")
        if not 0.0 <= self.nu <= 1.0:
            raise ConfigError("duopoly requires nu in [0, 1]")

    @property
    def P(self) -> float:
        return (self.a + self.c1 - 2 * self.c2 - 1 / self.alpha) / (3 * self.b)

    @property
    def Q(self) -> float:
        return (self.a - self.c2) / (2 * self.b)

    def X(self, y):
        """Right edge ``x = (a - c1 + 1/alpha)/(2b) - y/2`` of the trapezoid."""
        return (self.a - self.c1 + 1 / self.alpha) / (2 * self.b) - np.asarray(y, dtype=float) / 2


@dataclass(frozen=True)
class CounterexampleParams(_Params):
    a: float = 0.3
    b: float = 0.6
    c: float = 0.2
    d: float = 0.8

    def validate(self):
        if not (0 < self.a < self.b < 1 and 0 < self.c < self.d < 1):
            raise ConfigError("counterexample requires 0 < a < b < 1 and 0 < c < d < 1")


@dataclass(frozen=True)
class LiYorkeParams(_Params):
    """Orbit points ``a -> b -> c -> d`` with ``d <= a < b < c``; ``d`` defaults to ``a``."""

    a: float = 0.0
    b: float = 0.5
    c: float = 1.0
    d: Optional[float] = None

    def validate(self):
        d = self.a if self.d is None else self.d
        if not (d <= self.a < self.b < self.c):
            raise ConfigError("li_yorke requires d <= a < b < c")

    @classmethod
    def from_mapping(cls, values):
        return cls(**{k: float(v) for k, v in values.items()})


@dataclass(frozen=True)
class Twist1Params(_Params):
    """Two overlapping annuli centred at ``(-r, 0)`` and ``(r, 0)``."""

    r: float = 3.0
    p1: float = 3.3
    p2: float = 6.0
    q1: float = 3.3
    q2: float = 6.0
    c1: float = -1.5
    d1: float = 3.3
    c2: float = 0.0
    d2: float = 0.9

    def validate(self):
        if self.r <= 0 or not (0 < self.p1 < self.p2) or not (0 < self.q1 < self.q2):
            raise ConfigError("twist1 requires r > 0, 0 < p1 < p2 and 0 < q1 < q2")
        if self.d1 == 0 or self.d2 == 0:
            raise ConfigError("twist1 requires nonzero d1 and d2")


@dataclass(frozen=True)
class Twist2Params(_Params):
    """An annulus about the origin and a horizontal strip."""

    p1: float = 3.0
    p2: float = 5.0
    q1: float = -1.0
    q2: float = 2.0
    c1: float = 0.4 * math.pi
    d1: float = 3.0 * math.pi
    c2: float = 1.0
    d2: float = 8.6

    def validate(self):
        if not (0 < self.p1 < self.p2):
            raise ConfigError("twist2 requires 0 < p1 < p2")
        if not (-self.p1 < self.q1 < self.q2 < self.p1):
            raise ConfigError("twist2 requires -p1 < q1 < q2 < p1")


# --------------------------------------------------------------------------- #
# Interval maps
# --------------------------------------------------------------------------- #
def logistic_map(params: LogisticParams) -> IntervalMap:
    mu = params.mu
    return IntervalMap(lambda x: mu * x * (1 - x), 0.0, 1.0, f"logistic(mu={mu:g})")


def olg1d_map(params: Olg1dParams) -> IntervalMap:
    mu = params.mu
    return IntervalMap(lambda x: mu * x * np.exp(-x), 0.0, math.inf, f"olg1d(mu={mu:g})")


def counterexample_map(params: CounterexampleParams) -> IntervalMap:
    a, b, c, d = params.a, params.b, params.c, params.d

    def f(s):
        s = np.asarray(s, dtype=float)
        return np.select(
            [s < a, s <= b],
            [(1 - c) / a * s + c, (s - b) / (a - b)],
            d / (1 - b) * (s - b),
        )

    return IntervalMap(f, 0.0, 1.0, "counterexample")


def li_yorke_map(params: LiYorkeParams) -> IntervalMap:
    """Broken line through ``(a, b), (b, c), (c, d)``."""
    d = params.a if params.d is None else params.d
    xs = np.array([params.a, params.b, params.c])
    ys = np.array([params.b, params.c, d])
    return IntervalMap(lambda x: np.interp(x, xs, ys), params.a, params.c, "li_yorke")


# --------------------------------------------------------------------------- #
# Planar maps
# --------------------------------------------------------------------------- #
def _first_quadrant(points: np.ndarray) -> np.ndarray:
    eps = 1e-12 * np.maximum(1.0, np.abs(points).max(axis=1))
    return (points[:, 0] >= -eps) & (points[:, 1] >= -eps)


def olg2d_map(params: OlgParams, hump: Optional[Hump] = None) -> PlanarMap:
    g = (hump or params.hump()).g
    b = params.b

    def fn(p):
        gx = g(np.clip(p[:, 0], 0, None))
        out = np.column_stack([gx - p[:, 1] / b, gx])
        out[~_first_quadrant(p)] = np.nan
        return out

    return FunctionMap(fn, f"olg2d(mu={params.mu:g},b={b:g},beta={params.beta:g})")


def duopoly_map(params: DuopolyParams) -> PlanarMap:
    a, b, c1, c2, al, nu = params.a, params.b, params.c1, params.c2, params.alpha, params.nu

    def fn(p):
        x, y = p[:, 0], p[:, 1]
        f1 = x * (1 + al * a - al * b * y - al * c1 - 2 * al * b * x)
        f2 = (1 - nu) * y + nu / (2 * b) * (a - c2 - b * x)
        out = np.column_stack([f1, f2])
        out[~_first_quadrant(p)] = np.nan
        return out

    return FunctionMap(fn, f"duopoly(alpha={al:g})")


def rotation_twist(center: Sequence[float], c: float, d: float, map_id: str) -> PlanarMap:
    """``z -> center + (z - center) exp(i (c + d |z - center|))``."""
    cx, cy = float(center[0]), float(center[1])

    def fn(p):
        dx, dy = p[:, 0] - cx, p[:, 1] - cy
        angle = c + d * np.hypot(dx, dy)
        cos, sin = np.cos(angle), np.sin(angle)
        return np.column_stack([cx + dx * cos - dy * sin, cy + dx * sin + dy * cos])

    return FunctionMap(fn, map_id)


def twist1_maps(params: Twist1Params) -> tuple:
    """``(phi, psi)`` twisting about ``(-r, 0)`` and ``(r, 0)``."""
    phi = rotation_twist((-params.r, 0.0), params.c1, params.d1, "twist1.phi")
    psi = rotation_twist((params.r, 0.0), params.c2, params.d2, "twist1.psi")
    return phi, psi


def ramp(t, lo: float, hi: float):
    """``min(1, max(0, (t - lo)/(hi - lo)))``."""
    return np.clip((np.asarray(t, dtype=float) - lo) / (hi - lo), 0.0, 1.0)


def twist2_maps(params: Twist2Params) -> tuple:
    """Rotation ``z e^{i f(|z|)}`` about the origin and the strip shear ``z + g(Im z)``.

    ``f`` and ``g`` ramp linearly across the annulus and the strip and are
    constant outside them.
    """
    c1, d1, p1, p2 = params.c1, params.d1, params.p1, params.p2
    c2, d2, q1, q2 = params.c2, params.d2, params.q1, params.q2

    def rotate(p):
        angle = c1 + d1 * ramp(np.hypot(p[:, 0], p[:, 1]), p1, p2)
        cos, sin = np.cos(angle), np.sin(angle)
        return np.column_stack([p[:, 0] * cos - p[:, 1] * sin, p[:, 0] * sin + p[:, 1] * cos])

    def shear(p):
        return np.column_stack([p[:, 0] + c2 + d2 * ramp(p[:, 1], q1, q2), p[:, 1]])

    return FunctionMap(rotate, "twist2.phi"), FunctionMap(shear, "twist2.psi")


def affine_map(matrix: Sequence[Sequence[float]], offset: Sequence[float], map_id: str = "affine") -> PlanarMap:
    """``z -> matrix @ z + offset``."""
    a = np.asarray(matrix, dtype=float).reshape(2, 2)
    b = np.asarray(offset, dtype=float).reshape(2)
    return FunctionMap(lambda p: p @ a.T + b, map_id)


# --------------------------------------------------------------------------- #
# Registry
# --------------------------------------------------------------------------- #
@dataclass(frozen=True)
class ModelSpec:
    params: type
    build: Callable[[Any], Any]
    planar: bool = True


MODELS: Dict[str, ModelSpec] = {
    "logistic": ModelSpec(LogisticParams, logistic_map, planar=False),
    "olg1d": ModelSpec(Olg1dParams, olg1d_map, planar=False),
    "counterexample": ModelSpec(CounterexampleParams, counterexample_map, planar=False),
    "li_yorke": ModelSpec(LiYorkeParams, li_yorke_map, planar=False),
    "olg2d": ModelSpec(OlgParams, olg2d_map),
    "duopoly": ModelSpec(DuopolyParams, duopoly_map),
    "twist1.phi": ModelSpec(Twist1Params, lambda p: twist1_maps(p)[0]),
    "twist1.psi": ModelSpec(Twist1Params, lambda p: twist1_maps(p)[1]),
    "twist2.phi": ModelSpec(Twist2Params, lambda p: twist2_maps(p)[0]),
    "twist2.psi": ModelSpec(Twist2Params, lambda p: twist2_maps(p)[1]),
}


def build_model(model: str, params: Any):
    """Construct the map for *model*; *params* may be a record or a mapping."""
    try:
        spec = MODELS[model]
    except KeyError:
        raise ConfigError(f"unknown model {model!r}; choose from {sorted(MODELS)}") from None
    if isinstance(params, dict):
        params = spec.params.from_mapping(params)
    return spec.build(params)


def eval_model(model: str, params: Any, point) -> Any:
    """Evaluate *model* at one point (a scalar for interval maps).

    Raises:
        DomainError: outside the model's domain
    """
    f = build_model(model, params)
    if MODELS[model].planar:
        return f(point)
    x = float(np.asarray(point, dtype=float).reshape(-1)[0])
    return f.scalar(x)
