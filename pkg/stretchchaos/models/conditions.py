"""
Admissible-parameter checks for the OLG and duopoly models.

Margins are reported signed (positive when the inequality holds); a margin
within ``1e-12 * max(1, |lhs|, |rhs|)`` of zero is a boundary case and is
never reported as holding strictly.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Literal, Optional

from .maps import DuopolyParams, Hump, OlgParams

logger = logging.getLogger(__name__)

Relation = Literal["<", "<=", ">", ">="]
Overall = Literal["holds_strict", "boundary", "fails"]
Mode = Literal["strict", "non-strict"]

REL_TOL = 1e-12


@dataclass(frozen=True)
class Condition:
    name: str
    left: float
    right: float
    relation: Relation

    @property
    def margin(self) -> float:
        if self.relation in ("<", "<="):
            return self.right - self.left
        return self.left - self.right

    @property
    def tolerance(self) -> float:
        return REL_TOL * max(1.0, abs(self.left), abs(self.right))

    @property
    def strict(self) -> bool:
        return self.relation in ("<", ">")

    @property
    def boundary(self) -> bool:
        return abs(self.margin) <= self.tolerance

    @property
    def holds(self) -> bool:
        if self.strict:
            return self.margin > self.tolerance
        return self.margin >= -self.tolerance

    def accepted(self, mode: Mode = "strict") -> bool:
        """Whether a construction may proceed; ``non-strict`` tolerates boundary margins."""
        return self.holds or (mode == "non-strict" and self.boundary)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "left": self.left,
            "right": self.right,
            "relation": self.relation,
            "margin": self.margin,
            "holds": self.holds,
            "boundary": self.boundary,
        }


@dataclass(frozen=True)
class ConditionReport:
    model: str
    conditions: List[Condition]
    values: Dict[str, float] = field(default_factory=dict)

    @property
    def overall(self) -> Overall:
        if any(c.margin < -c.tolerance for c in self.conditions):
            return "fails"
        if any(c.boundary for c in self.conditions):
            return "boundary"
        return "holds_strict"

    def failing(self, mode: Mode = "strict") -> List[str]:
        return [c.name for c in self.conditions if not c.accepted(mode)]

    def __getitem__(self, name: str) -> Condition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "overall": self.overall,
            "conditions": [c.to_dict() for c in self.conditions],
            "values": dict(self.values),
        }


def olg_conditions(params: OlgParams, K: Optional[float] = None,
                   hump: Optional[Hump] = None) -> ConditionReport:
    """``b g(K) <= K``, ``K < M (1 - 1/b)`` and ``K > xbar``."""
    hump = hump or params.hump()
    K = params.K if K is None else K
    gK = float(hump.g(K))
    conditions = [
        Condition("b*g(K) <= K", params.b * gK, K, "<="),
        Condition("K < M*(1-1/b)", K, hump.M * (1 - 1 / params.b), "<"),
        Condition("K > xbar", K, hump.xbar, ">"),
    ]
    report = ConditionReport("olg2d", conditions, {"M": hump.M, "xbar": hump.xbar, "K": K, "g(K)": gK})
    logger.info("olg2d conditions: %s (M=%.10g)", report.overall, hump.M)
    return report


def duopoly_conditions(params: DuopolyParams) -> ConditionReport:
    a, b, c1, c2, al = params.a, params.b, params.c1, params.c2, params.alpha
    P, Q = params.P, params.Q
    top = (a - c1 + 1 / al) / b
    conditions = [
        Condition("a-2c1+c2 > 26/(3alpha)", a - 2 * c1 + c2, 26 / (3 * al), ">"),
        Condition("a+c1-2c2-1/alpha >= 0", a + c1 - 2 * c2 - 1 / al, 0.0, ">="),
        Condition("P >= 0", P, 0.0, ">="),
        Condition("P < Q", P, Q, "<"),
        Condition("Q < (a-c1+1/alpha)/b", Q, top, "<"),
    ]
    report = ConditionReport("duopoly", conditions, {"P": P, "Q": Q, "x_max": top / 2})
    logger.info("duopoly conditions: %s (P=%.10g, Q=%.10g)", report.overall, P, Q)
    return report

