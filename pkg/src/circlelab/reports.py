"""Result records shared by the analysis, moebius and rotation modules."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .core import CircleInterval, CirclePoint

SCHEMA = "circlelab-report/1"


class Nature(str, enum.Enum):
    ATTRACTING = "Attracting"
    REPELLING = "Repelling"
    PARABOLIC_ABOVE = "ParabolicAboveBoth"
    PARABOLIC_BELOW = "ParabolicBelowBoth"
    SEMI_LEFT_IN = "SemiStableLeftIn"
    SEMI_RIGHT_IN = "SemiStableRightIn"
    # endpoints of a fixed arc whose outer neighbourhood moves away
    SEMI_LEFT_OUT = "SemiStableLeftOut"
    SEMI_RIGHT_OUT = "SemiStableRightOut"

    @property
    def is_parabolic(self):
        return self not in (Nature.ATTRACTING, Nature.REPELLING)


def nature_from_signs(left, right):
    """Nature of an isolated zero of the displacement from its side signs."""
    if left > 0 and right < 0:
        return Nature.ATTRACTING
    if left < 0 and right > 0:
        return Nature.REPELLING
    if left > 0:
        return Nature.PARABOLIC_ABOVE
    return Nature.PARABOLIC_BELOW


@dataclass
class FixedPoint:
    point: CirclePoint
    nature: Nature

    @property
    def crossing(self):
        """'hyperbolic' when the displacement changes sign at the point."""
        if self.nature in (Nature.ATTRACTING, Nature.REPELLING):
            return "hyperbolic"
        return "parabolic"

    def to_json(self):
        return {"point": self.point.to_json(), "nature": self.nature.value, "crossing": self.crossing}


@dataclass
class FixedPointReport:
    points: list = field(default_factory=list)
    is_identity: bool = False
    arcs: list = field(default_factory=list)
    approximate: bool = False

    @property
    def count(self):
        if self.is_identity or self.arcs:
            return math.inf
        return len(self.points)

    @property
    def natures(self):
        return [p.nature for p in self.points]

    def to_json(self):
        return {
            "schema": SCHEMA,
            "count": "inf" if self.count == math.inf else self.count,
            "is_identity": self.is_identity,
            "approximate": self.approximate,
            "points": [p.to_json() for p in self.points],
            "arcs": [[a.left.to_json(), a.right.to_json()] for a in self.arcs],
        }


@dataclass
class Crossing:
    point: CirclePoint
    kind: str  # "Hyperbolic" or "Parabolic"

    def to_json(self):
        return {"point": self.point.to_json(), "type": self.kind}


@dataclass
class CrossingReport:
    count: int
    crossings: list = field(default_factory=list)
    degenerate: bool = False
    approximate: bool = False
    notes: str = ""

    def to_json(self):
        return {
            "schema": SCHEMA,
            "count": self.count,
            "degenerate": self.degenerate,
            "approximate": self.approximate,
            "crossings": [c.to_json() for c in self.crossings],
            "notes": self.notes,
        }


__all__ = [
    "Nature",
    "FixedPoint",
    "FixedPointReport",
    "Crossing",
    "CrossingReport",
    "nature_from_signs",
    "CircleInterval",
    "CirclePoint",
    "SCHEMA",
]
