"""Static network values: positions, route intervals and network lines."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from .geometry import EPS_M
from .temporal import format_timestamp


@dataclass(frozen=True)
class GPoint:
    netid: int
    rid: int
    measure: float
    side: int = 0

    def __post_init__(self):
        if self.side not in (-1, 0, 1):
            raise ValueError(f"side must be -1, 0 or 1, got {self.side}")
        object.__setattr__(self, "measure", float(self.measure))

    def __str__(self):
        return f"GPOINT({self.netid},{self.rid},{self.measure:.3f},{self.side})"


@dataclass(frozen=True)
class RouteInterval:
    """Interval on one route; ``pos1 > pos2`` marks travel against the measure."""

    rid: int
    pos1: float
    pos2: float
    side: int = 0

    def __post_init__(self):
        if self.side not in (-1, 0, 1):
            raise ValueError(f"side must be -1, 0 or 1, got {self.side}")
        object.__setattr__(self, "pos1", float(self.pos1))
        object.__setattr__(self, "pos2", float(self.pos2))

    @property
    def lo(self) -> float:
        return min(self.pos1, self.pos2)

    @property
    def hi(self) -> float:
        return max(self.pos1, self.pos2)

    @property
    def span(self) -> float:
        return abs(self.pos2 - self.pos1)


def sides_match(a: int, b: int) -> bool:
    return a == 0 or b == 0 or a == b


def overlapping_pair(intervals, eps: float = EPS_M) -> Optional[Tuple[RouteInterval, RouteInterval]]:
    """First pair of intervals that share interior points on one route side."""
    by_key: dict = {}
    for iv in intervals:
        by_key.setdefault((iv.rid, iv.side), []).append(iv)
    for key in sorted(by_key):
        group = sorted(by_key[key], key=lambda iv: (iv.lo, iv.hi))
        for i, a in enumerate(group):
            for b in group[i + 1:]:
                if b.lo >= a.hi - eps:
                    break
                if min(a.hi, b.hi) - max(a.lo, b.lo) > eps:
                    return a, b
    return None


@dataclass(frozen=True)
class GLine:
    netid: int
    glid: int
    intervals: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple(self.intervals))

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def is_quasi_disjoint(self, eps: float = EPS_M) -> bool:
        return overlapping_pair(self.intervals, eps) is None

    def tuples(self):
        """One ``GLINE(netid,rid,pos1,pos2,side,glid)`` string per interval."""
        return [
            f"GLINE({self.netid},{iv.rid},{iv.pos1:.3f},{iv.pos2:.3f},{iv.side},{self.glid})"
            for iv in self.intervals
        ]

    def __str__(self):
        return "\n".join(self.tuples()) if self.intervals else "GLINE()"


@dataclass(frozen=True)
class Intime:
    position: GPoint
    t: int

    @property
    def val(self) -> GPoint:
        return self.position

    @property
    def inst(self) -> int:
        return self.t

    def __str__(self):
        return f"INTIME({self.position},{format_timestamp(self.t)})"
