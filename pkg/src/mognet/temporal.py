"""Timestamps, periods and period sets.

Instants are integer milliseconds since the Unix epoch (UTC). Periods are
half-open ``[t_start, t_end)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Iterable

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)
_MS = timedelta(milliseconds=1)

ISO_PATTERN = re.compile(
    r"^(\d{4})-(\d{2})-(\d{2})T(\d{2}):(\d{2}):(\d{2})(?:\.(\d{1,3}))?(Z|[+-]\d{2}:\d{2})$"
)


def parse_timestamp(text: str) -> int:
    """ISO-8601 (``2011-01-21T00:04:42.600Z``) to epoch milliseconds."""
    m = ISO_PATTERN.match(text.strip())
    if not m:
        raise ValueError(f"not an ISO-8601 timestamp with at most ms precision: {text!r}")
    year, month, day, hh, mm, ss, frac, zone = m.groups()
    ms = int((frac or "0").ljust(3, "0"))
    tz = timezone.utc
    if zone != "Z":
        sign = 1 if zone[0] == "+" else -1
        tz = timezone(sign * timedelta(hours=int(zone[1:3]), minutes=int(zone[4:6])))
    dt = datetime(int(year), int(month), int(day), int(hh), int(mm), int(ss), ms * 1000, tzinfo=tz)
    return (dt - _EPOCH) // _MS


def format_timestamp(ms: int) -> str:
    dt = _EPOCH + timedelta(milliseconds=int(ms))
    return dt.strftime("%Y-%m-%dT%H:%M:%S.") + f"{dt.microsecond // 1000:03d}Z"


def is_timestamp(text: str) -> bool:
    return bool(ISO_PATTERN.match(text))


@dataclass(frozen=True, order=True)
class Period:
    t_start: int
    t_end: int

    def __post_init__(self):
        if not self.t_start < self.t_end:
            raise ValueError(f"empty period [{self.t_start}, {self.t_end})")

    @property
    def duration_ms(self) -> int:
        return self.t_end - self.t_start

    def __contains__(self, t) -> bool:
        return self.t_start <= t < self.t_end

    def __str__(self):
        return f"PERIOD({format_timestamp(self.t_start)},{format_timestamp(self.t_end)})"


class Periods:
    """Sorted, pairwise disjoint set of periods; touching periods are merged."""

    __slots__ = ("periods",)

    def __init__(self, periods: Iterable = ()):
        items = sorted(p if isinstance(p, Period) else Period(*p) for p in periods)
        merged: list = []
        for p in items:
            if merged and p.t_start <= merged[-1].t_end:
                last = merged[-1]
                if p.t_end > last.t_end:
                    merged[-1] = Period(last.t_start, p.t_end)
            else:
                merged.append(p)
        self.periods = tuple(merged)

    def __iter__(self):
        return iter(self.periods)

    def __len__(self):
        return len(self.periods)

    def __bool__(self):
        return bool(self.periods)

    def __eq__(self, other):
        return isinstance(other, Periods) and self.periods == other.periods

    def __hash__(self):
        return hash(self.periods)

    def __contains__(self, t) -> bool:
        return any(t in p for p in self.periods)

    def __repr__(self):
        return f"Periods({list(self.periods)!r})"

    @property
    def total_ms(self) -> int:
        return sum(p.duration_ms for p in self.periods)
