"""Discretization of continuous state variables into m-hot spike volleys.

Each state variable has an interval spec (strictly increasing breakpoints,
outer endpoints may be infinite).  A value maps to a 1-based interval
index, the index to ``m`` adjacent spikes on a field of ``N + m - 1``
lines, and per-variable fields concatenate into one volley.  Adjacent
intervals share ``m - |i - j|`` lines, which is what lets a clustering
column see similar values as similar volleys.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Sequence

from .spike import INF, Volley


@dataclass(frozen=True)
class IntervalSpec:
    """Strictly increasing breakpoints delimiting ``N = len - 1`` intervals."""

    breakpoints: tuple[float, ...]

    def __post_init__(self):
        if len(self.breakpoints) < 2:
            raise ValueError("need at least two breakpoints")
        if any(b >= a for b, a in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")

    @property
    def n(self) -> int:
        return len(self.breakpoints) - 1

    @staticmethod
    def equal(lo: float, hi: float, n: int) -> "IntervalSpec":
        step = (hi - lo) / n
        return IntervalSpec(tuple(lo + k * step for k in range(n)) + (hi,))


def discretize(value: float, spec: IntervalSpec) -> int:
    """1-based interval index of ``value``.

    Boundary values belong to the upper interval, except the global
    maximum which closes the last interval.  Finite out-of-range values
    clamp to the end intervals (failure detection is the environment's
    job, not the encoder's).
    """
    if math.isnan(value):
        raise ValueError("cannot discretize NaN")
    i = bisect_right(spec.breakpoints, value)
    return min(max(i, 1), spec.n)


def encode_mhot(i: int, n: int, m: int) -> Volley:
    """Interval ``i`` of ``n`` as ``m`` adjacent time-0 spikes on
    ``n + m - 1`` lines (lines ``i .. i+m-1``, 1-based)."""
    if not 1 <= i <= n:
        raise ValueError(f"interval index {i} outside 1..{n}")
    if m < 1 or m % 2 == 0:
        raise ValueError(f"hotness m must be odd and positive, got {m}")
    times = [INF] * (n + m - 1)
    for line in range(i - 1, i - 1 + m):
        times[line] = 0
    return Volley(tuple(times))


@dataclass(frozen=True)
class EncoderConfig:
    """Per-variable interval specs plus shared hotness and mode."""

    specs: tuple[IntervalSpec, ...]
    m: int = 3
    mode: str = "binarized"

    def __post_init__(self):
        if self.m < 1 or self.m % 2 == 0:
            raise ValueError(f"hotness m must be odd and positive, got {self.m}")
        if self.mode not in ("binarized", "temporized"):
            raise ValueError(f"unknown encoder mode {self.mode!r}")

    @property
    def width(self) -> int:
        return sum(s.n + self.m - 1 for s in self.specs)

    def interval_counts(self) -> tuple[int, ...]:
        return tuple(s.n for s in self.specs)


def encode_state(
    values: Sequence[float],
    config: EncoderConfig,
    strengths: Sequence[int] | None = None,
) -> Volley:
    """Concatenated m-hot encoding of one sample, in declared variable order.

    In temporized mode each variable's spikes are offset by its strength
    time (earlier = stronger); binarized mode puts every spike at 0.
    """
    if len(values) != len(config.specs):
        raise ValueError(
            f"sample has {len(values)} values for {len(config.specs)} specs"
        )
    if config.mode == "temporized":
        if strengths is None or len(strengths) != len(values):
            raise ValueError("temporized mode needs one strength per variable")
    times: list[float] = []
    for k, (value, spec) in enumerate(zip(values, config.specs)):
        i = discretize(value, spec)
        part = list(encode_mhot(i, spec.n, config.m).times)
        if config.mode == "temporized":
            part = [t + strengths[k] if t != INF else INF for t in part]
        times.extend(part)
    return Volley(tuple(times))


@dataclass
class StateEncoder:
    """Caching encoder front-end.

    Interval tuples repeat constantly during an episode, so encodings are
    memoized; the cache also hands back the interval tuple itself, which
    the Q-table and fixed-policy agents consume directly.
    """

    config: EncoderConfig
    _cache: dict = field(default_factory=dict)

    def intervals(self, values: Sequence[float]) -> tuple[int, ...]:
        return tuple(
            discretize(v, s) for v, s in zip(values, self.config.specs)
        )

    def encode(self, values: Sequence[float]) -> tuple[tuple[int, ...], Volley]:
        key = self.intervals(values)
        volley = self._cache.get(key)
        if volley is None:
            times: list[float] = []
            for i, spec in zip(key, self.config.specs):
                times.extend(encode_mhot(i, spec.n, self.config.m).times)
            volley = Volley(tuple(times))
            self._cache[key] = volley
        return key, volley
