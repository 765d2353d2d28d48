"""Discrete spike-time algebra: volleys, ramp responses, neurons, 1-WTA.

Times are non-negative integers plus the distinguished "no spike" value
``INF`` (``math.inf``), which absorbs arithmetic and orders after every
finite time.  A volley is one time per line of a bundle.  Excitatory
neurons sum ramp response functions and fire at the first threshold
crossing; a 1-WTA block then passes only the earliest output spike.

Synaptic weights are saturating fixed-point counters.  Columns store
them as integer numerators over a fixed scale (multiples of 1/128, or a
finer power for reinforcement columns) so all learning arithmetic is
exact and replays bit-identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

INF = math.inf

#: Base fixed-point denominator for synaptic weight counters.
WEIGHT_SCALE = 128

ResponseFn = Callable[[int, int], int]


# ---------------------------------------------------------------------------
# Volleys


@dataclass(frozen=True)
class Volley:
    """Spike times over a bundle of lines, one entry per line."""

    times: tuple[float, ...]

    def __post_init__(self):
        if len(self.times) < 1:
            raise ValueError("a volley needs at least one line")

    @property
    def width(self) -> int:
        return len(self.times)

    def finite_lines(self) -> list[int]:
        """0-based indices of lines carrying a spike."""
        return [i for i, t in enumerate(self.times) if t != INF]

    @property
    def spike_count(self) -> int:
        return sum(1 for t in self.times if t != INF)

    def is_onehot(self) -> bool:
        return self.spike_count == 1

    def is_binarized(self) -> bool:
        return all(t == 0 for t in self.times if t != INF)

    @staticmethod
    def onehot(width: int, line: int, time: float = 0) -> "Volley":
        times = [INF] * width
        times[line] = time
        return Volley(tuple(times))

    @staticmethod
    def empty(width: int) -> "Volley":
        return Volley((INF,) * width)


# ---------------------------------------------------------------------------
# Ramp response functions


def rif_response(w: int, t: int) -> int:
    """Unit-slope ramp saturating at amplitude ``w``; zero before arrival."""
    if t < 0 or w <= 0:
        return 0
    return min(w, t + 1)


def rif_response_offset(w: int, t: int, cutoff: int) -> int:
    """Ramp with a one-unit delay for weights at or below ``cutoff``.

    Low weights rise one time unit later than high weights, so a neuron
    whose relevant synapses have been depressed responds later than a
    fresh competitor even when both eventually cross threshold.
    """
    if t < 0 or w <= 0:
        return 0
    if w <= cutoff:
        return min(w, t)
    return min(w, t + 1)


def make_response(w_max: int, offset_low_weights: bool = True) -> ResponseFn:
    """Standard column response: delayed ramps for the lower half of the
    weight range (weights <= w_max // 2), plain ramps above."""
    if not offset_low_weights:
        return rif_response
    cutoff = w_max // 2
    return lambda w, t: rif_response_offset(w, t, cutoff)


# ---------------------------------------------------------------------------
# Neuron evaluation


@dataclass(frozen=True)
class NeuronConfig:
    """Threshold and evaluation horizon for an excitatory neuron."""

    theta: int
    w_max: int = 8
    t_max: int = 4

    def __post_init__(self):
        if self.theta < 1 or self.w_max < 1 or self.t_max < 1:
            raise ValueError("theta, w_max and t_max must all be >= 1")


def evaluate_neuron(
    inputs: Sequence[float],
    weights: Sequence[int],
    config: NeuronConfig,
    response: ResponseFn = rif_response,
) -> tuple[float, int]:
    """First threshold crossing of the summed response functions.

    Returns ``(spike_time, potential_at_spike)``; ``(INF, 0)`` when the
    body potential never reaches ``config.theta`` within ``t_max``.
    Weights are the integer inference values (already ceiled).
    """
    if len(inputs) != len(weights):
        raise ValueError(
            f"volley width {len(inputs)} != weight count {len(weights)}"
        )
    active = [(x, w) for x, w in zip(inputs, weights) if x != INF and w > 0]
    for t in range(config.t_max + 1):
        potential = sum(response(w, t - int(x)) for x, w in active)
        if potential >= config.theta:
            return t, potential
    return INF, 0


# ---------------------------------------------------------------------------
# Winner-take-all inhibition


class ConsistentChoice:
    """Pseudo-random selection that sticks while the same tie repeats.

    A draw is keyed by an opaque description of the tie.  While
    consecutive calls present the same key, the stored resolution is
    returned; any change of key triggers a fresh draw from the seeded
    stream.  Clearing resets the consecutiveness memory (the stream
    position is kept).
    """

    def __init__(self, rng):
        self._rng = rng
        self._key = None
        self._pick = None

    def pick(self, key, candidates: Sequence[int]) -> int:
        if key != self._key or self._pick not in candidates:
            self._key = key
            self._pick = candidates[self._rng.randrange(len(candidates))]
        return self._pick

    def note_decisive(self):
        """Record a call that needed no draw, breaking consecutiveness."""
        self._key = None
        self._pick = None

    def clear(self):
        self.note_decisive()


def wta_1(
    spikes: Sequence[float],
    potentials: Sequence[int],
    tie_policy: str = "lowest",
    tie_memory: ConsistentChoice | None = None,
) -> tuple[int | None, float]:
    """Pass the earliest spike; ties by highest potential, then policy.

    Returns ``(winner_line, winner_time)`` with 0-based line, or
    ``(None, INF)`` when no line spiked.  ``tie_policy`` is ``"lowest"``
    (systematic, lowest index) or ``"random"`` (consistent pseudo-random
    via ``tie_memory``).
    """
    if len(spikes) != len(potentials):
        raise ValueError("spikes and potentials must have equal length")
    best = min(spikes)
    if best == INF:
        if tie_memory is not None:
            tie_memory.note_decisive()
        return None, INF
    tied = [i for i, t in enumerate(spikes) if t == best]
    top = max(potentials[i] for i in tied)
    tied = [i for i in tied if potentials[i] == top]
    if len(tied) == 1 or tie_policy == "lowest":
        if tie_memory is not None:
            tie_memory.note_decisive()
        return tied[0], best
    if tie_policy != "random":
        raise ValueError(f"unknown tie policy {tie_policy!r}")
    if tie_memory is None:
        raise ValueError("random tie policy needs a ConsistentChoice")
    return tie_memory.pick(("wta", tuple(tied)), tied), best


def wta_volley(
    spikes: Sequence[float],
    potentials: Sequence[int],
    tie_policy: str = "lowest",
    tie_memory: ConsistentChoice | None = None,
) -> Volley:
    """`wta_1` packaged as a one-hot (or empty) volley."""
    winner, time = wta_1(spikes, potentials, tie_policy, tie_memory)
    if winner is None:
        return Volley.empty(len(spikes))
    return Volley.onehot(len(spikes), winner, time)


# ---------------------------------------------------------------------------
# Fixed-point weight helpers


def quantize(value, scale: int) -> int:
    """Exact integer numerator of ``value`` over ``scale``.

    Raises if the value is not representable, rather than rounding:
    learning increments must sit on the fixed-point grid or replays
    would not be exact.
    """
    frac = Fraction(value) * scale
    if frac.denominator != 1:
        raise ValueError(
            f"{value} is not a multiple of 1/{scale}; "
            "choose an increment on the fixed-point grid"
        )
    return int(frac)


def ceil_units(units: int, scale: int) -> int:
    """Ceiling of a fixed-point counter, as used for inference."""
    return -((-units) // scale)
