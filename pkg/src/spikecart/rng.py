"""Seedable, portable pseudo-random streams.

Every source of randomness in a trial (initial pole angles, tie
resolution, weight randomization) is drawn from its own named stream so
that adding or removing one consumer never perturbs the others.  All
streams derive deterministically from the trial seed, and the generator
is self-contained 64-bit integer arithmetic, so replays are bit-exact on
any platform.

The core generator is SplitMix64 (Steele, Lea & Flood's mix function):
state advances by a fixed odd constant and the output is a finalizing
hash of the state.  It is trivially seedable, passes BigCrush, and is
more than random enough for tie-breaking and uniform initial angles.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK
    return z ^ (z >> 31)


def _stream_seed(seed: int, name: str) -> int:
    """Derive a stream seed by hashing the stream name into the base seed."""
    h = 0xCBF29CE484222325  # FNV-1a offset basis
    for byte in name.encode("utf-8"):
        h = ((h ^ byte) * 0x100000001B3) & _MASK
    return _mix((seed & _MASK) ^ h)


class SplitMix64:
    """Deterministic 64-bit generator with named sub-streams."""

    __slots__ = ("_state",)

    def __init__(self, seed: int, stream: str = ""):
        self._state = _stream_seed(seed, stream) if stream else seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        return _mix(self._state)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n), unbiased via rejection sampling."""
        if n <= 0:
            raise ValueError(f"randrange bound must be positive, got {n}")
        limit = _MASK + 1 - ((_MASK + 1) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def choice(self, seq):
        return seq[self.randrange(len(seq))]


def trial_streams(seed: int) -> dict[str, SplitMix64]:
    """The standard named streams for one trial."""
    return {
        "angles": SplitMix64(seed, "angles"),
        "ties": SplitMix64(seed, "ties"),
        "weights": SplitMix64(seed, "weights"),
    }
