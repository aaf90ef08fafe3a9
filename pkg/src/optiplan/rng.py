"""Tiny deterministic 64-bit RNG used for scenario generation.

SplitMix64 is used instead of a stdlib generator so that scenario files can be
reproduced bit-for-bit from a seed by any implementation of the documented
algorithm (see docs/FORMATS.md).
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 (Steele, Lea, Flood 2014) with the standard constants."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self, lo: float, hi: float) -> float:
        """Uniform double in [lo, hi) from the top 53 bits of the next word."""
        u = (self.next_u64() >> 11) * 2.0**-53
        return lo + (hi - lo) * u
