"""Deterministic 64-bit SplitMix-style PRNG.

Used wherever golden files must be reproducible across implementations
(dirty-record corruption, synthetic score generation). The algorithm is
the standard SplitMix64 finalizer: state advances by the golden-gamma
constant and each output is a mixed copy of the state.
"""

from __future__ import annotations

import math

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    """Seeded deterministic stream of 64-bit integers and derived draws."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform double in the open interval (0, 1)."""
        return (self.next_u64() + 0.5) / 2.0**64

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n) via rejection on the top 2^64 multiple."""
        if n <= 0:
            raise ValueError("randint bound must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def gauss(self) -> float:
        """Standard normal via Box-Muller (consumes two uniforms)."""
        u1 = self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)
