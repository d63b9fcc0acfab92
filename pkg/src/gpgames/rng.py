"""Seeded 64-bit generator shared by the Python engine and the compiled kernels.

SplitMix64 is used because both backends must draw the identical stream for a
given seed; its state update is three lines and trivially portable.
"""
from __future__ import annotations

import math

ALGORITHM = "splitmix64"

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.seed = seed
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n). Modulo reduction; bias is below n / 2**64."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def exponential(self, rate: float) -> float:
        return -math.log1p(-self.random()) / rate
