"""Counter-based SplitMix64 generator.

The synthetic corpus must be identical on every platform, so noise and
section plans come from this generator rather than from numpy's bit
generators.  Output ``i`` of a stream seeded with ``s`` is
``mix(s + (i + 1) * GAMMA)`` (all arithmetic mod 2**64), which lets whole
blocks be produced with vectorized numpy code.

Constants (Steele, Lea & Flood 2014):

    GAMMA = 0x9E3779B97F4A7C15
    MIX1  = 0xBF58476D1CE4E5B9   (after >> 30)
    MIX2  = 0x94D049BB133111EB   (after >> 27), final >> 31
"""
from __future__ import annotations

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
_MASK = (1 << 64) - 1


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
    return z ^ (z >> np.uint64(31))


def mix64(*values: int) -> int:
    """Hash a tuple of integers into one 64-bit seed."""
    acc = 0
    for v in values:
        acc = (acc ^ (int(v) & _MASK)) & _MASK
        acc = int(_mix(np.array([(acc + GAMMA) & _MASK], dtype=np.uint64))[0])
    return acc


class SplitMix64:
    """Stream of 64-bit words with cheap block generation."""

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK
        self.counter = 0

    def next_u64(self, n: int) -> np.ndarray:
        idx = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        self.counter += n
        with np.errstate(over="ignore"):
            state = np.uint64(self.seed) + idx * np.uint64(GAMMA)
            return _mix(state)

    def uniform(self, n: int, low: float = 0.0, high: float = 1.0) -> np.ndarray:
        """``n`` doubles in ``[low, high)`` built from the top 53 bits."""
        u = (self.next_u64(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53
        return low + (high - low) * u

    def scalar(self, low: float = 0.0, high: float = 1.0) -> float:
        return float(self.uniform(1, low, high)[0])

    def integer(self, low: int, high: int) -> int:
        """Uniform integer in ``[low, high]`` inclusive."""
        span = high - low + 1
        return low + int(int(self.next_u64(1)[0]) % span)
