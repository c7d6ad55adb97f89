"""Deterministic 64-bit random generator (splitmix64).

All randomness in this package flows through SplitMix64 so that a single
integer seed reproduces every generated dataset bit-for-bit on any platform.
The raw stream is the reference splitmix64 sequence; frozen test vectors live
in tests/test_rng.py.
"""

import math

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    """splitmix64 stream with convenience samplers.

    next_raw() reproduces the reference sequence: the state advances by the
    golden-gamma constant and is scrambled by two xor-multiply rounds.
    """

    def __init__(self, seed: int = 0):
        self._state = seed & _MASK

    def next_raw(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return (z ^ (z >> 31)) & _MASK

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        """Uniform double in [lo, hi) from the top 53 bits of the stream."""
        u = (self.next_raw() >> 11) * 2.0 ** -53
        return lo + (hi - lo) * u

    def normal(self) -> float:
        """Standard normal via Box-Muller; consumes two raw outputs."""
        u1 = max(self.uniform(), 2.0 ** -53)
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def integer(self, n: int) -> int:
        """Integer in [0, n). Modulo bias is irrelevant at desk scale."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_raw() % n

    def shuffle(self, items: list) -> list:
        """In-place Fisher-Yates shuffle; returns the list."""
        for i in range(len(items) - 1, 0, -1):
            j = self.integer(i + 1)
            items[i], items[j] = items[j], items[i]
        return items
