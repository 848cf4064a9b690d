"""SplitMix64 generator shared by every sampling step in the package.

One generator keeps same-seed runs bit-reproducible: dataset balancing,
splitting, bootstrap draws and feature sampling in the forest all read from
it. The scalar and vectorised paths produce the same stream.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = int(seed) & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        return _mix(self.state)

    def u64_array(self, n: int) -> np.ndarray:
        """Next ``n`` outputs as a uint64 array (same values as ``next_u64``)."""
        steps = np.arange(1, n + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self.state) + steps * np.uint64(_GAMMA)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
            z = z ^ (z >> np.uint64(31))
        self.state = (self.state + n * _GAMMA) & _MASK
        return z

    def randbelow(self, n: int) -> int:
        """Unbiased integer in ``[0, n)`` by rejection."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def integers(self, n: int, size: int) -> np.ndarray:
        """``size`` draws from ``[0, n)``, n < 2**32, via multiply-shift."""
        if not 0 < n < (1 << 32):
            raise ValueError("n out of range")
        hi = self.u64_array(size) >> np.uint64(32)
        return ((hi * np.uint64(n)) >> np.uint64(32)).astype(np.intp)

    def permutation(self, n: int) -> np.ndarray:
        """Random ordering of ``range(n)`` from sorting fresh 64-bit keys."""
        return np.argsort(self.u64_array(n), kind="stable")

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]
