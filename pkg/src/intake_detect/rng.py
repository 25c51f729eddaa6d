"""SplitMix64: a small, portable 64-bit generator.

Output ``k`` (1-based) of a generator seeded with ``s`` is
``mix(s + k * 0x9E3779B97F4A7C15 mod 2**64)`` where ``mix`` is::

    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z =  z ^ (z >> 31)

all modulo 2**64. Derived variates:

* uniform in [0, 1): ``(u64 >> 11) * 2**-53``
* standard normal: Box-Muller on two consecutive uniforms ``u1, u2``,
  ``sqrt(-2 ln(1 - u1)) * cos(2 pi u2)``; the sine branch is discarded
* exponential with mean ``m``: ``-m * ln(1 - u)``

Because each output depends only on the seed and its position, batches can
be generated with vectorised numpy and match the scalar path bit for bit.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    def __init__(self, seed: int) -> None:
        self.state = int(seed) & MASK64

    def next_u64_array(self, n: int) -> np.ndarray:
        k = np.arange(1, n + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self.state) + k * np.uint64(GOLDEN_GAMMA)
            out = _mix(z)
        self.state = (self.state + n * GOLDEN_GAMMA) & MASK64
        return out

    def next_u64(self) -> int:
        return int(self.next_u64_array(1)[0])

    def uniform_array(self, n: int) -> np.ndarray:
        return (self.next_u64_array(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def uniform(self) -> float:
        return float(self.uniform_array(1)[0])

    def normal_array(self, n: int) -> np.ndarray:
        u = self.uniform_array(2 * n)
        return np.sqrt(-2.0 * np.log1p(-u[0::2])) * np.cos(2.0 * np.pi * u[1::2])

    def normal(self) -> float:
        return float(self.normal_array(1)[0])

    def exponential(self, mean: float) -> float:
        return float(-mean * np.log1p(-self.uniform_array(1)[0]))
