"""Counter-based random streams for reproducible parallel matches.

A stream is a 64-bit key plus a counter. Draw ``n`` is
``mix64(key + (n + 1) * GOLDEN)``, i.e. the SplitMix64 output sequence
started at ``key``. Any draw can be computed without touching the others, so
streams never share state across threads or processes.

Keys are derived from a master seed and an integer path such as
``(cell, replication, agent)`` through :class:`numpy.random.SeedSequence`,
which hashes the path into well-separated entropy.
"""

from __future__ import annotations

import numba as nb
import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV53 = 1.0 / (1 << 53)


def derive_seed(seed: int, *path: int) -> int:
    """Hash ``seed`` and an index path into a fresh 64-bit integer."""
    ss = np.random.SeedSequence(entropy=int(seed) & MASK64, spawn_key=tuple(int(i) for i in path))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def mix64(z: int) -> int:
    z = (z ^ (z >> 30)) * _M1 & MASK64
    z = (z ^ (z >> 27)) * _M2 & MASK64
    return z ^ (z >> 31)


class CounterStream:
    """Pure-Python view of a stream; matches the compiled kernel bit for bit."""

    def __init__(self, key: int, counter: int = 0):
        self.key = int(key) & MASK64
        self.counter = int(counter)

    def next_uint64(self) -> int:
        self.counter += 1
        return mix64((self.key + self.counter * GOLDEN) & MASK64)

    def random(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_uint64() >> 11) * _INV53


_GOLDEN_U = np.uint64(GOLDEN)
_M1_U = np.uint64(_M1)
_M2_U = np.uint64(_M2)


@nb.njit(cache=True, nogil=True)
def stream_uniform(key, counter):
    """Draw number ``counter`` (1-based) of stream ``key`` as a float in [0, 1)."""
    z = key + counter * _GOLDEN_U
    z = (z ^ (z >> np.uint64(30))) * _M1_U
    z = (z ^ (z >> np.uint64(27))) * _M2_U
    z = z ^ (z >> np.uint64(31))
    return float(z >> np.uint64(11)) * _INV53
