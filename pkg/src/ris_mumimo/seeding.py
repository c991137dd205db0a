"""Reproducible seed derivation.

Every random draw in the package comes from a ``numpy.random.Generator``
backed by the counter-based Philox bit generator, keyed by a 64-bit integer.
Keys for sub-streams are derived with :func:`mix`, a SplitMix64 finalizer
applied to ``seed + GOLDEN * (index + 1)`` modulo 2**64.  Because the
derivation is a pure function of ``(seed, index)`` a trial computes the same
numbers whether it runs serially or in a worker process.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

# sub-stream indices used inside one trial
STREAM_POSITIONS = 1
STREAM_FADING = 2
STREAM_RPS = 3
STREAM_FDMA_TARGET = 4
STREAM_JT = 5


def splitmix64(x: int) -> int:
    z = (x + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix(seed: int, index: int) -> int:
    """Derive the 64-bit key of sub-stream ``index`` from ``seed``."""
    return splitmix64((int(seed) + GOLDEN * (int(index) + 1)) & MASK64)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed) & MASK64))
