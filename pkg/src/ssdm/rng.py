"""Reproducible random streams.

Substreams are derived from (seed, stream tag, indices...) through a
splitmix64-style mixing chain, so every scenario draw is a pure function of
its coordinates: parallel or out-of-order evaluation cannot perturb the
sequence, and distinct calls never share a stream.  The derived 64-bit key
seeds a PCG64 generator.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

# stream tags: solve-time oracle draws, validation draws, and epsilon-hat
# estimation never overlap because their tags differ
TAG_ORACLE = 0x01
TAG_VALIDATE = 0x02
TAG_EPSILON = 0x03


def _finalize(z: int) -> int:
    z &= _MASK
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK
    z ^= z >> 31
    return z


def derive_key(seed: int, *path: int) -> int:
    """Mix a 64-bit key from a seed and a path of stream coordinates."""
    x = _finalize(seed & _MASK)
    for p in path:
        x = _finalize((x + _GOLDEN) ^ _finalize(p & _MASK))
    return x


def substream(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for the given stream coordinates."""
    return np.random.Generator(np.random.PCG64(derive_key(seed, *path)))
