"""Deterministic 64-bit hashing primitives.

Everything downstream (shingle fingerprints, MinHash permutations, feature
hashing, seed derivation) goes through these so that results are reproducible
from a single integer master seed, with no dependence on PYTHONHASHSEED.
"""

from __future__ import annotations

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1

_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def fingerprint64(text: str) -> int:
    """Stable 64-bit fingerprint of a string."""
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def mix64(x: int) -> int:
    """Bijective 64-bit finalizer (splitmix64 style)."""
    x &= MASK64
    x ^= x >> 30
    x = (x * _MIX1) & MASK64
    x ^= x >> 27
    x = (x * _MIX2) & MASK64
    return x ^ (x >> 31)


def hash64(value: int, seed: int) -> int:
    """Seeded 64-bit hash; for a fixed seed this is a permutation of u64."""
    return mix64((value ^ seed) & MASK64)


def mix_array(x: np.ndarray) -> np.ndarray:
    """Vectorized mix64 over a uint64 array (any shape)."""
    x = x ^ (x >> np.uint64(30))
    x = x * np.uint64(_MIX1)
    x = x ^ (x >> np.uint64(27))
    x = x * np.uint64(_MIX2)
    return x ^ (x >> np.uint64(31))


def derive_seeds(master_seed: int, count: int) -> list[int]:
    """Expand one master seed into `count` well-spread 64-bit seeds."""
    state = master_seed & MASK64
    out = []
    for _ in range(count):
        state = (state + _GOLDEN) & MASK64
        out.append(mix64(state))
    return out


def derive_seed(master_seed: int, *names: str) -> int:
    """Named seed derivation: independent streams for independent purposes."""
    payload = "\x1f".join((str(master_seed & MASK64), *names))
    return fingerprint64(payload)
