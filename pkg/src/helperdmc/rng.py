"""Counter-based SplitMix64 streams.

Every random draw in the package comes from here, so that a seed fixes
codebooks, messages, states and channel noise bit-for-bit, independent of
numpy's generator versions.  The k-th output (k = 0, 1, ...) of the stream
with seed ``s`` is ``mix64(s + (k + 1) * GOLDEN)`` taken modulo 2**64,
which is exactly the classic SplitMix64 sequence started at ``s``.

Child streams are derived with ``derive(seed, label) =
mix64(seed ^ mix64(label ^ SPLIT_SALT))``.  Uniform doubles use the top 53
bits: ``(u >> 11) * 2**-53``.  A categorical draw with cumulative table
``cdf`` (normalized so its last entry is exactly 1.0) returns the first
index with ``cdf[i] > f``.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
SPLIT_SALT = 0xD1B54A32D192ED03
INV53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
    return z ^ (z >> np.uint64(31))


def derive(seed: int, label: int) -> int:
    return mix64((seed & MASK64) ^ mix64((label & MASK64) ^ SPLIT_SALT))


def counter_u64(seed: int, counters: np.ndarray) -> np.ndarray:
    """Outputs of the stream ``seed`` at the given (0-based) positions."""
    c = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & MASK64) + (c + np.uint64(1)) * np.uint64(GOLDEN)
    return mix64_array(z)


def to_unit(u: np.ndarray) -> np.ndarray:
    return (np.asarray(u, dtype=np.uint64) >> np.uint64(11)).astype(np.float64) * INV53


def make_cdf(p) -> np.ndarray:
    """Cumulative table for categorical draws; trailing entry forced to 1."""
    p = np.asarray(p, dtype=np.float64)
    cdf = np.cumsum(p, axis=-1)
    return cdf / cdf[..., -1:]


def categorical(cdf: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Index of the first cdf entry strictly above each uniform in ``f``.

    ``cdf`` is either one table (shape ``(k,)``) or one table per draw
    (shape ``f.shape + (k,)``).
    """
    f = np.asarray(f, dtype=np.float64)
    return (f[..., None] >= cdf).sum(axis=-1).astype(np.int64)


class SplitMix64:
    """A seeded stream with a cursor, plus cheap labelled children."""

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self._pos = 0

    def split(self, label: int) -> "SplitMix64":
        return SplitMix64(derive(self.seed, label))

    def u64(self, size: int) -> np.ndarray:
        out = counter_u64(self.seed, np.arange(self._pos, self._pos + size, dtype=np.uint64))
        self._pos += size
        return out

    def random(self, size: int) -> np.ndarray:
        return to_unit(self.u64(size))

    def integers(self, high: int, size: int) -> np.ndarray:
        """Uniform integers in ``[0, high)`` via ``floor(f * high)``."""
        return np.minimum((self.random(size) * high).astype(np.int64), high - 1)

    def choice(self, p, size: int) -> np.ndarray:
        return categorical(make_cdf(p), self.random(size))
