"""Deterministic seeded randomness.

Every consumer derives its own generator from the run's master seed through a
fixed stream offset, so adding draws in one place never shifts another. The
bit generator is numpy's PCG64, whose output for a given seed is identical on
every platform.
"""

from __future__ import annotations

from enum import IntEnum
from typing import Sequence

import numpy as np

from app.errors import InvalidRangeError


class Stream(IntEnum):
    """Substream offsets; values are part of the reproducibility contract."""

    INIT = 1
    DROPOUT = 2
    SHUFFLE = 3
    SPLIT = 4
    SYNTH = 5
    FOLD = 6
    SEARCH = 7
    HOLDOUT = 8


class Prng:
    """Single-threaded PCG64 generator bound to ``(seed, stream, *path)``."""

    ALGORITHM = "PCG64"

    def __init__(self, seed: int, stream: Stream | int = 0, *path: int) -> None:
        self.seed = int(seed)
        self.stream = int(stream)
        self.path = tuple(int(p) for p in path)
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.stream, *self.path))
        self._generator = np.random.Generator(np.random.PCG64(sequence))

    @property
    def generator(self) -> np.random.Generator:
        return self._generator

    def uniform(self, lo: float, hi: float) -> float:
        """Draw one value in ``[lo, hi)``."""

        if not lo < hi:
            raise InvalidRangeError(f"uniform range requires lo < hi, got lo={lo}, hi={hi}")
        return float(self._generator.uniform(lo, hi))

    def random(self, shape: Sequence[int] | int) -> np.ndarray:
        """Array of float64 draws in ``[0, 1)``."""

        return self._generator.random(shape)

    def integers(self, lo: int, hi: int) -> int:
        """Draw an integer in the closed range ``[lo, hi]``."""

        return int(self._generator.integers(lo, hi, endpoint=True))

    def permutation(self, n: int) -> np.ndarray:
        return self._generator.permutation(n)

    def normal(self, loc: float, scale: float, shape: Sequence[int] | int) -> np.ndarray:
        return self._generator.normal(loc, scale, shape)


def derive_seed(seed: int, stream: Stream | int, *path: int) -> int:
    """Deterministic 32-bit child seed, used where a plain integer seed must be passed on."""

    sequence = np.random.SeedSequence(int(seed), spawn_key=(int(stream), *(int(p) for p in path)))
    return int(sequence.generate_state(1, dtype=np.uint32)[0])
