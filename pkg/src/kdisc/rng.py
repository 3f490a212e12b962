"""Seeded counter-based random streams, split by name.

Every random draw in the package goes through ``make_rng(seed, *names)``; the
names select an independent sub-stream, so adding a new consumer never shifts
the draws seen by existing ones.
"""

from __future__ import annotations

import zlib

import numpy as np


def make_rng(seed: int | None, *names: str | int) -> np.random.Generator:
    key = tuple(zlib.crc32(str(s).encode()) for s in names)
    ss = np.random.SeedSequence(entropy=seed, spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int | None, *names: str | int) -> int:
    """A 63-bit integer seed for a named sub-stream, for recording in outputs."""
    return int(make_rng(seed, *names).integers(0, 2**63 - 1))
