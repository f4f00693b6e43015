"""Named, reproducible random streams.

Every stochastic routine takes an explicit generator.  Streams are derived
from a master seed, a purpose name and a replication index, so no two
tests or replications ever share a stream and results are independent of
worker-pool size.
"""
from __future__ import annotations

import hashlib

import numpy as np


def _name_key(name: str) -> list[int]:
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    return [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]


def stream(master_seed: int, name: str, index: int = 0) -> np.random.Generator:
    """Generator for (master_seed, name, index), stable across platforms."""
    ss = np.random.SeedSequence([int(master_seed), *_name_key(name), int(index)])
    return np.random.Generator(np.random.PCG64(ss))


def substreams(master_seed: int, name: str, count: int) -> list[np.random.Generator]:
    """Independent per-replication generators 0..count-1."""
    return [stream(master_seed, name, i) for i in range(count)]
