"""
Deterministic random streams.

Every analyzer instance draws from its own generator, derived from the
master seed and a canonical key naming the run and the device. The key
is hashed rather than enumerated, so grids can be split or reordered
without changing any stream.
"""

import hashlib
from enum import Enum
from typing import Any

import numpy as np


def _canonical(part: Any) -> str:
    if isinstance(part, Enum):
        return str(part.value)
    if isinstance(part, float):
        return repr(part)
    if isinstance(part, (tuple, list)):
        return "(" + ",".join(_canonical(p) for p in part) + ")"
    return str(part)


def stream_key(*parts: Any) -> str:
    """Stable text key, e.g. 'uncertainty|0.5|1|-1|(1.0,0.0,0.0)|SA2'."""
    return "|".join(_canonical(p) for p in parts)


def seed_sequence(master_seed: int, key: str) -> np.random.SeedSequence:
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return np.random.SeedSequence([master_seed, int.from_bytes(digest[:8], "big")])


def make_generator(master_seed: int, key: str) -> np.random.Generator:
    """PCG64 generator for one device stream."""
    return np.random.default_rng(seed_sequence(master_seed, key))
