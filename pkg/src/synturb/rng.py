"""Counter-based random streams keyed by (master seed, labels...).

Every stochastic component draws from ``stream(seed, role, index)``; the
keying makes results independent of worker count and scheduling order.
"""
from __future__ import annotations

import zlib

import numpy as np

__all__ = ["stream", "key_int"]


def key_int(label) -> int:
    if isinstance(label, (int, np.integer)):
        if label < 0:
            raise ValueError("stream labels must be non-negative")
        return int(label)
    return zlib.crc32(str(label).encode("utf-8"))


def stream(seed: int, *labels) -> np.random.Generator:
    """Philox generator for the hierarchical key ``(seed, *labels)``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(key_int(x) for x in labels))
    return np.random.Generator(np.random.Philox(ss))
