"""Deterministic random streams.

All randomness in the toolkit derives from a single 64-bit seed expanded
through the counter-based Philox generator: stream ``i`` of seed ``s`` is
``numpy.random.Philox(key=[s, i])``.  Any implementation of Philox-4x64-10
reproduces the streams from the same (seed, index) pairs.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Return the ``index``-th independent generator for ``seed``."""
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF),
                    np.uint64(index & 0xFFFFFFFFFFFFFFFF)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
