"""Splittable counter-based random streams.

All randomness flows through Philox generators keyed by an integer seed plus a
path of integer identifiers.  Distinct paths give statistically independent
streams, so trial t of a Monte Carlo run can use ``stream(seed, tag, t)`` and
produce the same numbers no matter how trials are scheduled across threads.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1


def stream(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for the stream identified by ``(seed, *path)``."""
    # The path length folds into the key: SeedSequence zero-pads its entropy
    # pool, so (tag,) and (tag, 0) would otherwise collide.
    entropy = ([int(seed) & _MASK, len(path)]
               + [int(p) & _MASK for p in path])
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def as_generator(seed_or_rng, *path: int) -> np.random.Generator:
    """Pass through an existing Generator, or derive one from an integer seed
    or a tuple of integers naming a stream."""
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    if isinstance(seed_or_rng, tuple):
        return stream(*seed_or_rng, *path)
    return stream(seed_or_rng, *path)
