"""Deterministic random streams.

Every source of randomness in the package draws from a single 64-bit seed
through keyed substreams, so results are reproducible regardless of call
order or parallel scheduling.
"""

import numpy as np


def substream(seed, *key):
    """Generator for the substream of ``seed`` identified by the integer key path."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def rademacher(rng, size):
    """+1/-1 entries, real valued."""
    return 2.0 * rng.integers(0, 2, size=size) - 1.0
