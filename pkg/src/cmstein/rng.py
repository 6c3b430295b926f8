"""Counter-based random streams.

Every random decision in the package draws from a Philox stream keyed by
``(master_seed, *key)``. Streams for different keys are independent, and a
stream depends only on its key, so results do not depend on which worker
executes which replication.
"""
from __future__ import annotations

import numpy as np

# stream purpose tags, first component of every key
DEGREES = 1
CONFIGURATION = 2
COUPLING = 3
ROOT = 4
PROBE = 5


def stream(master_seed: int, *key: int) -> np.random.Generator:
    seq = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))


def as_generator(seed) -> np.random.Generator:
    """Accept an int seed, an existing Generator, or None."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        return np.random.default_rng()
    return stream(int(seed))


def replicate(fn, count: int, threads: int = 1) -> list:
    """``[fn(r) for r in range(count)]``, optionally on a thread pool.

    Results come back in replication order whatever the schedule; ``fn``
    must derive all its randomness from ``r``.
    """
    if threads is None or threads <= 1 or count <= 1:
        return [fn(r) for r in range(count)]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count)))
