"""Deterministic, splittable random-number streams.

All stochastic paths in the toolkit derive their generator from one root seed
plus a named stream key, so per-module or per-curve parallelism cannot change
results: the stream assigned to each consumer is fixed by name, not by call
order.
"""

import zlib

import numpy as np


def spawn_rng(seed, *stream):
    """Return a Generator for the (seed, stream...) leaf of the seed tree.

    Stream components may be ints or strings; strings are hashed with a
    stable CRC so the mapping never depends on the process hash seed.
    """
    key = tuple(
        zlib.crc32(part.encode()) if isinstance(part, str) else int(part)
        for part in stream
    )
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=key)))
