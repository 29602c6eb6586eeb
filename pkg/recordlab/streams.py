"""Reproducible random streams.

Each stream is a Philox counter-based generator keyed by (seed, scenario
name, replicate index). Two tasks never share a stream, so splitting work
across replicates or running scenarios in another order cannot change any
draw.
"""

import hashlib

import numpy as np

DEFAULT_SEED = 42
SEED_MAX = 2 ** 64 - 1


def name_key(name):
    """Stable 64-bit integer for a scenario name (Python's hash() is salted)."""
    digest = hashlib.blake2b(name.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def make_stream(seed, name="", replicate=0):
    """Create the generator for (seed, name, replicate).

    Args:
        seed (int): Unsigned 64-bit master seed.
        name (str): Scenario or task name.
        replicate (int): Replicate index within the task.

    Returns:
        numpy.random.Generator: A Philox-backed generator.
    """
    if not 0 <= seed <= SEED_MAX:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    if replicate < 0:
        raise ValueError(f"replicate must be >= 0, got {replicate}")
    entropy = np.random.SeedSequence([seed, name_key(name), replicate])
    return np.random.Generator(np.random.Philox(entropy))


def replicate_streams(seed, name, count):
    """Streams for replicates 0..count-1 of one task."""
    return [make_stream(seed, name, index) for index in range(count)]
