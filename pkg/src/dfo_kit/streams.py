"""Named, counter-based random streams.

Every stream is a ``numpy.random.Generator`` over the Philox-4x64 counter
generator, keyed by ``SeedSequence(seed, spawn_key=(tag...))``. A stream is
fully determined by the run seed and its tag tuple, so replicas and purposes
(Haar sampling, starting points, noise keys) never share state and replay
bit-for-bit.
"""
import hashlib

import numpy as np

__all__ = ["make_stream", "derive_u64"]


def _tag_int(tag):
    if isinstance(tag, (int, np.integer)):
        return int(tag)
    digest = hashlib.blake2b(str(tag).encode("utf-8"), digest_size=4).digest()
    return int.from_bytes(digest, "little")


def _seed_sequence(seed, tags):
    return np.random.SeedSequence(int(seed), spawn_key=tuple(_tag_int(t) for t in tags))


def make_stream(seed, *tags):
    return np.random.Generator(np.random.Philox(_seed_sequence(seed, tags)))


def derive_u64(seed, *tags):
    """A 64-bit integer key derived from ``seed`` and ``tags``."""
    return int(_seed_sequence(seed, tags).generate_state(1, dtype=np.uint64)[0])
