"""
Named random streams

All randomness in a run derives from one 64-bit seed. Each purpose
(split, init, shuffle, sampling, ais, ...) draws from its own stream, so
adding draws to one purpose never shifts another.
"""
import zlib

import numpy as np

SEED_MASK = (1 << 64) - 1


def _name_key(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


class RandomStreams:
    """Factory of independent generators keyed by purpose name"""

    def __init__(self, seed: int):
        self.seed = int(seed) & SEED_MASK

    def sequence(self, name: str, *keys: int) -> np.random.SeedSequence:
        spawn_key = (_name_key(name),) + tuple(int(k) for k in keys)
        return np.random.SeedSequence(entropy=self.seed, spawn_key=spawn_key)

    def generator(self, name: str, *keys: int) -> np.random.Generator:
        """
        Generator for a named purpose

        Args:
            name: Purpose of the stream ("init", "shuffle", ...)
            keys: Extra integer keys, e.g. a document length

        Returns:
            A fresh numpy Generator; the same (seed, name, keys) always
            yields the same sequence of draws
        """
        return np.random.Generator(np.random.PCG64(self.sequence(name, *keys)))
