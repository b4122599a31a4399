import hashlib
from dataclasses import dataclass

import numpy as np


MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """Counter-based random substream.

    Draws come from numpy's Philox generator keyed by (seed, stream_id), so a given
    pair yields the same sequence on any platform and distinct stream ids are independent.
    """
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'seed', int(self.seed) & MASK64)
        object.__setattr__(self, 'stream_id', int(self.stream_id) & MASK64)

    @property
    def key(self) -> int:
        return self.seed | (self.stream_id << 64)

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream"""
        return np.random.Generator(np.random.Philox(key=self.key))

    def child(self, *path: int) -> 'RngStream':
        """Derived stream for a tagged sub-task (a class, a video, a training stage)"""
        digest = hashlib.blake2b(digest_size=8)
        digest.update(self.stream_id.to_bytes(8, 'little'))
        for item in path:
            digest.update(int(item).to_bytes(8, 'little', signed=True))
        return RngStream(self.seed, int.from_bytes(digest.digest(), 'little'))


def as_generator(rng: 'RngStream | np.random.Generator') -> np.random.Generator:
    """Accepts a stream (fresh generator) or an already running generator"""
    if isinstance(rng, RngStream):
        return rng.generator()
    return rng
