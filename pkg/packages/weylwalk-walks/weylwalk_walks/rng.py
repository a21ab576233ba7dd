"""
Reproducible random streams.

An RngStream is an address, not a generator: (seed, stream_id, path) is
turned into a numpy SeedSequence spawn key and fed to the counter-based
Philox bit generator. The same address yields the same bits on every
platform and under every worker count.
"""

from dataclasses import dataclass, replace

import numpy as np

from weylwalk_core.errors import ArgumentError

_UINT64_MAX = 2**64 - 1


@dataclass(frozen=True)
class RngStream:
    """Address of an independent random stream."""

    seed: int
    stream_id: int = 0
    path: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        for name, value in (("seed", self.seed), ("stream_id", self.stream_id)):
            if not 0 <= value <= _UINT64_MAX:
                raise ArgumentError(f"{name} must be a 64-bit unsigned integer, got {value}")
        if any(i < 0 for i in self.path):
            raise ArgumentError(f"sub-stream indices must be non-negative: {self.path}")

    def seed_sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id, *self.path))

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(self.seed_sequence()))

    def substream(self, *indices: int) -> "RngStream":
        """Child stream; distinct index tuples give non-overlapping streams."""
        return replace(self, path=self.path + tuple(int(i) for i in indices))

    def describe(self) -> str:
        suffix = "/".join(str(i) for i in self.path)
        return f"{self.seed}:{self.stream_id}" + (f"/{suffix}" if suffix else "")
