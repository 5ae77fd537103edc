"""Seeded counter-based random streams.

Every Monte-Carlo trial draws from its own Philox stream keyed by
``(seed, tag, index)``, so results do not depend on how trials are scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["RngStream", "trial_generator"]


def trial_generator(seed: int, index: int, tag: int = 0) -> np.random.Generator:
    """Independent generator for trial `index` of the stream `(seed, tag)`."""
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, int(tag), int(index)])
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class RngStream:
    """A splittable stream: ``stream.substream(i)`` is a child stream."""

    seed: int
    path: tuple[int, ...] = ()

    def substream(self, index: int) -> "RngStream":
        return RngStream(self.seed, self.path + (int(index),))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence([int(self.seed) & 0xFFFFFFFFFFFFFFFF, *self.path])
        return np.random.Generator(np.random.Philox(ss))


def as_generator(rng) -> np.random.Generator:
    """Accept a Generator, an :class:`RngStream`, an int seed or None."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    return np.random.default_rng(rng)
