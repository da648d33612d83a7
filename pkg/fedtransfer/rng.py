"""Seeded random-stream derivation.

Every random decision in the package draws from a ``numpy.random.Generator``
derived from the run seed plus a tuple of tags (purpose, round, client, ...).
Streams with different tags are statistically independent, and the same tags
always reproduce the same stream.
"""

import zlib
from typing import Union

import numpy as np

from .errors import InvalidArgumentError

Tag = Union[int, str]


def _tag_to_int(tag: Tag) -> int:
    if isinstance(tag, str):
        return zlib.crc32(tag.encode("utf-8"))
    if isinstance(tag, (int, np.integer)) and tag >= 0:
        return int(tag)
    raise InvalidArgumentError(f"Random-stream tags must be str or non-negative int, got {tag!r}")


def seed_sequence(seed: int, *tags: Tag) -> np.random.SeedSequence:
    """Build the SeedSequence for ``seed`` and ``tags``."""
    return np.random.SeedSequence([_tag_to_int(seed), *(_tag_to_int(t) for t in tags)])


def derive_rng(seed: int, *tags: Tag) -> np.random.Generator:
    """Return an independent generator for ``(seed, *tags)``."""
    return np.random.default_rng(seed_sequence(seed, *tags))


def derive_seed(seed: int, *tags: Tag) -> int:
    """Return a 32-bit integer seed for ``(seed, *tags)``."""
    return int(seed_sequence(seed, *tags).generate_state(1)[0])
