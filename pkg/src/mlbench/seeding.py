"""Named random sub-streams derived from one master seed."""
from __future__ import annotations

import zlib

import numpy as np

U64_MAX = 2 ** 64 - 1


def _key(part) -> int:
    if isinstance(part, (int, np.integer)) and not isinstance(part, bool):
        if part < 0:
            raise ValueError("integer stream keys must be non-negative")
        return int(part)
    return zlib.crc32(str(part).encode("utf-8"))


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ValueError(f"seed must be an integer, got {seed!r}")
    if not 0 <= int(seed) <= U64_MAX:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return int(seed)


def substream_seed(master: int, *keys) -> np.random.SeedSequence:
    """Seed sequence for the stream named by ``keys`` under ``master``.

    ``substream(7, "partition", "chain-0")`` never collides with
    ``substream(7, "edges")``; the same names always give the same stream.
    """
    return np.random.SeedSequence(entropy=check_seed(master), spawn_key=tuple(_key(k) for k in keys))


def substream(master: int, *keys) -> np.random.Generator:
    return np.random.default_rng(substream_seed(master, *keys))
