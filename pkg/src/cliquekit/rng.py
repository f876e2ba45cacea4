"""Seeded random streams.

Every random draw in the package comes from a numpy ``PCG64`` generator
whose ``SeedSequence`` entropy is ``[seed, key_1, key_2, ...]``. Integer keys
are used as-is; string keys are mapped to 64-bit integers with BLAKE2b. The
same ``(seed, keys)`` therefore always yields the same stream, independent
of how many other streams were drawn before it. Examples:

* ``substream(seed, "initial", f)``: erasures of the initial broadcast of file f
* ``substream(seed, "erasure", t)``: per-user erasures in coded slot t
* ``substream(seed, "bpso", t)``: swarm randomness for the solve at slot t
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def label_key(label: str) -> int:
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def _entropy(seed: int, keys: tuple) -> list[int]:
    out = [int(seed) & _MASK64]
    for k in keys:
        if isinstance(k, str):
            out.append(label_key(k))
        elif isinstance(k, (int, np.integer)) and k >= 0:
            out.append(int(k) & _MASK64)
        else:
            raise TypeError(f"stream keys must be str or non-negative int, got {k!r}")
    return out


def substream(seed: int, *keys: str | int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(_entropy(seed, keys))))


def derive_seed(seed: int, *keys: str | int) -> int:
    """64-bit child seed for ``(seed, keys)``."""
    ss = np.random.SeedSequence(_entropy(seed, keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
