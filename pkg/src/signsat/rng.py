"""Reproducible random streams.

Every random quantity is drawn from a Philox (counter-based) generator whose
key is derived from ``(seed, tag, index)`` through :class:`numpy.random.SeedSequence`.
Because a stream depends only on its key, work split across threads or
reordered produces identical numbers.
"""

from __future__ import annotations

import numpy as np

from .errors import PreconditionError

# variate tags
REGRESSORS = 1
FIXED_EFFECT = 2
ERROR_T0 = 3
ERROR_T1 = 4
BOOTSTRAP = 10
TRIAL = 20
POPULATION = 30
SEARCH = 40

# rows per simulation block; fixed so output never depends on scheduling
BLOCK_ROWS = 4096

_MASK64 = (1 << 64) - 1


def check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed <= _MASK64:
        raise PreconditionError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def substream(seed: int, tag: int, index: int = 0) -> np.random.Generator:
    """Independent generator for ``(seed, tag, index)``."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=(int(tag), int(index)))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, tag: int, index: int = 0) -> int:
    """A 64-bit child seed, used to hand a stream family to another routine."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=(int(tag), int(index)))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def blocks(n: int):
    """``(block_index, start, stop)`` triples covering ``range(n)``."""
    for b, start in enumerate(range(0, n, BLOCK_ROWS)):
        yield b, start, min(start + BLOCK_ROWS, n)
