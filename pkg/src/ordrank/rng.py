"""Seeded random streams.

Every random draw in the package comes from numpy's PCG64 bit generator
seeded through a :class:`numpy.random.SeedSequence`.  A stream is named by
a root seed plus a tuple of integer keys (``purpose, index, ...``) that is
passed as the sequence's ``spawn_key``.  Streams with different keys are
statistically independent, and the same (seed, keys) pair always yields the
same draws on every platform numpy supports.
"""

import numpy as np

# Purpose tags used as the first spawn key.
SPLITS = 1
INIT = 2
SHUFFLE = 3
FOLDS = 4
DERIVE = 5


def stream(seed, *keys):
    """Return a PCG64-backed Generator for ``(seed, keys)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed, *keys):
    """Derive a child integer seed (uint32 range) from a parent seed."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(DERIVE,) + tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint32)[0])
