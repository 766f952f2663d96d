"""Reproducible randomness with per-trial substreams.

The derivation rule is fixed by contract: the generator for (seed, trial) is
PCG64 keyed by SeedSequence([seed, trial]).  Identical (seed, trial) pairs
produce byte-identical sample streams on every platform, so independent
trials can run in any order or in parallel without affecting results.
"""

import numpy as np


def substream(seed: int, trial: int = 0) -> np.random.Generator:
    """Return the generator for trial `trial` of experiment `seed`."""
    if seed < 0 or trial < 0:
        raise ValueError("seed and trial must be non-negative")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, trial])))


def pick(rng: np.random.Generator, seq):
    """Choose one element of a non-empty sequence uniformly."""
    return seq[int(rng.integers(len(seq)))]


def shuffled(rng: np.random.Generator, seq):
    """Return a shuffled copy of `seq` as a list."""
    out = list(seq)
    n = len(out)
    for i in range(n - 1, 0, -1):
        j = int(rng.integers(i + 1))
        out[i], out[j] = out[j], out[i]
    return out
