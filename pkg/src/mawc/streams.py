"""Seeded, splittable random streams.

Every random draw in the package comes from a ``numpy.random.Generator``
built by :func:`stream`.  A stream is identified by the 64-bit master seed
plus a tuple of non-negative integer indices; the indices become the
``spawn_key`` of a :class:`numpy.random.SeedSequence`, so distinct index
tuples give statistically independent PCG64 streams and the same tuple
always gives the same stream.

Index layout used across the package (first index is a domain tag, all
tuples padded to three entries so no key is a prefix of another):

    (CODE, code_index, 0)          code construction
    (TRIAL, code_index, trial)     one Monte Carlo trial
    (SCAN, trial, 0)               one random PMF in the equivalence scan
"""

from __future__ import annotations

import numpy as np

CODE = 1
TRIAL = 2
SCAN = 3
MISC = 4

MASK64 = (1 << 64) - 1


def stream(master_seed: int, *indices: int) -> np.random.Generator:
    if master_seed < 0:
        raise ValueError("master seed must be non-negative")
    if any(i < 0 for i in indices):
        raise ValueError("stream indices must be non-negative")
    seq = np.random.SeedSequence(entropy=master_seed & MASK64, spawn_key=tuple(indices))
    return np.random.Generator(np.random.PCG64(seq))


def code_stream(master_seed: int, code_index: int) -> np.random.Generator:
    return stream(master_seed, CODE, code_index, 0)


def trial_stream(master_seed: int, code_index: int, trial: int) -> np.random.Generator:
    return stream(master_seed, TRIAL, code_index, trial)
