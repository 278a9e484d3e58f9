"""
Deterministic random streams.

Streams are keyed by integer tuples such as (master_seed, point_index) or
(master_seed, point_index, shot_index), so any sub-range of a run can be
regenerated on its own and results do not depend on the number of workers.
"""

from typing import Sequence

import numpy as np

# Domain tags keep streams of different purposes disjoint for the same indices.
TRACE_STREAM = 0x7A11
SHOT_STREAM = 0x5407
FOUNDATIONS_STREAM = 0xB0B0


def make_generator(master_seed: int, *keys: int) -> np.random.Generator:
    """Philox-backed generator for the given key path."""
    entropy: Sequence[int] = [int(master_seed), *[int(k) for k in keys]]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def point_generator(master_seed: int, point_index: int) -> np.random.Generator:
    return make_generator(master_seed, TRACE_STREAM, point_index)


def shot_generator(master_seed: int, point_index: int, shot_index: int) -> np.random.Generator:
    return make_generator(master_seed, SHOT_STREAM, point_index, shot_index)
