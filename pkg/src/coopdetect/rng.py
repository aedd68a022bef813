"""Seeding helpers.

All randomness flows through :func:`make_rng`, which wraps numpy's PCG64
bit generator. PCG64 streams are identical across platforms for a given
seed. Independent streams for trials are derived with :func:`mix_seed`,
a SplitMix64 finalizer folded over the integer components, so the stream
for ``(master, model_index, n)`` never depends on execution order.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    z = (x + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def mix_seed(master: int, *parts: int) -> int:
    """Fold integer ``parts`` into ``master`` and return a 64-bit seed.

    ``h = splitmix64(master)``, then for each part
    ``h = splitmix64(h ^ splitmix64(part))``.
    """
    h = splitmix64(master & _MASK)
    for p in parts:
        h = splitmix64(h ^ splitmix64(int(p) & _MASK))
    return h


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK))
