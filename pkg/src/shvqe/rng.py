"""Reproducible random streams.

Every stochastic routine draws from ``stream(seed, *keys)``: a Philox4x64
counter-based generator keyed through ``numpy.random.SeedSequence`` on the
tuple ``(seed, *keys)``. Callers key streams by sample index (or restart,
iteration, ...), so each sample's randomness is independent of how many
other samples were drawn and in what order or on which thread.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, *keys: int) -> np.random.Generator:
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF, *(int(k) for k in keys)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
