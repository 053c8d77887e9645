"""
Reproducible random streams.

Every replicate draws from its own Philox stream keyed by (seed, index), so
results do not depend on which worker runs a replicate or in what order.
"""
import numpy as np

SEED_MASK = (1 << 64) - 1


def substream(seed: int, index: int) -> np.random.Generator:
    """Generator for replicate `index` of a study seeded with `seed`."""
    key = ((seed & SEED_MASK) << 64) | (index & SEED_MASK)
    return np.random.Generator(np.random.Philox(key=key))
