"""Deterministic random number generation.

Every stochastic operation in the package draws from numpy's PCG64 bit
generator seeded through a SeedSequence built from explicit integer
components, e.g. ``generator(seed, level, sweep)``.  Pinning the bit
generator makes runs reproducible across platforms and releases; the
component tuple keeps independent streams (per sweep, per round, per
ensemble member) from colliding.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def seed_sequence(*components: int) -> np.random.SeedSequence:
    """SeedSequence over the given components, mapped into [0, 2**64)."""
    return np.random.SeedSequence([int(c) & _MASK64 for c in components])


def generator(*components: int) -> np.random.Generator:
    """A fresh PCG64 generator seeded from the given components."""
    return np.random.Generator(np.random.PCG64(seed_sequence(*components)))
