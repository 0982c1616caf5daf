"""Counter-based random streams.

Every random draw in the package comes from a Philox generator whose key is
derived from the user seed and whose counter encodes *where* the draw is used
(domain, trial, color, ...).  Two draws with the same address always agree,
no matter how many other draws happened before or on which thread.
"""

import numpy as np

# domain tags keep unrelated consumers of the same seed apart
MAUREY = 1
COLORFUL = 2
RADEMACHER = 3
WITNESS = 4
INSTANCE = 5
HELLY_START = 6

_MASK64 = (1 << 64) - 1


def _key(seed):
    seed = int(seed)
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return [seed & _MASK64, (seed >> 64) & _MASK64]


def stream(seed, domain, *address):
    """Return a ``numpy.random.Generator`` for one address.

    ``address`` may hold up to two non-negative integers; counter word 0 is
    left for Philox itself to increment while drawing.
    """
    if len(address) > 2:
        raise ValueError("at most two address words")
    words = [int(a) for a in address] + [0] * (2 - len(address))
    if any(w < 0 for w in words):
        raise ValueError("address words must be non-negative")
    counter = [0, words[0] & _MASK64, words[1] & _MASK64, int(domain) & _MASK64]
    return np.random.Generator(np.random.Philox(key=_key(seed), counter=counter))


def derive_seed(seed, *path):
    """Deterministic child seed for a nested experiment (e.g. ``(seed, k, row)``)."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(2, dtype=np.uint64)[0])
