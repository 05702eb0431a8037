"""Counter-based, splittable random streams.

Every stream is a Philox generator keyed by a 64-bit integer, so stream ``i``
of a run seeded with ``seed`` is keyed by ``seed ^ i`` and can be regenerated
independently of every other stream.
"""

import numpy as np

MASK64 = (1 << 64) - 1


def stream(seed: int, index: int = 0) -> np.random.Generator:
    key = (int(seed) ^ int(index)) & MASK64
    return np.random.Generator(np.random.Philox(key=key))


def split(seed: int, count: int, offset: int = 0) -> list:
    return [stream(seed, offset + i) for i in range(count)]
