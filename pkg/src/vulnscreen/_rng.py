"""SplitMix64 pseudo-random stream shared by every seeded operation.

State advance and output mixing (all arithmetic modulo 2**64)::

    state = state + 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    out = z ^ (z >> 31)

Derived draws:

* ``uniform()``  = ``(out >> 11) * 2**-53``, a double in [0, 1).
* ``below(k)``   = ``((out >> 32) * k) >> 32`` for ``1 <= k < 2**32``.
* ``shuffle(a)`` = Fisher-Yates from the back: for ``i = len-1 .. 1``,
  ``j = below(i + 1)``, swap ``a[i], a[j]``.

The numba kernels in this module reproduce the same stream bit-for-bit so
compiled training loops and pure-Python callers agree.
"""

import numpy as np
from numba import njit

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """Pure-Python SplitMix64 generator."""

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * MIX1) & MASK64
        z = ((z ^ (z >> 27)) * MIX2) & MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53

    def below(self, k: int) -> int:
        if not 1 <= k < 1 << 32:
            raise ValueError(f"bound must be in [1, 2**32), got {k}")
        return ((self.next_u64() >> 32) * k) >> 32

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]


def derive_seeds(seed: int, count: int) -> list[int]:
    """Child seeds: the first ``count`` outputs of a stream started at ``seed``."""
    rng = SplitMix64(seed)
    return [rng.next_u64() for _ in range(count)]


_GAMMA = np.uint64(GAMMA)
_MIX1 = np.uint64(MIX1)
_MIX2 = np.uint64(MIX2)
_S11 = np.uint64(11)
_S27 = np.uint64(27)
_S30 = np.uint64(30)
_S31 = np.uint64(31)
_S32 = np.uint64(32)


@njit(cache=True)
def nb_next(state):
    """Advance a 1-element uint64 state array and return the next output."""
    state[0] = state[0] + _GAMMA
    z = state[0]
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


@njit(cache=True)
def nb_below(state, k):
    return np.int64(((nb_next(state) >> _S32) * np.uint64(k)) >> _S32)


@njit(cache=True)
def nb_uniform(state):
    return np.float64(nb_next(state) >> _S11) * 1.1102230246251565e-16


def new_state(seed: int) -> np.ndarray:
    return np.array([int(seed) & MASK64], dtype=np.uint64)
