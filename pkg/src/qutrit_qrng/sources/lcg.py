#!/usr/bin/env python3
"""Linear congruential generator (glibc constants), vectorised by jump-ahead."""

import logging
from functools import lru_cache

import numpy as np
import numpy.typing as npt

from ..base import BitSource
from ..coding import BitStream

logger = logging.getLogger(__name__)

MULTIPLIER = 1103515245
INCREMENT = 12345
MODULUS_BITS = 31
MASK = (1 << MODULUS_BITS) - 1
BLOCK = 1 << 16


@lru_cache(maxsize=1)
def _jump_table() -> tuple[npt.NDArray[np.uint64], npt.NDArray[np.uint64]]:
    # s_k = A_k * s_0 + C_k (mod 2**31) for k = 1..BLOCK
    a = np.empty(BLOCK, dtype=np.uint64)
    c = np.empty(BLOCK, dtype=np.uint64)
    ak, ck = 1, 0
    for k in range(BLOCK):
        ak = (ak * MULTIPLIER) & MASK
        ck = (ck * MULTIPLIER + INCREMENT) & MASK
        a[k], c[k] = ak, ck
    return a, c


class LcgSource(BitSource):
    """s <- (1103515245 s + 12345) mod 2**31; emits the top bit of each state."""

    name = "lcg"

    def __init__(self) -> None:
        self.state = 0

    def reseed(self, seed: int) -> None:
        self.state = seed & MASK

    def step(self) -> int:
        self.state = (MULTIPLIER * self.state + INCREMENT) & MASK
        return self.state >> (MODULUS_BITS - 1)

    def generate(self, n: int) -> BitStream:
        a, c = _jump_table()
        out = np.empty(n, dtype=np.uint8)
        for start in range(0, n, BLOCK):
            size = min(BLOCK, n - start)
            states = (a[:size] * np.uint64(self.state) + c[:size]) & np.uint64(MASK)
            out[start : start + size] = states >> np.uint64(MODULUS_BITS - 1)
            self.state = int(states[-1])
        return BitStream(out)
