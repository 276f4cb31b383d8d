#!/usr/bin/env python3
"""Mersenne Twister (a twisted generalised feedback shift register) via numpy."""

import logging
from typing import Optional

import numpy as np

from ..base import BitSource
from ..coding import BitStream

logger = logging.getLogger(__name__)


class Mt19937Source(BitSource):
    """Emits the most significant bit of each 32-bit MT19937 output."""

    name = "mt19937"

    def __init__(self) -> None:
        self.generator: Optional[np.random.MT19937] = None

    def reseed(self, seed: int) -> None:
        self.generator = np.random.MT19937(seed)

    def generate(self, n: int) -> BitStream:
        assert self.generator is not None, "Source not seeded"
        raw = np.asarray(self.generator.random_raw(n), dtype=np.uint64)
        return BitStream((raw >> np.uint64(31)).astype(np.uint8))
