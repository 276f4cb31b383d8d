#!/usr/bin/env python3
"""Simulated QRNG pipeline as a bit source: ternary generation followed by the morphism."""

import logging
from typing import Optional

from ..base import BitSource
from ..coding import BitStream, morphism_stream
from ..measurement import CounterEntropy, PreparationSpec, generate_ternary

logger = logging.getLogger(__name__)


class QrngPipelineSource(BitSource):
    """Spin-1 measurement simulation mapped to bits."""

    name = "qrng"

    def __init__(self, preparation: PreparationSpec = PreparationSpec.PLUS_ONE) -> None:
        self.preparation = preparation
        self.entropy: Optional[CounterEntropy] = None

    def reseed(self, seed: int) -> None:
        self.entropy = CounterEntropy(seed)

    def generate(self, n: int) -> BitStream:
        """Generate n digits and map them to n bits."""
        assert self.entropy is not None, "Source not seeded"
        digits, record = generate_ternary(self.preparation, n, self.entropy)
        logger.debug(f"Pipeline tallies: {record.tallies}")
        return morphism_stream(digits)
