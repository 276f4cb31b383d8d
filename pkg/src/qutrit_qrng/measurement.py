#!/usr/bin/env python3
"""Preparation, measurement and reset loop of the ternary QRNG, simulated classically.

Digit mapping (detector labels): S_x = +1 -> 0, S_x = 0 -> 1, S_x = -1 -> 2.

Sampling is inverse-CDF over the half-open intervals [0, p0), [p0, p0 + p1),
[p0 + p1, 1), one uniform draw per digit. The default entropy source is numpy's
counter-based Philox generator, so a seed fully determines every stream regardless of
how it is chunked.

A classical entropy source reproduces the outcome distribution but not value
indefiniteness: the simulator validates the pipeline, not the certification.
"""

import logging
from abc import ABC, abstractmethod
from collections.abc import Iterator
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

import numpy as np
import numpy.typing as npt

from .base import NORMALIZATION_TOL, SIMULATION_DISCLAIMER, ConfigError
from .coding import DigitArray, TernaryStream
from .spin import (
    KET_MINUS_ONE,
    KET_PLUS_ONE,
    KET_ZERO,
    SQRT2,
    EigenSystem,
    StateVector,
    born_probabilities,
    eigensystem_sx_analytic,
)

logger = logging.getLogger(__name__)

DEFAULT_CHUNK = 1 << 20


class PreparationSpec(Enum):
    PLUS_ONE = "plus1"
    MINUS_ONE = "minus1"
    SUPERPOSITION = "superposition"
    LEGACY_SZ_ZERO = "legacy"

    @classmethod
    def parse(cls, name: str) -> "PreparationSpec":
        for member in cls:
            if name.lower() in (member.value, member.name.lower()):
                return member
        choices = ", ".join(m.value for m in cls)
        raise ConfigError(f"Unknown preparation {name!r} (choose from {choices})")


def prepare(spec: PreparationSpec) -> StateVector:
    """Normalised state for a preparation variant."""
    if spec is PreparationSpec.PLUS_ONE:
        return KET_PLUS_ONE.copy()
    if spec is PreparationSpec.MINUS_ONE:
        return KET_MINUS_ONE.copy()
    if spec is PreparationSpec.SUPERPOSITION:
        # |+-> = (|0> +- |1>)/sqrt(2)
        plus = (KET_ZERO + KET_PLUS_ONE) / SQRT2
        minus = (KET_ZERO - KET_PLUS_ONE) / SQRT2
        return np.asarray((plus - minus) / SQRT2, dtype=np.complex128)
    return KET_ZERO.copy()


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities indexed by digit 0, 1, 2."""

    p: tuple[float, float, float]

    def __post_init__(self) -> None:
        if len(self.p) != 3:
            raise ValueError("A ternary distribution has three entries")
        if any(value < 0 for value in self.p):
            raise ValueError(f"Negative probability in {self.p}")
        if abs(sum(self.p) - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"Probabilities {self.p} do not sum to 1")

    @property
    def thresholds(self) -> tuple[float, float]:
        """Upper bounds of the digit-0 and digit-1 intervals."""
        return self.p[0], self.p[0] + self.p[1]


def outcome_distribution(
    spec: PreparationSpec, basis: Optional[EigenSystem] = None
) -> OutcomeDistribution:
    """Born probabilities of the prepared state in the S_x eigenbasis (or ``basis``)."""
    basis = basis if basis is not None else eigensystem_sx_analytic()
    p = born_probabilities(prepare(spec), basis)
    return OutcomeDistribution(p=(float(p[0]), float(p[1]), float(p[2])))


class EntropySource(ABC):
    """Seedable, deterministic source of uniform reals in [0, 1)."""

    seed: Optional[int] = None

    @abstractmethod
    def next_uniform(self) -> float:
        """Return the next uniform draw."""

    def uniforms(self, n: int) -> npt.NDArray[np.float64]:
        """Return the next n draws; equal to n calls of next_uniform."""
        return np.fromiter((self.next_uniform() for _ in range(n)), dtype=np.float64, count=n)


class CounterEntropy(EntropySource):
    """Philox counter-based generator."""

    def __init__(self, seed: int = 0) -> None:
        if seed < 0:
            raise ConfigError("Seed must be non-negative")
        self.seed = seed
        self._generator = np.random.Generator(np.random.Philox(seed))

    def next_uniform(self) -> float:
        return float(self._generator.random())

    def uniforms(self, n: int) -> npt.NDArray[np.float64]:
        return self._generator.random(n)


class FixedEntropy(EntropySource):
    """Replays a fixed list of draws, cycling; for tests and worked examples."""

    def __init__(self, values: list[float]) -> None:
        if not values or any(not 0.0 <= v < 1.0 for v in values):
            raise ValueError("Draws must lie in [0, 1)")
        self._values = list(values)
        self._index = 0

    def next_uniform(self) -> float:
        value = self._values[self._index % len(self._values)]
        self._index += 1
        return value


def sample_digits(dist: OutcomeDistribution, draws: npt.NDArray[np.float64]) -> DigitArray:
    """Map uniform draws to digits through the half-open CDF intervals."""
    cut = np.asarray(dist.thresholds, dtype=np.float64)
    return np.searchsorted(cut, draws, side="right").astype(np.uint8)


def sample_digit(dist: OutcomeDistribution, entropy: EntropySource) -> int:
    """Draw one digit; consumes exactly one uniform."""
    u = entropy.next_uniform()
    low, high = dist.thresholds
    if u < low:
        return 0
    if u < high:
        return 1
    return 2


def tally(digits: DigitArray) -> list[int]:
    return [int(c) for c in np.bincount(digits, minlength=3)[:3]]


@dataclass
class GenerationRecord:
    seed: Optional[int]
    preparation: PreparationSpec
    count: int
    tallies: list[int]

    def __post_init__(self) -> None:
        if sum(self.tallies) != self.count:
            raise ValueError(f"Tallies {self.tallies} do not sum to {self.count}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "preparation": self.preparation.value,
            "count": self.count,
            "tallies": list(self.tallies),
            "disclaimer": SIMULATION_DISCLAIMER,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "GenerationRecord":
        return cls(
            seed=data.get("seed"),
            preparation=PreparationSpec.parse(data["preparation"]),
            count=int(data["count"]),
            tallies=[int(t) for t in data["tallies"]],
        )


def iter_ternary_chunks(
    spec: PreparationSpec,
    n: int,
    entropy: EntropySource,
    chunk_size: int = DEFAULT_CHUNK,
    basis: Optional[EigenSystem] = None,
) -> Iterator[DigitArray]:
    """Yield n sampled digits in chunks of at most chunk_size."""
    if n < 0:
        raise ValueError("Digit count must be non-negative")
    dist = outcome_distribution(spec, basis)
    remaining = n
    while remaining > 0:
        size = min(chunk_size, remaining)
        yield sample_digits(dist, entropy.uniforms(size))
        remaining -= size


def generate_ternary(
    spec: PreparationSpec,
    n: int,
    entropy: EntropySource,
    basis: Optional[EigenSystem] = None,
) -> tuple[TernaryStream, GenerationRecord]:
    """
    Run n preparation/measurement/reset rounds.

    Args:
        spec: Preparation variant
        n: Number of digits
        entropy: Entropy source (consumed, one draw per digit)
        basis: Measurement basis, S_x by default

    Returns:
        The digit stream and its generation record
    """
    chunks = list(iter_ternary_chunks(spec, n, entropy, basis=basis))
    digits = np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.uint8)
    record = GenerationRecord(
        seed=entropy.seed, preparation=spec, count=n, tallies=tally(digits)
    )
    logger.debug(f"Generated {n} digits for {spec.value}: tallies {record.tallies}")
    return TernaryStream(digits), record
