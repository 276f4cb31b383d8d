#!/usr/bin/env python3
"""Finite Borel normality: symbol and block counting, accuracy tests and bounds.

Blocks are the consecutive non-overlapping m-bit groups starting at the first bit;
the trailing n mod m bits are discarded. Block keys are integers in [0, 2**m) with the
leftmost stream bit most significant. Block sizes range over 1 <= m <= floor(log2 log2 n)
and the accuracy is evaluated at the analysed string's own length n.
"""

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

import numpy as np
import numpy.typing as npt

from .base import ConfigError, EmptyBlocks, StringTooShort, TooLarge
from .coding import BitStream, DigitArray, morphism_stream
from .measurement import EntropySource, PreparationSpec, generate_ternary

logger = logging.getLogger(__name__)

MIN_LENGTH = 4
MAX_EXHAUSTIVE_LENGTH = 24
_ENUMERATION_BATCH = 1 << 16


class AccuracyKind(Enum):
    SQRT_LOG = "sqrtlog"
    INV_LOG = "invlog"
    CONSTANT = "const"


@dataclass(frozen=True)
class AccuracyFunction:
    """Accuracy epsilon(n): sqrt(log2 n / n), 1 / log2 n, or a constant."""

    kind: AccuracyKind
    constant: Optional[float] = None

    def __post_init__(self) -> None:
        if self.kind is AccuracyKind.CONSTANT:
            if self.constant is None or not self.constant > 0 or not math.isfinite(self.constant):
                raise ValueError("Constant accuracy must be a positive finite number")

    def __call__(self, n: int) -> float:
        if n < 2:
            raise ValueError("Accuracy is defined for n >= 2")
        if self.kind is AccuracyKind.SQRT_LOG:
            return math.sqrt(math.log2(n) / n)
        if self.kind is AccuracyKind.INV_LOG:
            return 1.0 / math.log2(n)
        assert self.constant is not None
        return self.constant

    def __str__(self) -> str:
        if self.kind is AccuracyKind.CONSTANT:
            return f"const:{self.constant:g}"
        return self.kind.value

    @classmethod
    def parse(cls, text: str) -> "AccuracyFunction":
        name = text.strip().lower()
        if name == AccuracyKind.SQRT_LOG.value:
            return SQRT_LOG
        if name == AccuracyKind.INV_LOG.value:
            return INV_LOG
        if name.startswith("const:"):
            try:
                return cls(AccuracyKind.CONSTANT, float(name.split(":", 1)[1]))
            except ValueError as e:
                raise ConfigError(f"Bad constant accuracy {text!r}: {e}") from e
        raise ConfigError(f"Unknown accuracy {text!r} (sqrtlog, invlog or const:<f>)")


SQRT_LOG = AccuracyFunction(AccuracyKind.SQRT_LOG)
INV_LOG = AccuracyFunction(AccuracyKind.INV_LOG)


def constant_accuracy(epsilon: float) -> AccuracyFunction:
    return AccuracyFunction(AccuracyKind.CONSTANT, epsilon)


def _weights(m: int) -> npt.NDArray[np.int64]:
    return np.left_shift(np.int64(1), np.arange(m - 1, -1, -1, dtype=np.int64))


def block_key(block: str) -> int:
    return int(block, 2)


def block_label(key: int, m: int) -> str:
    return format(key, f"0{m}b")


@dataclass(frozen=True, eq=False)
class BlockCounts:
    m: int
    counts: npt.NDArray[np.int64]

    @property
    def total_blocks(self) -> int:
        return int(self.counts.sum())

    def __getitem__(self, block: str) -> int:
        if len(block) != self.m:
            raise KeyError(block)
        return int(self.counts[block_key(block)])

    def as_dict(self) -> dict[str, int]:
        return {block_label(k, self.m): int(c) for k, c in enumerate(self.counts)}

    def merge(self, other: "BlockCounts") -> "BlockCounts":
        if other.m != self.m:
            raise ValueError("Cannot merge counts of different block lengths")
        return BlockCounts(self.m, self.counts + other.counts)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BlockCounts):
            return NotImplemented
        return self.m == other.m and bool(np.array_equal(self.counts, other.counts))

    __hash__ = None  # type: ignore[assignment]


class BlockCounter:
    """Single-pass m-block counter over a stream delivered in arbitrary chunks."""

    def __init__(self, m: int) -> None:
        if m < 1:
            raise ValueError("Block length must be at least 1")
        self.m = m
        self.length = 0
        self._counts = np.zeros(1 << m, dtype=np.int64)
        self._weights = _weights(m)
        self._carry = np.zeros(0, dtype=np.uint8)

    def update(self, chunk: DigitArray) -> None:
        self.length += len(chunk)
        data = np.concatenate([self._carry, chunk]) if self._carry.size else chunk
        whole = len(data) // self.m
        if whole:
            keys = data[: whole * self.m].reshape(whole, self.m).astype(np.int64) @ self._weights
            self._counts += np.bincount(keys, minlength=1 << self.m)
        self._carry = np.array(data[whole * self.m :], dtype=np.uint8)

    def merge(self, other: "BlockCounter") -> "BlockCounter":
        """Combine two counters of segments that were split at block boundaries."""
        if other.m != self.m:
            raise ValueError("Cannot merge counters of different block lengths")
        if self._carry.size or other._carry.size:
            raise ValueError("Counters hold a partial block; split segments at block boundaries")
        merged = BlockCounter(self.m)
        merged.length = self.length + other.length
        merged._counts = self._counts + other._counts
        return merged

    def counts(self) -> BlockCounts:
        return BlockCounts(self.m, self._counts.copy())


def count_symbols(x: BitStream) -> dict[int, int]:
    """Occurrences of 0 and 1."""
    counts = np.bincount(x.digits, minlength=2)
    return {0: int(counts[0]), 1: int(counts[1])}


def block_counts(x: BitStream, m: int) -> BlockCounts:
    """Counts of every m-bit block over the floor(n/m) non-overlapping blocks."""
    counter = BlockCounter(m)
    counter.update(x.digits)
    return counter.counts()


def _deviation(counts: BlockCounts) -> tuple[float, int]:
    total = counts.total_blocks
    if total == 0:
        raise EmptyBlocks(f"No complete block of length {counts.m}")
    deviations = np.abs(counts.counts / total - 2.0 ** (-counts.m))
    worst = int(np.argmax(deviations))
    return float(deviations[worst]), worst


def is_normal_with_accuracy(x: BitStream, m: int, eps: float) -> tuple[bool, float]:
    """
    Check |N_u / floor(n/m) - 2**-m| <= eps for every m-bit block u.

    Returns:
        (passed, largest deviation)

    Raises:
        EmptyBlocks: If the string holds no complete block
    """
    max_deviation, _ = _deviation(block_counts(x, m))
    return max_deviation <= eps, max_deviation


def max_block_size(n: int) -> int:
    """floor(log2 log2 n), computed exactly on integers."""
    if n < 2:
        return 0
    log_n = n.bit_length() - 1
    return log_n.bit_length() - 1 if log_n >= 1 else 0


@dataclass(frozen=True)
class NormalityEntry:
    m: int
    epsilon: float
    max_deviation: float
    worst_block: str
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "m": self.m,
            "epsilon": self.epsilon,
            "max_deviation": self.max_deviation,
            "worst_block": self.worst_block,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class NormalityReport:
    n: int
    accuracy: str
    entries: tuple[NormalityEntry, ...]

    @property
    def passed(self) -> bool:
        return all(entry.passed for entry in self.entries)

    @property
    def block_sizes(self) -> list[int]:
        return [entry.m for entry in self.entries]

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "accuracy": self.accuracy,
            "per_m": [entry.to_dict() for entry in self.entries],
            "pass": self.passed,
        }


def report_from_counts(n: int, acc: AccuracyFunction, counts: Sequence[BlockCounts]) -> NormalityReport:
    epsilon = acc(n)
    entries = []
    for block in counts:
        max_deviation, worst = _deviation(block)
        entries.append(
            NormalityEntry(
                m=block.m,
                epsilon=epsilon,
                max_deviation=max_deviation,
                worst_block=block_label(worst, block.m),
                passed=max_deviation <= epsilon,
            )
        )
    return NormalityReport(n=n, accuracy=str(acc), entries=tuple(entries))


def _check_length(n: int) -> int:
    if n < MIN_LENGTH:
        raise StringTooShort(f"Need at least {MIN_LENGTH} bits, got {n}")
    return max_block_size(n)


def normality_report(x: BitStream, acc: AccuracyFunction) -> NormalityReport:
    """
    Run the accuracy test for every admissible block size.

    Raises:
        StringTooShort: If the string has fewer than 4 bits
    """
    n = len(x)
    top = _check_length(n)
    return report_from_counts(n, acc, [block_counts(x, m) for m in range(1, top + 1)])


def normality_report_streaming(
    chunks: Iterable[DigitArray], n: int, acc: AccuracyFunction
) -> tuple[NormalityReport, dict[int, int]]:
    """Same report as normality_report, from chunks, in memory independent of n.

    Returns:
        The report and the symbol counts
    """
    top = _check_length(n)
    counters = [BlockCounter(m) for m in range(1, top + 1)]
    for chunk in chunks:
        for counter in counters:
            counter.update(chunk)
    seen = counters[0].length if counters else 0
    if seen != n:
        raise ValueError(f"Stream delivered {seen} bits, expected {n}")
    symbols = counters[0].counts().counts
    report = report_from_counts(n, acc, [c.counts() for c in counters])
    return report, {0: int(symbols[0]), 1: int(symbols[1])}


def prefix_normality_profile(
    x: BitStream, acc: AccuracyFunction, lengths: Optional[Sequence[int]] = None
) -> list[NormalityReport]:
    """Normality reports for prefixes of x, by default at every power of two from 16."""
    if lengths is None:
        lengths = []
        size = 16
        while size <= len(x):
            lengths.append(size)
            size *= 2
    reports = []
    for length in lengths:
        if length > len(x):
            raise ValueError(f"Prefix length {length} exceeds string length {len(x)}")
        reports.append(normality_report(x.prefix(length), acc))
    return reports


def nonnormal_count_bound(m: int) -> int:
    """floor(2**m / sqrt(log2 m)): ceiling on non-normal strings of length m."""
    return math.floor(2**m / math.sqrt(math.log2(m)))


def normal_probability_bound(m: int) -> float:
    """1 - 1/sqrt(log2 m): floor on the probability that a length-m prefix is normal."""
    return 1.0 - 1.0 / math.sqrt(math.log2(m))


def count_nonnormal_exhaustive(m: int, acc: AccuracyFunction) -> int:
    """
    Count strings of length m failing normality_report, by enumerating all 2**m.

    Raises:
        TooLarge: If m exceeds 24
        StringTooShort: If m is below 4
    """
    if m > MAX_EXHAUSTIVE_LENGTH:
        raise TooLarge(f"Refusing to enumerate 2**{m} strings (limit 2**{MAX_EXHAUSTIVE_LENGTH})")
    top = _check_length(m)
    epsilon = acc(m)
    shifts = np.arange(m - 1, -1, -1, dtype=np.int64)
    failing = 0
    for start in range(0, 1 << m, _ENUMERATION_BATCH):
        index = np.arange(start, min(start + _ENUMERATION_BATCH, 1 << m), dtype=np.int64)
        bits = ((index[:, None] >> shifts) & 1).astype(np.uint8)
        fails = np.zeros(len(index), dtype=bool)
        for b in range(1, top + 1):
            k = m // b
            keys = bits[:, : k * b].reshape(len(index), k, b).astype(np.int64) @ _weights(b)
            counts = (keys[:, :, None] == np.arange(1 << b)).sum(axis=1)
            deviations = np.abs(counts / k - 2.0 ** (-b)).max(axis=1)
            fails |= deviations > epsilon
        failing += int(fails.sum())
    logger.debug(f"{failing} of {1 << m} strings of length {m} fail at epsilon {epsilon:.4f}")
    return failing


def estimate_normal_probability(
    m: int,
    trials: int,
    entropy: EntropySource,
    spec: PreparationSpec = PreparationSpec.PLUS_ONE,
) -> float:
    """
    Fraction of simulated pipeline strings of length m that pass the normality battery.

    Each trial generates m ternary digits, applies the morphism and runs
    normality_report with the sqrt(log2 n / n) accuracy.
    """
    if trials < 1:
        raise ValueError("Need at least one trial")
    passing = 0
    for _ in range(trials):
        digits, _record = generate_ternary(spec, m, entropy)
        if normality_report(morphism_stream(digits), SQRT_LOG).passed:
            passing += 1
    fraction = passing / trials
    logger.info(
        f"Normal fraction {fraction:.4f} over {trials} strings of length {m} "
        f"(bound {normal_probability_bound(m):.4f})"
    )
    return fraction


