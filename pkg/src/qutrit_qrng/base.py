#!/usr/bin/env python3
"""Base module: logging, errors, shared constants and the bit-source plugin base."""

import json
import logging
import os
import sys
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Optional, cast

if TYPE_CHECKING:
    from .coding import BitStream
    from .normality import AccuracyFunction

# Configure logging based on environment variable
LOG_LEVEL = os.getenv("QRNG_LOG_LEVEL", "WARNING").upper()
logging.basicConfig(
    level=LOG_LEVEL,
    format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S",
)
logger = logging.getLogger(__name__)

# Shared tolerances
ORTHOGONALITY_TOL = 1e-10
NORMALIZATION_TOL = 1e-12
HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-10
STATE_NORM_TOL = 1e-9

SIMULATION_DISCLAIMER = (
    "classical simulation: reproduces the outcome distribution, "
    "not value indefiniteness"
)


class QrngError(Exception):
    """Root of every error raised by qutrit-qrng."""


class NonHermitianInput(QrngError, ValueError):
    """Operator failed the Hermiticity check."""


class UnnormalizedState(QrngError, ValueError):
    """State vector norm deviates from 1."""


class ZeroVector(QrngError, ValueError):
    """Vector too close to zero to define a direction."""


class NotUnitary(QrngError, ValueError):
    """Matrix failed the unitarity check."""


class InvalidDigit(QrngError, ValueError):
    """Symbol outside the stream alphabet."""


class CorruptFile(QrngError):
    """Packed stream file failed validation."""


class EmptyBlocks(QrngError, ValueError):
    """String too short to contain a single block."""


class StringTooShort(QrngError, ValueError):
    """String too short for the admissible block-size range."""


class TooLarge(QrngError, ValueError):
    """Exhaustive enumeration requested beyond its guard."""


class DegenerateExpected(QrngError, ValueError):
    """Zero expected probability with a nonzero observed count."""


class ConfigError(QrngError, ValueError):
    """Rejected command-line or run configuration."""


def env_flag(name: str) -> bool:
    """Return True when an environment variable is set to 1/true/yes."""
    return os.environ.get(name, "").lower() in ("1", "true", "yes")


def render_json(document: Any) -> str:
    """Serialize a report document the way every subcommand emits it."""
    return json.dumps(document, indent=2, sort_keys=False)


def highlight_json(text: str) -> str:
    """
    Add syntax highlighting to a JSON document using pygments if available.

    Args:
        text: Rendered JSON

    Returns:
        Highlighted text if pygments available and stdout is a terminal, otherwise text
    """
    if env_flag("QRNG_DISABLE_PYGMENTS"):
        return text

    if not sys.stdout.isatty():
        return text

    try:
        import pygments
        from pygments.formatters import TerminalFormatter
        from pygments.lexers import JsonLexer

        return cast(str, pygments.highlight(text, JsonLexer(), TerminalFormatter()))
    except ImportError:
        return text


@dataclass
class SourceResult:
    """One row of a comparison run."""

    source: str
    n: int
    parameters: dict[str, Any]
    chi_square: Optional[float] = None
    p_value: Optional[float] = None
    normality: Optional[dict[str, Any]] = None
    throughput_bits_per_s: Optional[float] = None
    error: Optional[str] = None
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        row: dict[str, Any] = {
            "source": self.source,
            "n": self.n,
            "parameters": self.parameters,
        }
        if self.error is not None:
            row["error"] = self.error
            return row
        row.update(
            {
                "chi_square": self.chi_square,
                "p_value": self.p_value,
                "normality": self.normality,
                "throughput_bits_per_s": self.throughput_bits_per_s,
            }
        )
        row.update(self.extra)
        return row


class BitSource(ABC):
    """Abstract base class for bit-source plugins compared by the harness."""

    name: str = "source"

    @abstractmethod
    def reseed(self, seed: int) -> None:
        """
        Reset the source to a deterministic state.

        Args:
            seed: Non-negative integer seed
        """

    @abstractmethod
    def generate(self, n: int) -> "BitStream":
        """
        Produce the next n bits of the source.

        Args:
            n: Number of bits

        Returns:
            BitStream: Exactly n bits

        Raises:
            Exception: If generation fails
        """

    def benchmark(self, n: int, seed: int, accuracy: "AccuracyFunction") -> SourceResult:
        """
        Generate n bits and run the analysis battery on them.

        Handles:
        - Reseeding
        - Timing the generation step
        - Chi-square over symbol counts and the normality report
        - Error isolation (failures become a row with an error field)

        Args:
            n: Number of bits to analyze
            seed: Seed applied before generation
            accuracy: Accuracy function for the normality report

        Returns:
            SourceResult: One comparison row
        """
        # Deferred to keep base importable from every module
        from .normality import count_symbols, normality_report
        from .stats import chi_square_test

        parameters = {"n": n, "seed": seed, "accuracy": str(accuracy)}
        logger.info(f"Benchmarking {self.name} (n={n}, seed={seed})")
        try:
            self.reseed(seed)
            start = time.perf_counter()
            bits = self.generate(n)
            elapsed = time.perf_counter() - start
            counts = count_symbols(bits)
            statistic, p_value = chi_square_test([counts[0], counts[1]], [0.5, 0.5])
            report = normality_report(bits, accuracy)
        except Exception as e:
            logger.error(f"Source {self.name} failed: {e}", exc_info=True)
            return SourceResult(source=self.name, n=n, parameters=parameters, error=str(e))

        throughput = n / elapsed if elapsed > 0 else None
        logger.debug(f"{self.name}: {n} bits in {elapsed:.3f}s")
        return SourceResult(
            source=self.name,
            n=n,
            parameters=parameters,
            chi_square=statistic,
            p_value=p_value,
            normality=report.to_dict(),
            throughput_bits_per_s=throughput,
        )
