#!/usr/bin/env python3
"""Pearson chi-square frequency test."""

import logging
import math
import warnings
from collections.abc import Sequence

import numpy as np
from scipy.special import gammaincc

from .base import NORMALIZATION_TOL, DegenerateExpected

logger = logging.getLogger(__name__)

MIN_EXPECTED_COUNT = 5.0


def chi_square_test(observed: Sequence[int], expected: Sequence[float]) -> tuple[float, float]:
    """
    Pearson statistic sum((O - E)**2 / E) and its p-value.

    Categories with zero expected probability and zero observed count are dropped;
    the degrees of freedom are the remaining categories minus one.

    Args:
        observed: Observed counts per category
        expected: Expected probabilities per category, summing to 1

    Returns:
        (statistic, p_value)

    Raises:
        DegenerateExpected: If a zero-probability category has a nonzero count
        ValueError: If the inputs are inconsistent
    """
    obs = np.asarray(observed, dtype=np.float64)
    probs = np.asarray(expected, dtype=np.float64)
    if obs.shape != probs.shape or obs.ndim != 1:
        raise ValueError("Observed counts and expected probabilities must have equal length")
    if np.any(obs < 0) or np.any(probs < 0):
        raise ValueError("Counts and probabilities must be non-negative")
    if abs(float(probs.sum()) - 1.0) > NORMALIZATION_TOL:
        raise ValueError(f"Expected probabilities sum to {probs.sum()}, not 1")
    total = float(obs.sum())
    if total == 0:
        raise ValueError("No observations")

    impossible = probs == 0
    if np.any(obs[impossible] > 0):
        raise DegenerateExpected("Nonzero count in a category of zero expected probability")
    obs, probs = obs[~impossible], probs[~impossible]

    counts = total * probs
    if np.any(counts < MIN_EXPECTED_COUNT):
        message = f"Expected counts below {MIN_EXPECTED_COUNT:g}: chi-square approximation is weak"
        logger.warning(message)
        warnings.warn(message, UserWarning, stacklevel=2)

    statistic = float(np.sum((obs - counts) ** 2 / counts))
    df = len(obs) - 1
    if df == 0:
        return statistic, 1.0
    p_value = float(gammaincc(df / 2.0, statistic / 2.0))
    logger.debug(f"chi-square {statistic:.4f} (df={df}, p={p_value:.4g})")
    return statistic, p_value


def within_standard_errors(count: int, n: int, p: float, k: float = 4.0) -> bool:
    """True if count/n lies within k binomial standard errors of p."""
    return abs(count / n - p) <= k * math.sqrt(p * (1.0 - p) / n)
