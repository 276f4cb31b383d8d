#!/usr/bin/env python3
"""Predictors fed a sliding window of past bits, and their evaluation.

A predictor is a total procedure: for any window (including the empty one) it returns
ZERO, ONE or WITHHELD. The window of the ``window`` bits preceding position i stands in
for the finite information an extractor passes to it.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import IntEnum
from typing import Any

import numpy as np
import numpy.typing as npt

from .base import ConfigError
from .coding import BitStream, DigitArray

logger = logging.getLogger(__name__)


class Prediction(IntEnum):
    ZERO = 0
    ONE = 1
    WITHHELD = 2


class Predictor(ABC):
    """Abstract base class for predictors."""

    name: str = "predictor"

    @abstractmethod
    def predict(self, window: DigitArray) -> Prediction:
        """
        Predict the bit following a window.

        Args:
            window: The preceding bits, oldest first (possibly empty)

        Returns:
            Prediction: ZERO, ONE or WITHHELD
        """

    def predict_all(self, bits: DigitArray, window: int) -> npt.NDArray[np.uint8]:
        """Predictions for every position of bits; same result as calling predict per position."""
        out = np.empty(len(bits), dtype=np.uint8)
        for i in range(len(bits)):
            out[i] = self.predict(bits[max(0, i - window) : i])
        return out


class ConstantPredictor(Predictor):
    def __init__(self, value: Prediction) -> None:
        if value is Prediction.WITHHELD:
            raise ValueError("Use WithheldPredictor for a predictor that never commits")
        self.value = value
        self.name = f"always-{value.name.lower()}"

    def predict(self, window: DigitArray) -> Prediction:
        return self.value

    def predict_all(self, bits: DigitArray, window: int) -> npt.NDArray[np.uint8]:
        return np.full(len(bits), int(self.value), dtype=np.uint8)


class WithheldPredictor(Predictor):
    name = "withheld"

    def predict(self, window: DigitArray) -> Prediction:
        return Prediction.WITHHELD

    def predict_all(self, bits: DigitArray, window: int) -> npt.NDArray[np.uint8]:
        return np.full(len(bits), int(Prediction.WITHHELD), dtype=np.uint8)


class MajorityPredictor(Predictor):
    """Majority bit of the window; withheld on a tie or an empty window."""

    name = "majority"

    def predict(self, window: DigitArray) -> Prediction:
        ones = int(np.count_nonzero(window))
        zeros = len(window) - ones
        if ones == zeros:
            return Prediction.WITHHELD
        return Prediction.ONE if ones > zeros else Prediction.ZERO

    def predict_all(self, bits: DigitArray, window: int) -> npt.NDArray[np.uint8]:
        n = len(bits)
        prefix = np.concatenate([[0], np.cumsum(bits, dtype=np.int64)])
        end = np.arange(n)
        start = np.maximum(0, end - window)
        ones = prefix[end] - prefix[start]
        zeros = (end - start) - ones
        out = np.full(n, int(Prediction.WITHHELD), dtype=np.uint8)
        out[ones > zeros] = Prediction.ONE
        out[ones < zeros] = Prediction.ZERO
        return out


class RepeatPredictor(Predictor):
    """Repeats the most recent bit."""

    name = "repeat"

    def predict(self, window: DigitArray) -> Prediction:
        if len(window) == 0:
            return Prediction.WITHHELD
        return Prediction(int(window[-1]))

    def predict_all(self, bits: DigitArray, window: int) -> npt.NDArray[np.uint8]:
        out = np.full(len(bits), int(Prediction.WITHHELD), dtype=np.uint8)
        if window > 0 and len(bits) > 1:
            out[1:] = bits[:-1]
        return out


PREDICTOR_REGISTRY: dict[str, type[Predictor]] = {
    "zero": ConstantPredictor,
    "one": ConstantPredictor,
    "withheld": WithheldPredictor,
    "majority": MajorityPredictor,
    "repeat": RepeatPredictor,
}


def make_predictor(name: str) -> Predictor:
    key = name.strip().lower()
    if key not in PREDICTOR_REGISTRY:
        choices = ", ".join(PREDICTOR_REGISTRY)
        raise ConfigError(f"Unknown predictor {name!r} (choose from {choices})")
    if key == "zero":
        return ConstantPredictor(Prediction.ZERO)
    if key == "one":
        return ConstantPredictor(Prediction.ONE)
    return PREDICTOR_REGISTRY[key]()


@dataclass(frozen=True)
class PredictorEvaluation:
    correct: int
    incorrect: int
    withheld: int

    @property
    def length(self) -> int:
        return self.correct + self.incorrect + self.withheld

    @property
    def k_correct_for(self) -> int:
        """Correct predictions witnessed with no incorrect one; 0 once any is incorrect."""
        return self.correct if self.incorrect == 0 else 0

    @property
    def correct_fraction(self) -> float:
        committed = self.correct + self.incorrect
        return self.correct / committed if committed else 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "correct": self.correct,
            "incorrect": self.incorrect,
            "withheld": self.withheld,
            "k_correct_for": self.k_correct_for,
        }


def evaluate_predictor(p: Predictor, bits: BitStream, window: int) -> PredictorEvaluation:
    """
    Score a predictor against every position of a bit stream.

    Args:
        p: Predictor under test
        bits: Stream to predict
        window: Number of preceding bits shown to the predictor

    Returns:
        PredictorEvaluation whose tallies sum to len(bits)
    """
    if window < 0:
        raise ValueError("Window size must be non-negative")
    predictions = p.predict_all(bits.digits, window)
    withheld_mask = predictions == Prediction.WITHHELD
    hits = (predictions == bits.digits) & ~withheld_mask
    withheld = int(withheld_mask.sum())
    correct = int(hits.sum())
    evaluation = PredictorEvaluation(
        correct=correct, incorrect=len(bits) - withheld - correct, withheld=withheld
    )
    logger.debug(f"{p.name} (window {window}): {evaluation.to_dict()}")
    return evaluation
