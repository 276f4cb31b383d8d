#!/usr/bin/env python3
"""Unit tests for Borel normality analysis."""

import math

import numpy as np
import pytest

from qutrit_qrng.base import ConfigError, EmptyBlocks, StringTooShort, TooLarge
from qutrit_qrng.coding import BitStream
from qutrit_qrng.measurement import CounterEntropy
from qutrit_qrng.normality import (
    INV_LOG,
    SQRT_LOG,
    AccuracyFunction,
    BlockCounter,
    block_counts,
    constant_accuracy,
    count_nonnormal_exhaustive,
    count_symbols,
    estimate_normal_probability,
    is_normal_with_accuracy,
    nonnormal_count_bound,
    max_block_size,
    normal_probability_bound,
    normality_report,
    normality_report_streaming,
    prefix_normality_profile,
)

WORKED = BitStream.from_string("0010101110")


@pytest.mark.unit
class TestCounting:
    """Test symbol and block counts."""

    def test_worked_example_symbols(self) -> None:
        """Test 0010101110 has five zeros and five ones."""
        assert count_symbols(WORKED) == {0: 5, 1: 5}

    def test_worked_example_pairs(self) -> None:
        """Test the pair counts of 0010101110."""
        counts = block_counts(WORKED, 2)
        assert counts["11"] == 1
        assert counts["10"] == 3
        assert counts["01"] == 0
        assert counts["00"] == 1
        assert counts.total_blocks == 5

    def test_empty_and_constant(self) -> None:
        """Test empty and all-ones strings."""
        assert count_symbols(BitStream()) == {0: 0, 1: 0}
        assert count_symbols(BitStream([1] * 9)) == {0: 0, 1: 9}

    def test_remainder_discarded(self) -> None:
        """Test length 10 with m = 3 gives three blocks."""
        assert block_counts(WORKED, 3).total_blocks == 3

    def test_m_one_matches_symbols(self) -> None:
        """Test blocks of length 1 are symbol counts."""
        x = BitStream(np.random.default_rng(1).integers(0, 2, 777))
        counts = block_counts(x, 1)
        symbols = count_symbols(x)
        assert (counts["0"], counts["1"]) == (symbols[0], symbols[1])

    def test_msb_first_keys(self) -> None:
        """Test the leftmost bit is the most significant in block keys."""
        counts = block_counts(BitStream.from_string("100"), 3)
        assert counts.counts[4] == 1
        assert counts.as_dict()["100"] == 1

    def test_totals(self) -> None:
        """Test totals equal floor(n/m) for several lengths."""
        rng = np.random.default_rng(2)
        for n in (5, 17, 64, 1000):
            x = BitStream(rng.integers(0, 2, n))
            for m in range(1, 6):
                assert block_counts(x, m).total_blocks == n // m


@pytest.mark.unit
class TestBlockCounter:
    """Test the streaming counter."""

    def test_chunking_invariant(self) -> None:
        """Test arbitrary chunk boundaries give the same counts."""
        x = BitStream(np.random.default_rng(3).integers(0, 2, 1000))
        counter = BlockCounter(3)
        for start in range(0, 1000, 7):
            counter.update(x.digits[start : start + 7])
        assert counter.counts() == block_counts(x, 3)

    def test_merge_concatenation(self) -> None:
        """Test merging counters of block-aligned segments equals counting the concatenation."""
        rng = np.random.default_rng(4)
        a = BitStream(rng.integers(0, 2, 300))
        b = BitStream(rng.integers(0, 2, 600))
        ca, cb = BlockCounter(3), BlockCounter(3)
        ca.update(a.digits)
        cb.update(b.digits)
        assert ca.merge(cb).counts() == block_counts(a + b, 3)
        assert cb.merge(ca).counts() == ca.merge(cb).counts()

    def test_merge_associative(self) -> None:
        """Test merge is associative."""
        rng = np.random.default_rng(5)
        counters = []
        for _ in range(3):
            c = BlockCounter(2)
            c.update(rng.integers(0, 2, 200).astype(np.uint8))
            counters.append(c)
        x, y, z = counters
        assert x.merge(y).merge(z).counts() == x.merge(y.merge(z)).counts()

    def test_merge_partial_block(self) -> None:
        """Test merging a counter holding a partial block fails."""
        a, b = BlockCounter(3), BlockCounter(3)
        a.update(np.array([1, 0], dtype=np.uint8))
        with pytest.raises(ValueError):
            a.merge(b)

    def test_block_counts_merge(self) -> None:
        """Test BlockCounts.merge adds counts."""
        x = BitStream.from_string("0011")
        merged = block_counts(x, 2).merge(block_counts(x, 2))
        assert merged["00"] == 2
        assert merged.total_blocks == 4


@pytest.mark.unit
class TestAccuracy:
    """Test accuracy functions."""

    def test_sqrtlog_at_16(self) -> None:
        """Test sqrt(log2 16 / 16) = 0.5."""
        assert SQRT_LOG(16) == pytest.approx(0.5)

    def test_invlog(self) -> None:
        """Test 1 / log2 n."""
        assert INV_LOG(256) == pytest.approx(1 / 8)

    def test_constant(self) -> None:
        """Test constant accuracy and its name."""
        acc = AccuracyFunction.parse("const:0.1")
        assert acc(1000) == 0.1
        assert str(acc) == "const:0.1"

    def test_parse(self) -> None:
        """Test parsing the named variants."""
        assert AccuracyFunction.parse("sqrtlog") is SQRT_LOG
        assert AccuracyFunction.parse("invlog") is INV_LOG

    @pytest.mark.parametrize("text", ["const:-1", "const:x", "loglog"])
    def test_parse_rejects(self, text: str) -> None:
        """Test bad accuracy names raise ConfigError."""
        with pytest.raises(ConfigError):
            AccuracyFunction.parse(text)

    def test_small_n(self) -> None:
        """Test n < 2 is rejected."""
        with pytest.raises(ValueError):
            SQRT_LOG(1)


@pytest.mark.unit
class TestAccuracyTest:
    """Test is_normal_with_accuracy."""

    def test_alternating(self) -> None:
        """Test 0101... of length 100 is exactly balanced at m = 1."""
        passed, deviation = is_normal_with_accuracy(BitStream([0, 1] * 50), 1, 0.01)
        assert passed
        assert deviation == 0.0

    def test_all_zeros(self) -> None:
        """Test all zeros deviates by 0.5 at m = 1."""
        passed, deviation = is_normal_with_accuracy(BitStream([0] * 100), 1, 0.4)
        assert not passed
        assert deviation == pytest.approx(0.5)

    def test_worked_example(self) -> None:
        """Test |3/5 - 1/4| = 0.35 exceeds 0.3 for block 10."""
        passed, deviation = is_normal_with_accuracy(WORKED, 2, 0.3)
        assert not passed
        assert deviation == pytest.approx(0.35)

    def test_inclusive_bound(self) -> None:
        """Test a deviation equal to epsilon passes."""
        passed, _ = is_normal_with_accuracy(BitStream([0] * 100), 1, 0.5)
        assert passed

    def test_monotone_in_epsilon(self) -> None:
        """Test passing at epsilon implies passing at any larger epsilon."""
        x = BitStream(np.random.default_rng(6).integers(0, 2, 500))
        for m in (1, 2, 3):
            _, deviation = is_normal_with_accuracy(x, m, 0.0)
            for eps in (deviation, deviation + 0.01, 1.0):
                assert is_normal_with_accuracy(x, m, eps)[0]

    def test_empty_blocks(self) -> None:
        """Test a string shorter than m raises EmptyBlocks."""
        with pytest.raises(EmptyBlocks):
            is_normal_with_accuracy(BitStream([1, 0]), 3, 0.1)


@pytest.mark.unit
class TestNormalityReport:
    """Test report generation."""

    def test_block_range(self) -> None:
        """Test the admissible block sizes for several lengths."""
        assert max_block_size(2**32) == 5
        assert max_block_size(2**20) == 4
        assert max_block_size(16) == 2
        assert max_block_size(15) == 1
        assert max_block_size(4) == 1
        assert max_block_size(3) == 0

    def test_n16(self) -> None:
        """Test n = 16 checks m = 1, 2 with epsilon 0.5."""
        report = normality_report(BitStream([0, 1] * 8), SQRT_LOG)
        assert report.block_sizes == [1, 2]
        assert all(e.epsilon == pytest.approx(0.5) for e in report.entries)

    def test_alternating_passes_m1(self) -> None:
        """Test a balanced alternating string passes at m = 1."""
        report = normality_report(BitStream([0, 1] * 512), INV_LOG)
        assert report.entries[0].passed

    def test_structured_fails_m2(self) -> None:
        """Test 0101... passes m = 1 but fails m = 2 at a tight epsilon."""
        report = normality_report(BitStream([0, 1] * 512), constant_accuracy(0.1))
        assert report.entries[0].passed
        assert not report.entries[1].passed
        assert report.entries[1].worst_block == "01"
        assert not report.passed

    def test_all_zeros_fails(self) -> None:
        """Test all zeros fails overall."""
        assert not normality_report(BitStream([0] * 1024), SQRT_LOG).passed

    def test_too_short(self) -> None:
        """Test n < 4 raises StringTooShort."""
        with pytest.raises(StringTooShort):
            normality_report(BitStream([0, 1, 1]), SQRT_LOG)

    def test_document(self) -> None:
        """Test the JSON document layout."""
        document = normality_report(WORKED, SQRT_LOG).to_dict()
        assert set(document) == {"n", "accuracy", "per_m", "pass"}
        assert document["accuracy"] == "sqrtlog"
        assert set(document["per_m"][0]) == {"m", "epsilon", "max_deviation", "worst_block", "pass"}

    def test_streaming_matches(self) -> None:
        """Test the streaming report equals the in-memory report."""
        x = BitStream(np.random.default_rng(7).integers(0, 2, 5000))
        chunks = (x.digits[i : i + 333] for i in range(0, 5000, 333))
        report, symbols = normality_report_streaming(chunks, 5000, SQRT_LOG)
        assert report == normality_report(x, SQRT_LOG)
        assert symbols == count_symbols(x)

    def test_streaming_length_mismatch(self) -> None:
        """Test the streaming report checks the declared length."""
        with pytest.raises(ValueError):
            normality_report_streaming(iter([np.zeros(10, dtype=np.uint8)]), 20, SQRT_LOG)

    def test_prefix_profile(self) -> None:
        """Test prefixes default to powers of two from 16."""
        x = BitStream(np.random.default_rng(8).integers(0, 2, 100))
        profile = prefix_normality_profile(x, SQRT_LOG)
        assert [r.n for r in profile] == [16, 32, 64]


@pytest.mark.unit
class TestBounds:
    """Test the non-normal count bound and the exhaustive oracle."""

    def test_nonnormal_count_bound_values(self) -> None:
        """Test floor(2^m / sqrt(log2 m)) at m = 4 and 16."""
        assert nonnormal_count_bound(4) == 11
        assert nonnormal_count_bound(16) == 32768
        assert normal_probability_bound(2**16) == pytest.approx(0.75)
        assert normal_probability_bound(2**10) == pytest.approx(1 - 1 / math.sqrt(10))

    def test_exhaustive_m4(self) -> None:
        """Test the enumeration at m = 4 stays under the bound."""
        assert count_nonnormal_exhaustive(4, SQRT_LOG) <= 11

    def test_exhaustive_m4_vacuous(self) -> None:
        """Test constant accuracy 1.0 accepts every string."""
        assert count_nonnormal_exhaustive(4, constant_accuracy(1.0)) == 0

    def test_exhaustive_m8_brute_force(self) -> None:
        """Test the vectorised enumeration against per-string reports at m = 8."""
        expected = sum(
            not normality_report(BitStream.from_string(format(i, "08b")), SQRT_LOG).passed
            for i in range(256)
        )
        assert count_nonnormal_exhaustive(8, SQRT_LOG) == expected
        assert expected <= nonnormal_count_bound(8)

    def test_exhaustive_guards(self) -> None:
        """Test the enumeration guards."""
        with pytest.raises(TooLarge):
            count_nonnormal_exhaustive(25, SQRT_LOG)
        with pytest.raises(StringTooShort):
            count_nonnormal_exhaustive(3, SQRT_LOG)

    def test_single_trial(self) -> None:
        """Test one trial gives a fraction of 0 or 1."""
        assert estimate_normal_probability(64, 1, CounterEntropy(1)) in (0.0, 1.0)


@pytest.mark.slow
class TestBoundAcceptance:
    """Exhaustive and Monte Carlo checks of the normality bounds."""

    @pytest.mark.parametrize("m", [4, 8, 16])
    def test_exhaustive_bound(self, m: int) -> None:
        """Test non-normal counts stay within the bound at m = 4, 8, 16."""
        assert count_nonnormal_exhaustive(m, SQRT_LOG) <= nonnormal_count_bound(m)

    @pytest.mark.parametrize("log_m", [10, 16])
    def test_monte_carlo_bound(self, log_m: int) -> None:
        """Test 1000 pipeline strings pass at a rate not below the bound beyond 3 sigma."""
        m = 2**log_m
        trials = 1000
        bound = normal_probability_bound(m)
        fraction = estimate_normal_probability(m, trials, CounterEntropy(31337 + log_m))
        sigma = math.sqrt(bound * (1 - bound) / trials)
        assert fraction >= bound - 3 * sigma
