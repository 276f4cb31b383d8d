#!/usr/bin/env python3
"""Unit tests for the preparation/measurement simulator."""

import numpy as np
import pytest

from qutrit_qrng.base import SIMULATION_DISCLAIMER, ConfigError
from qutrit_qrng.measurement import (
    CounterEntropy,
    FixedEntropy,
    GenerationRecord,
    OutcomeDistribution,
    PreparationSpec,
    generate_ternary,
    iter_ternary_chunks,
    outcome_distribution,
    prepare,
    sample_digit,
    sample_digits,
)
from qutrit_qrng.spin import born_probabilities, eigensystem_sx_analytic, measurement_basis
from qutrit_qrng.stats import within_standard_errors

QHQ = (0.25, 0.5, 0.25)


@pytest.mark.unit
class TestPrepare:
    """Test preparation variants."""

    def test_plus_one(self) -> None:
        """Test PLUS_ONE is (1, 0, 0)."""
        np.testing.assert_array_equal(prepare(PreparationSpec.PLUS_ONE), [1, 0, 0])

    def test_minus_one(self) -> None:
        """Test MINUS_ONE is (0, 0, 1)."""
        np.testing.assert_array_equal(prepare(PreparationSpec.MINUS_ONE), [0, 0, 1])

    def test_legacy(self) -> None:
        """Test LEGACY_SZ_ZERO is (0, 1, 0)."""
        np.testing.assert_array_equal(prepare(PreparationSpec.LEGACY_SZ_ZERO), [0, 1, 0])

    def test_superposition_normalized(self) -> None:
        """Test SUPERPOSITION has unit norm."""
        assert abs(np.linalg.norm(prepare(PreparationSpec.SUPERPOSITION)) - 1) < 1e-12

    def test_superposition_is_plus_one(self) -> None:
        """Test the superposition combination reduces to |+1>."""
        np.testing.assert_allclose(
            prepare(PreparationSpec.SUPERPOSITION), prepare(PreparationSpec.PLUS_ONE), atol=1e-12
        )

    def test_parse(self) -> None:
        """Test parsing by value and by member name."""
        assert PreparationSpec.parse("plus1") is PreparationSpec.PLUS_ONE
        assert PreparationSpec.parse("LEGACY") is PreparationSpec.LEGACY_SZ_ZERO
        assert PreparationSpec.parse("minus_one") is PreparationSpec.MINUS_ONE

    def test_parse_unknown(self) -> None:
        """Test unknown names raise ConfigError."""
        with pytest.raises(ConfigError):
            PreparationSpec.parse("sz0")


@pytest.mark.unit
class TestOutcomeDistribution:
    """Test outcome distributions under the digit mapping."""

    @pytest.mark.parametrize(
        "spec",
        [PreparationSpec.PLUS_ONE, PreparationSpec.MINUS_ONE, PreparationSpec.SUPERPOSITION],
    )
    def test_quarter_half_quarter(self, spec: PreparationSpec) -> None:
        """Test the three preparations give (1/4, 1/2, 1/4) within 1e-12."""
        np.testing.assert_allclose(outcome_distribution(spec).p, QHQ, atol=1e-12)

    def test_legacy(self) -> None:
        """Test the legacy preparation never yields digit 1."""
        p = outcome_distribution(PreparationSpec.LEGACY_SZ_ZERO).p
        assert p[1] == 0.0
        assert p[0] == pytest.approx(0.5, abs=1e-12)
        assert p[2] == pytest.approx(0.5, abs=1e-12)

    def test_matches_born(self) -> None:
        """Test every variant equals the Born probabilities in the S_x basis."""
        for spec in PreparationSpec:
            expected = born_probabilities(prepare(spec), eigensystem_sx_analytic())
            np.testing.assert_allclose(outcome_distribution(spec).p, expected, atol=1e-15)
            assert abs(sum(outcome_distribution(spec).p) - 1) < 1e-12

    def test_custom_basis(self) -> None:
        """Test measuring |+1> along z is certain."""
        dist = outcome_distribution(PreparationSpec.PLUS_ONE, measurement_basis(0.0, 0.0))
        np.testing.assert_allclose(dist.p, [1, 0, 0], atol=1e-12)

    def test_validation(self) -> None:
        """Test invalid distributions are rejected."""
        with pytest.raises(ValueError):
            OutcomeDistribution((0.5, 0.6, -0.1))
        with pytest.raises(ValueError):
            OutcomeDistribution((0.5, 0.2, 0.2))


@pytest.mark.unit
class TestSampling:
    """Test inverse-CDF sampling."""

    def test_degenerate(self) -> None:
        """Test a point mass on digit 0 always yields 0."""
        dist = OutcomeDistribution((1.0, 0.0, 0.0))
        entropy = CounterEntropy(1)
        assert all(sample_digit(dist, entropy) == 0 for _ in range(100))

    def test_thresholds(self) -> None:
        """Test draws land in half-open intervals at 0.25 and 0.75."""
        dist = OutcomeDistribution(QHQ)
        draws = [0.0, 0.2499, 0.25, 0.5, 0.7499, 0.75, 0.9999]
        entropy = FixedEntropy(draws)
        assert [sample_digit(dist, entropy) for _ in draws] == [0, 0, 1, 1, 1, 2, 2]
        np.testing.assert_array_equal(sample_digits(dist, np.array(draws)), [0, 0, 1, 1, 1, 2, 2])

    def test_one_draw_per_digit(self) -> None:
        """Test sample_digit consumes exactly one uniform."""
        entropy = FixedEntropy([0.1, 0.5, 0.9])
        dist = OutcomeDistribution(QHQ)
        assert [sample_digit(dist, entropy) for _ in range(3)] == [0, 1, 2]

    def test_vectorised_matches_scalar(self) -> None:
        """Test chunked sampling equals one-at-a-time sampling for the same seed."""
        dist = OutcomeDistribution(QHQ)
        entropy = CounterEntropy(9)
        one_by_one = [sample_digit(dist, entropy) for _ in range(500)]
        vector = sample_digits(dist, CounterEntropy(9).uniforms(500))
        assert one_by_one == vector.tolist()

    def test_fixed_entropy_rejects_out_of_range(self) -> None:
        """Test draws outside [0, 1) are rejected."""
        with pytest.raises(ValueError):
            FixedEntropy([1.0])

    def test_negative_seed(self) -> None:
        """Test negative seeds are rejected."""
        with pytest.raises(ConfigError):
            CounterEntropy(-1)


@pytest.mark.unit
class TestGenerateTernary:
    """Test stream generation and records."""

    def test_empty(self) -> None:
        """Test n = 0 gives an empty stream."""
        stream, record = generate_ternary(PreparationSpec.PLUS_ONE, 0, CounterEntropy(0))
        assert len(stream) == 0
        assert record.tallies == [0, 0, 0]

    def test_reproducible(self) -> None:
        """Test a fixed seed reproduces the stream exactly."""
        a, _ = generate_ternary(PreparationSpec.PLUS_ONE, 1000, CounterEntropy(42))
        b, _ = generate_ternary(PreparationSpec.PLUS_ONE, 1000, CounterEntropy(42))
        c, _ = generate_ternary(PreparationSpec.PLUS_ONE, 1000, CounterEntropy(43))
        assert a == b
        assert a != c

    def test_chunking_invariant(self) -> None:
        """Test chunk size does not change the stream."""
        whole = np.concatenate(
            list(iter_ternary_chunks(PreparationSpec.PLUS_ONE, 1000, CounterEntropy(5)))
        )
        pieces = np.concatenate(
            list(iter_ternary_chunks(PreparationSpec.PLUS_ONE, 1000, CounterEntropy(5), chunk_size=7))
        )
        np.testing.assert_array_equal(whole, pieces)

    def test_tallies_match(self) -> None:
        """Test record tallies agree with the stream."""
        stream, record = generate_ternary(PreparationSpec.SUPERPOSITION, 5000, CounterEntropy(3))
        assert sum(record.tallies) == record.count == 5000
        assert record.tallies == [int(np.sum(stream.digits == d)) for d in range(3)]

    def test_legacy_never_one(self) -> None:
        """Test the legacy preparation never emits digit 1."""
        stream, record = generate_ternary(PreparationSpec.LEGACY_SZ_ZERO, 100_000, CounterEntropy(1))
        assert record.tallies[1] == 0
        assert not np.any(stream.digits == 1)

    def test_record_document(self) -> None:
        """Test the record serializes with the disclaimer and parses back."""
        _, record = generate_ternary(PreparationSpec.MINUS_ONE, 10, CounterEntropy(7))
        document = record.to_dict()
        assert document["preparation"] == "minus1"
        assert document["seed"] == 7
        assert document["disclaimer"] == SIMULATION_DISCLAIMER
        assert GenerationRecord.from_dict(document) == record

    def test_record_rejects_bad_tallies(self) -> None:
        """Test tallies must sum to the count."""
        with pytest.raises(ValueError):
            GenerationRecord(seed=0, preparation=PreparationSpec.PLUS_ONE, count=3, tallies=[1, 1, 0])


@pytest.mark.slow
class TestDistributionalStatistics:
    """Statistical acceptance of the simulated distribution."""

    def test_ten_million_digits(self) -> None:
        """Test per-digit frequencies lie within 4 standard errors."""
        n = 10_000_000
        _, record = generate_ternary(PreparationSpec.PLUS_ONE, n, CounterEntropy(20240101))
        for count, p in zip(record.tallies, QHQ):
            assert within_standard_errors(count, n, p)

    def test_legacy_million(self) -> None:
        """Test a million legacy digits hold no digit 1."""
        _, record = generate_ternary(PreparationSpec.LEGACY_SZ_ZERO, 1_000_000, CounterEntropy(2))
        assert record.tallies[1] == 0
