"""
Tests for count-based estimators.
"""

import math

import pytest
from structlog.testing import capture_logs

from src.errors import EmptyTableError, InvariantViolation
from src.oracle.quantum import expectations, prob_detuned
from src.schemas.models import AXIS_X, AXIS_Y, CellCount, CountTable, FrequencyTable, TripleCountTable
from src.stats.estimators import (
    clamped_root,
    epsilon_eta_from_counts,
    frequencies,
    moment_stderrs,
    moments_of,
    ozawa_check,
    ozawa_holds,
    robertson_check,
    robertson_estimate,
    robertson_holds,
    sign_mean_stderr,
    triple_moments,
    uncertainty_record,
)

ROOT2 = math.sqrt(2.0)


def _table(counts: dict, emitted: int = 10_000, phi: float = 0.0, moment=AXIS_X) -> CountTable:
    return CountTable.from_counts(counts, emitted=emitted, phi=phi, initial_moment=moment)


class TestFrequencies:
    """Test relative frequencies and moments."""

    def test_frequencies(self):
        """F = N / Σ N."""
        freq = frequencies(_table({(1, 1): 30, (1, -1): 10, (-1, 1): 40, (-1, -1): 20}, emitted=100))
        assert freq.total_detected == 100
        assert freq.f[(1, 1)] == 0.3
        assert freq.f[(-1, 1)] == 0.4

    def test_empty_table(self):
        """A table with no detections has no frequencies."""
        with pytest.raises(EmptyTableError, match="No detections"):
            frequencies(_table({}, emitted=100, phi=1.5))

    def test_moments(self):
        """⟨S1⟩, ⟨S2⟩, ⟨S1S2⟩ from the four frequencies."""
        m = moments_of(frequencies(_table({(1, 1): 30, (1, -1): 10, (-1, 1): 40, (-1, -1): 20}, emitted=100)))
        assert m.s1 == pytest.approx(-0.2)
        assert m.s2 == pytest.approx(0.4)
        assert m.s1s2 == pytest.approx(0.0, abs=1e-15)

    def test_moments_of_exact_distribution(self):
        """Frequencies equal to the probabilities give the theoretical expectations."""
        phi = math.pi / 3
        m = moments_of(FrequencyTable.from_distribution(prob_detuned(AXIS_X, phi)))
        assert tuple(m) == pytest.approx(tuple(expectations(AXIS_X, phi)), abs=1e-12)

    def test_deterministic_table_has_no_error(self):
        """All messengers detected in one cell: zero variance."""
        se = moment_stderrs(_table({(1, 1): 10_000}))
        assert tuple(se) == (0.0, 0.0, 0.0)

    def test_conservation_enforced(self):
        """Detected plus destroyed must equal emitted."""
        with pytest.raises(InvariantViolation, match="emitted"):
            CellCount(s1=1, s2=1, emitted=10, detected=4, destroyed_first=5)


class TestEpsilonEta:
    """Test ε and η from counts."""

    def test_zero_detuning(self):
        """φ = 0: ε = 0, η = √2."""
        table_x = _table({(1, 1): 5000, (1, -1): 5000})
        table_y = _table({pair: 2500 for pair in [(1, 1), (1, -1), (-1, 1), (-1, -1)]}, moment=AXIS_Y)
        est = epsilon_eta_from_counts(table_x, table_y)
        assert est.epsilon == 0.0
        assert est.eta == pytest.approx(ROOT2)
        assert est.stderr_epsilon == 0.0

    def test_quarter_turn(self):
        """φ = π/2: ε = √2, η = 0."""
        half = math.pi / 2
        table_x = _table({pair: 2500 for pair in [(1, 1), (1, -1), (-1, 1), (-1, -1)]}, phi=half)
        table_y = _table({(1, 1): 5000, (-1, 1): 5000}, phi=half, moment=AXIS_Y)
        est = epsilon_eta_from_counts(table_x, table_y)
        assert est.epsilon == pytest.approx(ROOT2)
        assert est.eta == 0.0

    def test_negative_radicand_clamped(self):
        """Round-off below zero becomes zero with a warning."""
        with capture_logs() as logs:
            value, stderr = clamped_root(-1e-16, 0.0, "epsilon", 0.0)
        assert value == 0.0
        assert stderr == 0.0
        assert logs[0]["log_level"] == "warning"
        assert logs[0]["quantity"] == "epsilon"

    def test_stderr_finite_near_zero(self):
        """The error of a root near zero stays finite."""
        value, stderr = clamped_root(0.0, 0.01)
        assert value == 0.0
        assert math.isfinite(stderr)
        assert stderr > 0.0


class TestOzawaCheck:
    """Test the error-disturbance inequality."""

    def test_zero_error(self):
        """ε = 0, η = √2 gives LHS √2."""
        record = ozawa_check(0.0, 0.0, ROOT2)
        assert record.ozawa_lhs == pytest.approx(ROOT2)
        assert record.heisenberg_product == 0.0
        assert record.bound == 1.0

    def test_full_flip(self):
        """ε = 2, η = √2 gives LHS 3√2 + 2."""
        record = ozawa_check(math.pi, 2.0, ROOT2)
        assert record.ozawa_lhs == pytest.approx(3 * ROOT2 + 2)
        assert record.heisenberg_product == pytest.approx(2 * ROOT2)
        assert record.ozawa_margin == pytest.approx(3 * ROOT2 + 1)

    def test_propagated_error(self):
        """LHS error propagates both inputs."""
        record = ozawa_check(0.5, 1.0, 1.0, stderr_epsilon=0.01, stderr_eta=0.02)
        assert record.stderr_ozawa_lhs == pytest.approx(math.hypot(0.02, 0.04))
        assert record.stderr_product == pytest.approx(math.hypot(0.01, 0.02))

    def test_holds_within_sigmas(self):
        """A LHS a little under the bound still holds within its error."""
        record = ozawa_check(0.0, 0.0, 0.99, stderr_eta=0.01)
        assert ozawa_holds(record)
        assert not ozawa_holds(ozawa_check(0.0, 0.0, 0.5, stderr_eta=0.01))

    def test_record_from_tables(self):
        """uncertainty_record chains estimate and check."""
        table_x = _table({(1, 1): 5000, (1, -1): 5000})
        table_y = _table({pair: 2500 for pair in [(1, 1), (1, -1), (-1, 1), (-1, -1)]}, moment=AXIS_Y)
        record = uncertainty_record(0.0, table_x, table_y)
        assert record.ozawa_lhs == pytest.approx(ROOT2)


class TestRobertson:
    """Test the Robertson estimators."""

    def test_estimate(self):
        """⟨σ⟩ = (N+ − N−)/(N+ + N−)."""
        assert robertson_estimate(70, 30) == pytest.approx(0.4)

    def test_estimate_empty(self):
        """Zero detections on both runs is an error."""
        with pytest.raises(EmptyTableError):
            robertson_estimate(0, 0)

    def test_pure_z_state(self):
        """a = z: LHS = RHS = 1."""
        record = robertson_check(0.0, 0.0, 1.0, 100)
        assert record.lhs == 1.0
        assert record.rhs == 1.0
        assert record.az == 1.0
        assert record.stderr_lhs == pytest.approx(0.01)
        assert record.stderr_rhs == 0.0
        assert robertson_holds(record)

    def test_pole_error_finite(self):
        """⟨σx⟩ = ±1 still leaves a nonzero LHS error."""
        record = robertson_check(1.0, 0.0, 0.0, 100, az=0.0)
        assert record.lhs == 0.0
        assert record.stderr_lhs > 0.0

    def test_violation_detected(self):
        """A LHS far below the RHS fails."""
        record = robertson_check(0.9, 0.9, 0.9, 1_000_000)
        assert not robertson_holds(record)


class TestTriple:
    """Test triple-beam correlators."""

    def test_moments(self):
        """Seven correlators from the eight beams."""
        table = TripleCountTable(counts={(1, 1, 1): 3, (-1, 1, -1): 1}, emitted=4)
        m = triple_moments(table)
        assert m.s1 == 0.5
        assert m.s2 == 1.0
        assert m.s3 == 0.5
        assert m.s1s3 == 1.0
        assert m.s1s2s3 == 1.0

    def test_empty(self):
        """No messengers, no correlators."""
        with pytest.raises(EmptyTableError):
            triple_moments(TripleCountTable(counts={}, emitted=0))

    def test_lost_messenger(self):
        """Cells must add up to the emitted count."""
        with pytest.raises(InvariantViolation, match="lost"):
            TripleCountTable(counts={(1, 1, 1): 3}, emitted=4)

    def test_sign_mean_stderr(self):
        """sqrt((1 − m²)/n)."""
        assert sign_mean_stderr(0.0, 100) == pytest.approx(0.1)
        assert sign_mean_stderr(1.0, 100) == 0.0
        assert sign_mean_stderr(0.5, 0) == 0.0
