"""
Tests for the simulated experiments against the quantum predictions.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.audit.logger import get_auditor
from src.devices.analyzer import SpinAnalyzer
from src.devices.source import emit_beam
from src.errors import ConfigurationError
from src.experiments.filtering import run_filtering_grid, run_filtering_triple
from src.experiments.grids import az_grid, phi_grid
from src.experiments.robertson import random_direction, run_robertson_sweep
from src.experiments.runner import run_tasks
from src.experiments.seeding import make_generator, stream_key
from src.experiments.uncertainty import run_setting_pair, run_uncertainty_sweep
from src.experiments.warmup import STARVED_AFTER, warm_up
from src.oracle.quantum import (
    expectations,
    filtering_directions,
    ozawa_lhs_theory,
    prob_triple,
)
from src.schemas.models import (
    AXIS_X,
    AXIS_Y,
    AXIS_Z,
    SETTING_PAIRS,
    SETTING_TRIPLES,
    AnalyzerConfig,
    AnalyzerModel,
    MagneticMoment,
    RobertsonRunConfig,
    SourceConfig,
    UncertaintyRunConfig,
)
from src.stats.estimators import (
    frequencies,
    moments_of,
    ozawa_holds,
    robertson_check,
    robertson_holds,
    sign_mean_stderr,
    triple_moments,
    uncertainty_record,
)

N = 10_000
GRID = phi_grid(0.0, 2 * math.pi, math.pi / 24)
FIRST_QUADRANT = tuple(phi for phi in GRID if phi <= math.pi / 2 + 1e-12)


def _config(**overrides) -> UncertaintyRunConfig:
    values = dict(detuning_grid=GRID, events_per_setting=N, master_seed=42)
    values.update(overrides)
    return UncertaintyRunConfig(**values)


def _fraction_within(points, attr: str, moment) -> float:
    """Share of grid points whose moments lie within 4/√N' of theory."""
    hits = 0
    for point in points:
        table = getattr(point, attr)
        measured = moments_of(frequencies(table))
        tolerance = 4.0 / math.sqrt(table.total_detected)
        theory = expectations(moment, point.phi)
        hits += all(abs(m - t) <= tolerance for m, t in zip(measured, theory))
    return hits / len(points)


class TestGrids:
    """Test parameter grids."""

    def test_phi_grid(self):
        """Default grid has 48 points 0, π/24, ..., 47π/24."""
        assert len(GRID) == 48
        assert GRID[0] == 0.0
        assert GRID[-1] == pytest.approx(47 * math.pi / 24)

    def test_az_grid(self):
        """Step 0.05 gives 41 points from −1 to 1."""
        grid = az_grid(0.05)
        assert len(grid) == 41
        assert grid[0] == -1.0
        assert grid[-1] == 1.0
        assert 0.0 in grid

    def test_bad_steps(self):
        """Non-positive steps are rejected."""
        with pytest.raises(ConfigurationError, match="positive"):
            phi_grid(0.0, 1.0, 0.0)
        with pytest.raises(ConfigurationError):
            az_grid(3.0)


class TestSeeding:
    """Test deterministic random streams."""

    def test_stream_key(self):
        """Keys are stable text."""
        key = stream_key("uncertainty", 0.5, 1, -1, (1.0, 0.0, 0.0), "SA2")
        assert key == "uncertainty|0.5|1|-1|(1.0,0.0,0.0)|SA2"

    def test_same_key_same_stream(self):
        """One seed and key always give the same numbers."""
        assert np.array_equal(make_generator(42, "k").random(5), make_generator(42, "k").random(5))

    def test_streams_differ(self):
        """Different keys or seeds give different streams."""
        base = make_generator(42, "k").random(5)
        assert not np.array_equal(base, make_generator(42, "k2").random(5))
        assert not np.array_equal(base, make_generator(43, "k").random(5))


class TestSettingRuns:
    """Test single setting runs."""

    def test_conservation(self):
        """Every messenger is detected or destroyed by SA2 or SA3."""
        cfg = _config(detuning_grid=(0.7,))
        for s1, s2 in SETTING_PAIRS:
            cell = run_setting_pair(cfg, 0.7, s1, s2)
            assert cell.detected + cell.destroyed_first + cell.destroyed_second == N

    def test_zero_events_rejected(self):
        """N = 0 is a configuration error."""
        with pytest.raises(ValidationError):
            _config(events_per_setting=0)

    def test_repeated_grid_values_rejected(self):
        """A grid may name each angle or a_z once."""
        with pytest.raises(ValidationError, match="repeats an angle: 0.5"):
            _config(detuning_grid=(0.5, 1.0, 0.5))
        with pytest.raises(ValidationError, match="repeats a value: 0.0"):
            RobertsonRunConfig(az_grid=(0.0, 0.0), master_seed=1)

    def test_x_at_zero_detuning(self):
        """a = x, φ = 0: the S1 = −1 settings detect nothing."""
        cfg = _config(detuning_grid=(0.0,))
        assert run_setting_pair(cfg, 0.0, -1, 1).detected == 0
        assert run_setting_pair(cfg, 0.0, -1, -1).detected == 0
        assert run_setting_pair(cfg, 0.0, 1, 1).detected > 0

    def test_deterministic(self):
        """Same seed, same counts."""
        cfg = _config(detuning_grid=(1.1,))
        assert run_setting_pair(cfg, 1.1, 1, -1) == run_setting_pair(cfg, 1.1, 1, -1)

    def test_seed_changes_counts(self):
        """A different seed gives different counts."""
        first = [run_setting_pair(_config(detuning_grid=(1.1,)), 1.1, *pair) for pair in SETTING_PAIRS]
        second = [
            run_setting_pair(_config(detuning_grid=(1.1,), master_seed=43), 1.1, *pair)
            for pair in SETTING_PAIRS
        ]
        assert [c.detected for c in first] != [c.detected for c in second]

    @pytest.mark.parametrize("model", list(AnalyzerModel))
    def test_extra_z_rotations_invisible(self, model):
        """z-rotations right before a z analyzer change no count."""
        phi = 0.9
        plain = _config(detuning_grid=(phi,), analyzer_model=model)
        rotated = _config(detuning_grid=(phi,), analyzer_model=model, theta3=0.7, theta5=-1.3)
        for s1, s2 in SETTING_PAIRS:
            assert run_setting_pair(plain, phi, s1, s2) == run_setting_pair(rotated, phi, s1, s2)

    def test_explicit_stage_one(self):
        """Preparing the moment with SF1 and θ1 gives the shortcut counts."""
        phi = 0.4
        diagonal = MagneticMoment(mx=math.sqrt(0.5), my=math.sqrt(0.5), mz=0.0)
        shortcut = _config(detuning_grid=(phi,), initial_moment=diagonal)
        explicit = _config(detuning_grid=(phi,), initial_moment=diagonal, explicit_stage_one=True)
        for s1, s2 in SETTING_PAIRS:
            assert run_setting_pair(shortcut, phi, s1, s2) == run_setting_pair(explicit, phi, s1, s2)

    def test_parallel_matches_sequential(self):
        """The worker count does not change any result."""
        cfg = _config(detuning_grid=(0.3, 1.2), events_per_setting=2000)
        tasks = [(cfg, phi, s1, s2) for phi in cfg.detuning_grid for s1, s2 in SETTING_PAIRS]
        sequential = [cell for cell, _ in run_tasks(run_setting_pair, tasks, workers=1)]
        parallel = [cell for cell, _ in run_tasks(run_setting_pair, tasks, workers=2)]
        assert sequential == parallel


def _dlm(axis, **overrides) -> SpinAnalyzer:
    return SpinAnalyzer(AnalyzerConfig(axis=axis, model=AnalyzerModel.DLM, gamma=0.999, **overrides))


class TestWarmUp:
    """Test DLM warm-up across chained analyzers."""

    def test_downstream_device_learns_fully(self):
        """An analyzer behind a lossy one still sees the whole warm-up."""
        source = SourceConfig(initial_moment=MagneticMoment(mx=-0.6, my=0.0, mz=0.8))
        first, second = _dlm(AXIS_X), _dlm(AXIS_Z)

        def feed(n):
            return second.process_beam(first.process_beam(emit_beam(source, n)).passed)

        rounds = warm_up((first, second), feed, 1000)
        assert rounds > 1
        assert first.state.events == 1000 * rounds
        assert second.state.events >= 1000

    def test_blocked_device_given_up(self):
        """Nothing ever passes an analyzer anti-parallel to the moment."""
        source = SourceConfig(initial_moment=MagneticMoment(mx=-1.0, my=0.0, mz=0.0))
        first, second = _dlm(AXIS_X), _dlm(AXIS_Z)

        def feed(n):
            return second.process_beam(first.process_beam(emit_beam(source, n)).passed)

        assert warm_up((first, second), feed, 1000) == STARVED_AFTER
        assert second.state.events == 0

    def test_no_warmup(self):
        """Zero warm-up events never calls the feed."""
        calls = []
        assert warm_up((_dlm(AXIS_Z),), calls.append, 0) == 0
        assert calls == []

    def test_default_warmup_reproduces_theory(self):
        """With 1000 warm-up events the DLM moments sit within 4/√N' at φ = π/4."""
        cfg = _config(detuning_grid=(math.pi / 4,), analyzer_model=AnalyzerModel.DLM, warmup_events=1000)
        points = run_uncertainty_sweep(cfg)
        assert _fraction_within(points, "table_x", AXIS_X) == 1.0
        assert _fraction_within(points, "table_y", AXIS_Y) == 1.0


class TestUncertaintySweep:
    """Test the detuning sweep against quantum theory."""

    def test_probabilistic_matches_theory(self):
        """Moments for a = x and a = y agree with the predictions on ≥95% of the grid."""
        points = run_uncertainty_sweep(_config())
        assert len(points) == 48
        assert _fraction_within(points, "table_x", AXIS_X) >= 0.95
        assert _fraction_within(points, "table_y", AXIS_Y) >= 0.95

    @pytest.mark.slow
    def test_dlm_matches_theory(self):
        """The deterministic learning machine reproduces the same moments."""
        points = run_uncertainty_sweep(_config(analyzer_model=AnalyzerModel.DLM))
        assert _fraction_within(points, "table_x", AXIS_X) >= 0.95
        assert _fraction_within(points, "table_y", AXIS_Y) >= 0.95

    @pytest.mark.parametrize("model,warmup", [
        (AnalyzerModel.PROBABILISTIC, 0),
        # the DLM learns slowly from u = 0 when |m·n| is close to one
        (AnalyzerModel.DLM, 5000),
    ])
    def test_error_disturbance(self, model, warmup):
        """LHS tracks theory, stays above one, while εη falls below one."""
        cfg = _config(detuning_grid=FIRST_QUADRANT, analyzer_model=model, warmup_events=warmup)
        for point in run_uncertainty_sweep(cfg):
            record = uncertainty_record(point.phi, point.table_x, point.table_y)
            assert abs(record.ozawa_lhs - ozawa_lhs_theory(point.phi)) <= 5 * record.stderr_ozawa_lhs + 1e-12
            assert ozawa_holds(record)
            if abs(point.phi - math.pi / 2) < 1e-12:
                assert record.heisenberg_product < 1.0 - 10 * record.stderr_product

    def test_audit_trail(self):
        """Each setting run leaves one conserving audit entry."""
        run_uncertainty_sweep(_config(detuning_grid=(0.0, 0.5), events_per_setting=500))
        entries = get_auditor().query(experiment="uncertainty-sweep")
        assert len(entries) == 2 * 2 * 4
        assert all(e.success and e.emitted == 500 for e in entries)

    def test_extra_moment_runs(self):
        """A third initial moment adds its own tables."""
        z = MagneticMoment(mx=0.0, my=0.0, mz=1.0)
        points = run_uncertainty_sweep(_config(detuning_grid=(0.5,), initial_moment=z, events_per_setting=500))
        assert points[0].table_a.initial_moment == (0.0, 0.0, 1.0)
        assert len(get_auditor().query(experiment="uncertainty-sweep")) == 12


class TestFilteringTriple:
    """Test the three-level filtering experiment."""

    def test_conserves(self):
        """Splitting analyzers destroy nothing."""
        b, c, d = filtering_directions(0.6)
        table = run_filtering_triple(AXIS_X, b, c, d, 5000, 42)
        assert sum(table.counts.values()) == 5000

    def test_grid_deterministic(self):
        """A filtering grid repeats exactly under the same seed; one audit entry per φ and call."""
        first = run_filtering_grid(AXIS_X, (0.2, 0.9), 2000, 7)
        second = run_filtering_grid(AXIS_X, (0.2, 0.9), 2000, 7)
        assert first == second
        assert len(get_auditor().query(experiment="filtering-triple")) == 4

    @pytest.mark.slow
    def test_matches_quantum(self):
        """Eight beams and correlators agree with theory at 10⁶ events."""
        n = 1_000_000
        phi = math.pi / 4
        b, c, d = filtering_directions(phi)
        table = run_filtering_triple(AXIS_X, b, c, d, n, 2024)
        theory = prob_triple(AXIS_X, b, c, d)
        for key in SETTING_TRIPLES:
            p = theory.probability(*key)
            assert abs(table.counts[key] / n - p) <= 4 * math.sqrt(p * (1 - p) / n) + 1e-12

        m = triple_moments(table)
        x = expectations(AXIS_X, phi)
        y = expectations(AXIS_Y, phi)
        for measured, expected in [
            (m.s1, x.s1), (m.s2, x.s2), (m.s1s2, x.s1s2),
            (m.s2s3, y.s1), (m.s1s3, y.s2), (m.s1s2, y.s1s2),
        ]:
            assert abs(measured - expected) <= 4 * sign_mean_stderr(expected, n)


class TestRobertsonSweep:
    """Test the single-analyzer sweep."""

    def test_random_direction(self):
        """Directions are unit vectors with the requested a_z."""
        moment = random_direction(42, 0.3)
        assert moment.mz == 0.3
        assert math.sqrt(moment.mx**2 + moment.my**2 + moment.mz**2) == pytest.approx(1.0)
        assert random_direction(42, 0.3) == moment

    def test_relation_holds(self):
        """LHS ≥ RHS within errors and ⟨σz⟩ ≈ a_z across the grid."""
        cfg = RobertsonRunConfig(az_grid=az_grid(0.05), events_per_axis=N, master_seed=42)
        points = run_robertson_sweep(cfg)
        assert len(points) == 41
        for point in points:
            record = robertson_check(point.sigma_x, point.sigma_y, point.sigma_z, N, az=point.az)
            if abs(point.az) < 1.0:
                assert robertson_holds(record)
            else:
                # at the poles the LHS deficit is the noise of ⟨σx⟩ and ⟨σy⟩ alone
                assert record.lhs >= 1.0 - 10.0 / N
            assert abs(point.sigma_z**2 - point.az**2) <= 4 / math.sqrt(N)
        assert len(get_auditor().query(experiment="robertson-sweep", limit=1000)) == 41 * 6
