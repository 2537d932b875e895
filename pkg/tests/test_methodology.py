import itertools
from fractions import Fraction

import numpy as np
import pytest

from atbench.cache import CacheEntry, TuningCache, synth_cache
from atbench.constants import BaselineMode
from atbench.exceptions import DegenerateDenominatorException, DegenerateSpaceException, GridMismatchException, \
    OutOfRangeException
from atbench.methodology import BaselineCurve, ExpectedMinima, PerformanceCurve, aggregate, aggregate_groups, \
    baseline_curve, baseline_value_at, budget_target, compute_budget, confidence_half_width, evaluations_by, \
    expected_min_after_n, make_grid, performance_curve, relative_improvement, score_table, target_split
from atbench.simulation import Trace, TraceEvent, derive_run_seed, run_optimizer
from tests import AtbenchTestCase


def with_constant_costs(cache, cost):
    entries = {config: CacheEntry(config, entry.valid, entry.objective, cost if entry.valid else 0.0)
               for config, entry in cache.entries.items()}
    return TuningCache(cache.metadata, cache.space, entries)


def flat_curve(values, runs=1):
    values = np.asarray(values, dtype=np.float64)
    grid = make_grid(1.0, len(values))
    return PerformanceCurve(grid=grid, values=values, run_count=runs, run_values=np.tile(values, (runs, 1)))


def replay_trace(times, objectives, run_id=0):
    return Trace(run_id=run_id, events=[TraceEvent(float(t), (i,), float(f), True)
                                        for i, (t, f) in enumerate(zip(times, objectives))])


class TestExpectedMinimum(AtbenchTestCase):

    def test_examples(self):
        values = [1.0, 2.0, 3.0, 4.0]
        assert expected_min_after_n(values, 2) == pytest.approx(10 / 6, rel=1e-12)
        assert expected_min_after_n(values, 4) == 1.0
        assert expected_min_after_n(values, 1) == pytest.approx(2.5, rel=1e-12)

    def test_out_of_range(self):
        with pytest.raises(OutOfRangeException):
            expected_min_after_n([1.0, 2.0], 0)
        with pytest.raises(OutOfRangeException):
            expected_min_after_n([1.0, 2.0], 3)

    def test_matches_subset_enumeration(self):
        rng = np.random.default_rng(17)
        for size in range(1, 13):
            values = np.sort(np.round(rng.uniform(0, 10, size), 1))
            exact_values = [Fraction(float(v)) for v in values]
            previous = None
            for n in range(1, size + 1):
                subsets = list(itertools.combinations(exact_values, n))
                exact = float(sum(min(s) for s in subsets) / len(subsets))
                found = expected_min_after_n(values, n)
                assert found == pytest.approx(exact, rel=1e-12, abs=1e-12)
                assert values[0] - 1e-12 <= found <= values.mean() + 1e-12
                if previous is not None:
                    assert found <= previous + 1e-12
                previous = found

    def test_memoised(self):
        minima = ExpectedMinima([4.0, 1.0, 3.0, 2.0])
        assert minima(2) == pytest.approx(10 / 6)
        assert minima.smallest_n_reaching(1.7) == 2
        assert minima.smallest_n_reaching(1.0) == 4
        assert minima.smallest_n_reaching(10.0) == 1


class TestTimeGrid(AtbenchTestCase):

    def test_equidistant(self):
        grid = make_grid(10.0, 4)
        assert grid.points == (2.5, 5.0, 7.5, 10.0)
        np.testing.assert_array_equal(grid.fractions, [0.25, 0.5, 0.75, 1.0])
        assert len(grid) == 4

    def test_ends_at_budget(self):
        grid = make_grid(0.3, 7)
        assert grid.points[-1] == 0.3
        spacing = np.diff((0.0,) + grid.points)
        np.testing.assert_allclose(spacing, 0.3 / 7, rtol=1e-9)

    def test_positive(self):
        with pytest.raises(ValueError):
            make_grid(0.0, 10)
        with pytest.raises(ValueError):
            make_grid(1.0, 0)


class TestBaselineCurve(AtbenchTestCase):

    def test_values_example(self):
        cache = self.load_cache("values.json")
        curve = baseline_curve(cache, make_grid(4.0, 4))
        np.testing.assert_allclose(curve.values, [2.5, 10 / 6, 1.25, 1.0], rtol=1e-12)
        assert curve.mode is BaselineMode.analytic
        assert curve.stderr is None

    def test_evaluations_by(self):
        assert evaluations_by(0.1, 1.0, 4) == 1
        assert evaluations_by(2.0, 1.0, 4) == 2
        assert evaluations_by(0.3 * 3, 0.3, 10) == 3
        assert evaluations_by(100.0, 1.0, 4) == 4

    def test_non_increasing(self):
        cache = synth_cache("rugged", 3, 6, 1)
        grid = make_grid(compute_budget(cache), 50)
        for mode in (BaselineMode.analytic, BaselineMode.renewal):
            values = baseline_curve(cache, grid, mode).values
            assert np.all(np.diff(values) <= 1e-12)

    def test_reaches_optimum(self):
        cache = self.load_cache("xy.json")
        curve = baseline_curve(cache, make_grid(100.0, 5))
        assert curve.values[-1] == cache.stats.optimum

    def test_analytic_gap_to_monte_carlo(self):
        # the floor in the analytic time mapping lags the simulated runs early in the budget
        cache = synth_cache("uniform_random", 3, 8, 0)
        grid = make_grid(compute_budget(cache))
        simulated = baseline_curve(cache, grid, BaselineMode.monte_carlo, simulations=10000, seed=0)
        analytic = baseline_curve(cache, grid)
        renewal = baseline_curve(cache, grid, BaselineMode.renewal)
        analytic_gap = np.abs(analytic.values - simulated.values) / simulated.values
        renewal_gap = np.abs(renewal.values - simulated.values) / simulated.values
        assert analytic_gap.max() == pytest.approx(0.116, abs=0.05)
        assert int(np.argmax(analytic_gap)) < 5
        assert renewal_gap.max() < 0.03
        assert renewal_gap.max() < analytic_gap.max()

    def test_monte_carlo_agrees_with_renewal(self):
        cache = synth_cache("uniform_random", 3, 8, 0)
        grid = make_grid(compute_budget(cache), 50)
        renewal = baseline_curve(cache, grid, BaselineMode.renewal)
        simulated = baseline_curve(cache, grid, BaselineMode.monte_carlo, simulations=10000, seed=3)
        span = cache.stats.median - cache.stats.optimum
        tolerance = 0.01 * span + 4 * simulated.stderr
        assert np.all(np.abs(renewal.values - simulated.values) <= tolerance)

    def test_monte_carlo_agrees_with_analytic_for_constant_costs(self):
        cache = with_constant_costs(synth_cache("uniform_random", 3, 8, 0), 1.0)
        grid = make_grid(compute_budget(cache), 50)
        analytic = baseline_curve(cache, grid)
        simulated = baseline_curve(cache, grid, BaselineMode.monte_carlo, simulations=10000, seed=5)
        assert np.all(np.abs(analytic.values - simulated.values) <= 4 * simulated.stderr + 1e-9)

    def test_monte_carlo_is_seeded(self):
        cache = self.load_cache("xy.json")
        grid = make_grid(3.0, 10)
        a = baseline_curve(cache, grid, "monte_carlo", simulations=200, seed=1)
        b = baseline_curve(cache, grid, "monte_carlo", simulations=200, seed=1)
        np.testing.assert_array_equal(a.values, b.values)

    def test_no_single_value_for_monte_carlo(self):
        with pytest.raises(ValueError):
            baseline_value_at(self.load_cache("xy.json"), 1.0, BaselineMode.monte_carlo)


class TestComputeBudget(AtbenchTestCase):

    def test_values_example(self):
        cache = self.load_cache("values.json")
        assert budget_target(cache) == pytest.approx(1.075)
        assert compute_budget(cache) == 4.0
        assert compute_budget(cache, cutoff=1.0) == 4.0
        assert compute_budget(cache, cutoff=0.5) == 2.0

    def test_degenerate(self):
        cache = self.load_cache("degenerate.json")
        with pytest.raises(DegenerateSpaceException):
            compute_budget(cache)

    def test_cutoff_range(self):
        cache = self.load_cache("values.json")
        for cutoff in (0.0, -0.5, 1.5):
            with pytest.raises(OutOfRangeException):
                compute_budget(cache, cutoff)

    def test_first_time_at_target(self):
        cache = synth_cache("bowl", 2, 5, 0)
        target = budget_target(cache)
        budget = compute_budget(cache)
        assert baseline_value_at(cache, budget) <= target
        assert baseline_value_at(cache, budget - 1e-6) > target

    def test_renewal(self):
        cache = synth_cache("rugged", 2, 8, 2)
        target = budget_target(cache)
        budget = compute_budget(cache, mode=BaselineMode.renewal)
        assert baseline_value_at(cache, budget, BaselineMode.renewal) <= target
        assert baseline_value_at(cache, budget - 2e-6, BaselineMode.renewal) > target

    def test_renewal_with_constant_costs(self):
        cache = self.load_cache("values.json")
        assert compute_budget(cache, mode="renewal") == pytest.approx(4.0, abs=2e-6)
        assert compute_budget(cache, mode="monte_carlo") == 4.0


class TestPerformanceCurve(AtbenchTestCase):

    def test_example(self):
        baseline = BaselineCurve(make_grid(1.0, 1), np.array([10.0]))
        curve = performance_curve([replay_trace([0.5], [4.0])], baseline, 2.0)
        assert curve.values[0] == pytest.approx(0.75)
        two_runs = performance_curve([replay_trace([0.5], [3.0]), replay_trace([0.5], [5.0], run_id=1)],
                                     baseline, 2.0)
        assert two_runs.values[0] == pytest.approx(0.75)
        np.testing.assert_allclose(two_runs.run_values[:, 0], [0.875, 0.625])
        assert two_runs.run_count == 2

    def test_baseline_replay_scores_zero(self):
        cache = synth_cache("uniform_random", 3, 8, 0)
        grid = make_grid(compute_budget(cache), 50)
        baseline = baseline_curve(cache, grid)
        trace = replay_trace(grid.points, baseline.values)
        curve = performance_curve([trace], baseline, cache.stats.optimum)
        assert np.all(np.abs(curve.values) <= 1e-9)

    def test_instant_optimum_scores_one(self):
        cache = synth_cache("uniform_random", 3, 8, 0)
        grid = make_grid(compute_budget(cache), 50)
        baseline = baseline_curve(cache, grid)
        curve = performance_curve([replay_trace([0.0], [cache.stats.optimum])], baseline, cache.stats.optimum)
        assert np.all(curve.values == 1.0)
        assert curve.score == 1.0

    def test_nothing_completed_counts_as_baseline(self):
        baseline = BaselineCurve(make_grid(4.0, 4), np.array([8.0, 6.0, 5.0, 4.0]))
        curve = performance_curve([replay_trace([2.5], [2.0])], baseline, 2.0)
        np.testing.assert_allclose(curve.values, [0.0, 0.0, 1.0, 1.0])

    def test_worse_than_baseline_is_negative(self):
        baseline = BaselineCurve(make_grid(1.0, 1), np.array([4.0]))
        curve = performance_curve([replay_trace([0.5], [6.0])], baseline, 2.0)
        assert curve.values[0] == -1.0

    def test_single_run_has_no_spread(self):
        baseline = BaselineCurve(make_grid(1.0, 2), np.array([4.0, 3.0]))
        curve = performance_curve([replay_trace([0.1], [3.0])], baseline, 2.0)
        assert np.all(np.isnan(curve.stddev))

    def test_degenerate_denominator(self):
        cache = self.load_cache("values.json")
        baseline = baseline_curve(cache, make_grid(4.0, 4))
        with pytest.raises(DegenerateDenominatorException):
            performance_curve([replay_trace([0.5], [3.0])], baseline, cache.stats.optimum)
        with pytest.raises(ValueError):
            performance_curve([], baseline, cache.stats.optimum)

    def test_affine_invariance(self):
        for cache in (synth_cache("rugged", 3, 6, 8), synth_cache("uniform_random", 2, 10, 3)):
            rescaled = self.rescaled_cache(cache, 3.5, -7.0)
            grid = make_grid(compute_budget(cache), 20)
            curves = []
            for variant in (cache, rescaled):
                traces = [run_optimizer("random_search", variant, grid.budget, seed) for seed in range(5)]
                curves.append(performance_curve(traces, baseline_curve(variant, grid), variant.stats.optimum))
            np.testing.assert_allclose(curves[0].values, curves[1].values, rtol=1e-9, atol=1e-9)


class TestAggregate(AtbenchTestCase):

    def test_reported_mean(self):
        scores = {"dedispersion": 0.429, "convolution": 0.383, "hotspot": 0.432, "gemm": 0.373}
        report = aggregate({name: flat_curve([score]) for name, score in scores.items()})
        assert round(report.score, 3) == 0.404

    def test_two_spaces(self):
        report = aggregate({"b": flat_curve([0.6, 0.8]), "a": flat_curve([0.2, 0.4])})
        np.testing.assert_allclose(report.aggregate_curve, [0.4, 0.6])
        assert report.score == pytest.approx(0.5)
        assert list(report.per_space_curves) == ["a", "b"]
        np.testing.assert_array_equal(report.fractions, [0.5, 1.0])

    def test_single_space(self):
        curve = flat_curve([0.1, 0.3, 0.2])
        report = aggregate({"only": curve})
        np.testing.assert_array_equal(report.aggregate_curve, curve.values)
        assert report.score == pytest.approx(curve.score)

    def test_order_does_not_matter(self):
        curves = {"x": flat_curve([0.1, 0.7]), "y": flat_curve([0.3, 0.2]), "z": flat_curve([0.9, 0.0])}
        reversed_curves = dict(reversed(list(curves.items())))
        assert aggregate(curves).score == aggregate(reversed_curves).score

    def test_grid_mismatch(self):
        with pytest.raises(GridMismatchException):
            aggregate({"a": flat_curve([0.1, 0.2]), "b": flat_curve([0.1, 0.2, 0.3])})
        with pytest.raises(ValueError):
            aggregate({})

    def test_confidence_band(self):
        grid = make_grid(1.0, 2)
        first = PerformanceCurve(grid, np.array([0.5, 0.6]), 4,
                                 np.array([[0.4, 0.5], [0.6, 0.7], [0.5, 0.6], [0.5, 0.6]]))
        second = PerformanceCurve(grid, np.array([0.2, 0.3]), 4,
                                  np.array([[0.1, 0.3], [0.3, 0.3], [0.2, 0.2], [0.2, 0.4]]))
        report = aggregate({"first": first, "second": second})
        variances = first.run_values.var(axis=0, ddof=1) / 4 + second.run_values.var(axis=0, ddof=1) / 4
        np.testing.assert_allclose(report.ci95_half_width, 1.96 * np.sqrt(variances) / 2)
        np.testing.assert_allclose(report.ci95_high - report.ci95_low, 2 * report.ci95_half_width)
        assert report.repeats == 4

    def test_score_table(self):
        reports = {"random_search": aggregate({"b": flat_curve([0.0]), "a": flat_curve([0.5])}),
                   "hybrid_vndx": aggregate({"a": flat_curve([0.25])})}
        assert score_table(reports) == [("hybrid_vndx", "a", 0.25), ("random_search", "a", 0.5),
                                        ("random_search", "b", 0.0)]


class TestGroups(AtbenchTestCase):

    GROUPS = {"gemm/a": "gemm", "gemm/b": "gemm", "conv/a": "conv"}

    def make_reports(self):
        scores = {"random_search": {"gemm/a": 0.2, "gemm/b": 0.4, "conv/a": 0.6},
                  "gemm_tuned": {"gemm/a": 0.6, "gemm/b": 0.8, "conv/a": 0.5},
                  "conv_tuned": {"gemm/a": 0.3, "gemm/b": 0.3, "conv/a": 0.9}}
        return {label: aggregate({cache_id: flat_curve([score]) for cache_id, score in per_space.items()})
                for label, per_space in scores.items()}

    def test_aggregate_groups(self):
        groups = aggregate_groups(self.make_reports()["random_search"], self.GROUPS)
        assert list(groups) == ["conv", "gemm"]
        assert groups["conv"].score == pytest.approx(0.6)
        assert groups["gemm"].score == pytest.approx(0.3)
        assert list(groups["gemm"].per_space_curves) == ["gemm/a", "gemm/b"]

    def test_unlabelled_spaces_left_out(self):
        groups = aggregate_groups(self.make_reports()["random_search"], {"conv/a": "conv"})
        assert list(groups) == ["conv"]
        assert aggregate_groups(self.make_reports()["random_search"], {}) == {}

    def test_relative_improvement(self):
        assert relative_improvement(0.5, 0.4) == pytest.approx(0.25)
        assert relative_improvement(0.1, -0.2) == pytest.approx(1.5)
        assert relative_improvement(0.463, 0.404) == pytest.approx(0.146, abs=5e-4)
        assert np.isnan(relative_improvement(0.3, 0.0))
        assert np.isnan(relative_improvement(0.3, float("nan")))

    def test_target_split(self):
        comparisons = target_split(self.make_reports(), self.GROUPS, {"gemm_tuned": "gemm", "conv_tuned": "conv"})
        assert [(c.group, c.algorithm) for c in comparisons] == [("conv", "conv_tuned"), ("gemm", "gemm_tuned")]
        conv, gemm = comparisons
        assert conv.target_score == pytest.approx(0.9)
        assert conv.non_target_mean == pytest.approx(0.55)
        assert conv.difference == pytest.approx(0.35)
        assert gemm.target_score == pytest.approx(0.7)
        assert gemm.non_target_mean == pytest.approx(0.3)
        assert gemm.relative_difference == pytest.approx(0.4 / 0.3)

    def test_every_algorithm_targeted(self):
        reports = self.make_reports()
        targets = {label: "gemm" for label in reports}
        assert all(np.isnan(c.non_target_mean) for c in target_split(reports, self.GROUPS, targets))

    def test_target_errors(self):
        with pytest.raises(ValueError):
            target_split(self.make_reports(), self.GROUPS, {"hill_climbing": "gemm"})
        with pytest.raises(ValueError):
            target_split(self.make_reports(), self.GROUPS, {"gemm_tuned": "hotspot"})


class TestConfidenceHalfWidth(AtbenchTestCase):

    def test_examples(self):
        assert confidence_half_width(0.1, 100) == pytest.approx(0.0196)
        assert confidence_half_width(0.0, 10) == 0.0
        assert confidence_half_width(0.2, 4) == pytest.approx(0.196)

    def test_errors(self):
        with pytest.raises(OutOfRangeException):
            confidence_half_width(0.1, 1)
        with pytest.raises(OutOfRangeException):
            confidence_half_width(-0.1, 10)


class TestRandomSearchSelfConsistency(AtbenchTestCase):

    def test_scores_near_zero(self):
        cache = synth_cache("uniform_random", 3, 8, 0)
        budget = compute_budget(cache)
        baseline = baseline_curve(cache, make_grid(budget))
        traces = [run_optimizer("random_search", cache, budget, derive_run_seed(0, i), run_id=i)
                  for i in range(1000)]
        score = performance_curve(traces, baseline, cache.stats.optimum).score
        assert -0.05 <= score <= 0.05
