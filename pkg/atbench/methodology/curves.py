# Baseline-relative performance curves and their aggregation over search spaces.
import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from atbench.exceptions import DegenerateDenominatorException, GridMismatchException, OutOfRangeException
from atbench.methodology.baseline import BaselineCurve, TimeGrid

# Two-sided 95% quantile of the standard normal distribution
Z_95 = 1.96


def confidence_half_width(stddev: float, runs: int) -> float:
    """Half width ``1.96 * stddev / sqrt(runs)`` of the normal 95% confidence interval of a mean

    Raises:
        OutOfRangeException: runs < 2 or a negative stddev
    """
    if runs < 2:
        raise OutOfRangeException("runs", runs, ">= 2")
    if stddev < 0:
        raise OutOfRangeException("stddev", stddev, ">= 0")
    return Z_95 * stddev / math.sqrt(runs)


@dataclass(frozen=True)
class PerformanceCurve:
    """Performance relative to the baseline at every time of a grid: 0 at the baseline, 1 at the optimum.

    ``values`` is computed from the mean best-so-far over the runs; ``run_values`` holds the same quantity
    per run, one row per run in run_id order.
    """
    grid: TimeGrid
    values: np.ndarray
    run_count: int
    run_values: np.ndarray

    @property
    def score(self) -> float:
        return float(np.mean(self.values))

    @property
    def stddev(self) -> np.ndarray:
        """Spread of the per-run values at every time, NaN with a single run"""
        if self.run_count < 2:
            return np.full(len(self.grid), np.nan)
        return self.run_values.std(axis=0, ddof=1)

    @property
    def run_scores(self) -> np.ndarray:
        return self.run_values.mean(axis=1)


def performance_curve(traces: Sequence, baseline: BaselineCurve, optimum: float) -> PerformanceCurve:
    """``(baseline(t) - mean best-so-far(t)) / (baseline(t) - optimum)`` at every time of the baseline's grid.

    A run with nothing completed at t counts as being at the baseline. Values below 0 are kept.

    Arguments:
        traces: one :class:`atbench.simulation.Trace` per run
        baseline: the baseline of the same cache
        optimum: the cache's optimum
    Raises:
        DegenerateDenominatorException: the baseline reaches the optimum at a grid time
    """
    if not traces:
        raise ValueError("a performance curve needs at least one trace")
    grid = baseline.grid
    reference = np.asarray(baseline.values, dtype=np.float64)
    denominator = reference - optimum
    degenerate = np.flatnonzero(denominator <= 0)
    if len(degenerate):
        raise DegenerateDenominatorException(grid.points[degenerate[0]])

    ordered = sorted(traces, key=lambda trace: trace.run_id)
    best = np.vstack([trace.best_so_far_curve(grid.points) for trace in ordered])
    best = np.where(np.isnan(best), reference, best)
    values = (reference - best.mean(axis=0)) / denominator
    run_values = (reference - best) / denominator
    values.setflags(write=False)
    run_values.setflags(write=False)
    return PerformanceCurve(grid=grid, values=values, run_count=len(ordered), run_values=run_values)


@dataclass(frozen=True)
class AggregateReport:
    """Per-space curves of one algorithm and their unweighted mean over spaces.

    The confidence half widths combine the per-space standard errors of the mean as independent; they are
    NaN when a space has a single run.
    """
    per_space_curves: Dict[str, PerformanceCurve]
    aggregate_curve: np.ndarray
    ci95_half_width: np.ndarray
    score: float
    score_ci95_half_width: float

    @property
    def fractions(self) -> np.ndarray:
        return next(iter(self.per_space_curves.values())).grid.fractions

    @property
    def ci95_low(self) -> np.ndarray:
        return self.aggregate_curve - self.ci95_half_width

    @property
    def ci95_high(self) -> np.ndarray:
        return self.aggregate_curve + self.ci95_half_width

    @property
    def repeats(self) -> int:
        return min(curve.run_count for curve in self.per_space_curves.values())


def _combined_half_width(variances: np.ndarray, runs: np.ndarray) -> np.ndarray:
    # variances and runs have one row per space
    return Z_95 * np.sqrt(np.sum(variances / runs, axis=0)) / len(runs)


def aggregate(curves: Mapping[str, PerformanceCurve]) -> AggregateReport:
    """Average performance curves over search spaces, index by index.

    Arguments:
        curves: performance curve per cache id, all with grids of the same length
    Raises:
        GridMismatchException: grid lengths differ
    """
    if not curves:
        raise ValueError("nothing to aggregate")
    lengths = sorted({len(curve.grid) for curve in curves.values()})
    if len(lengths) > 1:
        raise GridMismatchException(lengths)

    ordered = {key: curves[key] for key in sorted(curves)}
    matrix = np.vstack([curve.values for curve in ordered.values()])
    aggregate_curve = matrix.mean(axis=0)

    runs = np.array([[curve.run_count] for curve in ordered.values()], dtype=np.float64)
    variances = np.vstack([curve.stddev ** 2 for curve in ordered.values()])
    score_variances = np.array([[np.var(curve.run_scores, ddof=1) if curve.run_count > 1 else np.nan]
                                for curve in ordered.values()])

    aggregate_curve.setflags(write=False)
    return AggregateReport(
        per_space_curves=ordered,
        aggregate_curve=aggregate_curve,
        ci95_half_width=_combined_half_width(variances, runs),
        score=float(np.mean(aggregate_curve)),
        score_ci95_half_width=float(_combined_half_width(score_variances, runs)[0]),
    )


def score_table(reports: Mapping[str, AggregateReport]) -> List[Tuple[str, str, float]]:
    """Long format (algorithm, cache id, score) rows, sorted by algorithm then cache id"""
    rows = []
    for algorithm in sorted(reports):
        for cache_id, curve in reports[algorithm].per_space_curves.items():
            rows.append((algorithm, cache_id, curve.score))
    return rows


def aggregate_groups(report: AggregateReport, groups: Mapping[str, str]) -> Dict[str, AggregateReport]:
    """Aggregate the per-space curves of one algorithm separately for every group of spaces.

    Arguments:
        report: the algorithm's report over all spaces
        groups: group label per cache id; spaces without a label are left out
    Returns:
        The aggregate report of every group that has spaces, by group label in sorted order
    """
    members: Dict[str, Dict[str, PerformanceCurve]] = {}
    for cache_id, curve in report.per_space_curves.items():
        if cache_id in groups:
            members.setdefault(groups[cache_id], {})[cache_id] = curve
    return {group: aggregate(members[group]) for group in sorted(members)}


def relative_improvement(score: float, reference: float) -> float:
    """``(score - reference) / |reference|``, NaN when the reference is zero or NaN"""
    if reference == 0 or math.isnan(reference):
        return float("nan")
    return (score - reference) / abs(reference)


@dataclass(frozen=True)
class TargetComparison:
    """Score of an algorithm on the group of spaces it was designed for, next to the mean score of the
    algorithms that were not designed for that group"""
    group: str
    algorithm: str
    target_score: float
    non_target_mean: float

    @property
    def difference(self) -> float:
        return self.target_score - self.non_target_mean

    @property
    def relative_difference(self) -> float:
        return relative_improvement(self.target_score, self.non_target_mean)


def target_split(reports: Mapping[str, AggregateReport], groups: Mapping[str, str],
                 targets: Mapping[str, str]) -> List[TargetComparison]:
    """Compare every targeted algorithm with the non-targeted ones on its target group.

    Arguments:
        reports: aggregate report per algorithm label
        groups: group label per cache id
        targets: target group per algorithm label. Algorithms without a target are non-target on every group.
    Returns:
        One comparison per targeted algorithm, sorted by group then algorithm. The non-target mean is NaN
        when every algorithm targets the group.
    Raises:
        ValueError: a target names an unknown algorithm or a group without spaces
    """
    group_scores = {label: {group: r.score for group, r in aggregate_groups(report, groups).items()}
                    for label, report in reports.items()}
    comparisons = []
    for label, group in targets.items():
        if label not in reports:
            raise ValueError(f"target given for unknown algorithm {label}")
        if group not in group_scores[label]:
            raise ValueError(f"no search space belongs to target group {group}")
        others = [scores[group] for other, scores in group_scores.items() if targets.get(other) != group]
        non_target_mean = float(np.mean(others)) if others else float("nan")
        comparisons.append(TargetComparison(group, label, group_scores[label][group], non_target_mean))
    return sorted(comparisons, key=lambda c: (c.group, c.algorithm))
