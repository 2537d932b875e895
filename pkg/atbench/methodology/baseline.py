# The random search baseline and the budget it defines.
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.special import ndtr

import atbench
from atbench.constants import BaselineMode, DEFAULT_CUTOFF, DEFAULT_GRID_POINTS, DEFAULT_SIMULATIONS
from atbench.exceptions import DegenerateSpaceException, OutOfRangeException

# Absorbs rounding in t / mean_cost when t is a multiple of the mean cost
COUNT_TOLERANCE = 1e-9

# Completion probabilities beyond this distance from 0 or 1 are treated as exactly 0 or 1
PROBABILITY_EPSILON = 1e-15

BUDGET_RESOLUTION_SECONDS = 1e-6


def expected_min_after_n(values, n: int) -> float:
    """Expected minimum of n draws without replacement from values.

    Arguments:
        values: the N objective values, sorted ascending
        n: number of draws, 1 <= n <= N
    Returns:
        ``sum(v_i * C(N - i, n - 1) / C(N, n))``, with the binomial ratios computed by a recurrence
    Raises:
        OutOfRangeException: n outside [1, N]
    """
    values = np.asarray(values, dtype=np.float64)
    size = len(values)
    if not 1 <= n <= size:
        raise OutOfRangeException("n", n, f"1 <= n <= {size}")
    return float(np.dot(_min_weights(size, n), values))


def _min_weights(size: int, n: int) -> np.ndarray:
    # P(the i-th smallest value is the minimum of n draws), i = 1..N
    i = np.arange(1, size, dtype=np.float64)
    ratios = np.clip((size - i - n + 1) / (size - i), 0.0, None)
    return (n / size) * np.concatenate(([1.0], np.cumprod(ratios)))


class ExpectedMinima:
    """Memoised :func:`expected_min_after_n` over the sorted values of one cache"""

    def __init__(self, values):
        self.values = np.sort(np.asarray(values, dtype=np.float64))
        self._memo: Dict[int, float] = {}

    def __len__(self):
        return len(self.values)

    def __call__(self, n: int) -> float:
        n = int(n)
        if n not in self._memo:
            self._memo[n] = expected_min_after_n(self.values, n)
        return self._memo[n]

    def smallest_n_reaching(self, target: float) -> int:
        """Smallest n whose expected minimum is at most target. The expectation does not increase with n."""
        low, high = 1, len(self)
        while low < high:
            middle = (low + high) // 2
            if self(middle) <= target:
                high = middle
            else:
                low = middle + 1
        return low


@dataclass(frozen=True)
class TimeGrid:
    """Equidistant sampling times ``i * budget / len`` for i = 1..len"""
    budget: float
    points: Tuple[float, ...]

    def __len__(self):
        return len(self.points)

    @property
    def times(self) -> np.ndarray:
        return np.array(self.points, dtype=np.float64)

    @property
    def fractions(self) -> np.ndarray:
        """The sampling times as fractions of the budget"""
        return np.arange(1, len(self) + 1, dtype=np.float64) / len(self)


def make_grid(budget: float, points: int = DEFAULT_GRID_POINTS) -> TimeGrid:
    atbench.check_positive_args(budget=budget, points=points)
    times = budget * np.arange(1, points + 1, dtype=np.float64) / points
    times[-1] = budget
    return TimeGrid(budget=float(budget), points=tuple(times.tolist()))


@dataclass(frozen=True)
class BaselineCurve:
    """Expected best-so-far objective of random search at every time of a grid.
    ``stderr`` is only set for Monte Carlo estimates."""
    grid: TimeGrid
    values: np.ndarray
    mode: BaselineMode = BaselineMode.analytic
    stderr: Optional[np.ndarray] = None


def evaluations_by(t: float, mean_cost: float, size: int) -> int:
    """Number of evaluations random search is taken to complete by time t: ``max(1, floor(t / mean_cost))``,
    at most size"""
    return int(min(size, max(1, np.floor(t / mean_cost + COUNT_TOLERANCE))))


def _renewal_value(t: float, minima: ExpectedMinima, mean_cost: float, cost_variance: float) -> float:
    """E[best after the evaluations completed by t] = E(1) + sum_n P(N_t >= n) (E(n) - E(n-1)), with P(N_t >= n)
    the normal approximation of P(cost of n draws without replacement <= t)."""
    size = len(minima)
    n = np.arange(2, size + 1, dtype=np.float64)
    spread = np.sqrt(n * cost_variance * (size - n) / max(size - 1, 1))
    with np.errstate(divide="ignore", invalid="ignore"):
        probability = np.where(spread > 0, ndtr((t - n * mean_cost) / spread),
                               (n * mean_cost <= t * (1 + COUNT_TOLERANCE)).astype(np.float64))
    certain = np.flatnonzero(probability >= 1 - PROBABILITY_EPSILON)
    possible = np.flatnonzero(probability > PROBABILITY_EPSILON)
    # everything up to the last certain count telescopes to E(that count)
    start = int(n[certain[-1]]) if len(certain) else 1
    value = minima(start)
    for i in possible:
        count = int(n[i])
        if count > start:
            value += probability[i] * (minima(count) - minima(count - 1))
    return float(value)


def _monte_carlo(cache, grid: TimeGrid, simulations: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    values, costs = np.asarray(cache.objectives), np.asarray(cache.costs)
    size = len(values)
    limit = int(min(size, np.floor(grid.budget / costs.min()) + 1))
    times = grid.times
    rng = np.random.default_rng(seed)
    samples = np.empty((simulations, len(grid)))
    for s in range(simulations):
        order = rng.choice(size, size=limit, replace=False)
        completed = np.searchsorted(np.cumsum(costs[order]), times, side="right")
        # the first evaluation counts from the start, as in the analytic mapping
        samples[s] = np.minimum.accumulate(values[order])[np.maximum(completed, 1) - 1]
    stderr = samples.std(axis=0, ddof=1) / np.sqrt(simulations) if simulations > 1 else np.full(len(grid), np.nan)
    return samples.mean(axis=0), stderr


def baseline_curve(cache, grid: TimeGrid, mode=BaselineMode.analytic, simulations: int = DEFAULT_SIMULATIONS,
                   seed: int = 0) -> BaselineCurve:
    """Expected best-so-far of uniform random search without replacement on a cache.

    Arguments:
        cache: a loaded :class:`atbench.cache.TuningCache`
        grid: sampling times
        mode: analytic maps time to ``n(t) = max(1, floor(t / mean_eval_cost))`` evaluations. renewal also
          accounts for the spread of evaluation costs through a normal approximation of the time n evaluations
          take. monte_carlo averages ``simulations`` seeded random search runs with the true evaluation costs.
        simulations: Monte Carlo runs
        seed: Monte Carlo seed
    """
    mode = BaselineMode(mode)
    minima = ExpectedMinima(cache.objectives)
    mean_cost = cache.stats.mean_eval_cost
    stderr = None
    if mode is BaselineMode.analytic:
        values = np.array([minima(evaluations_by(t, mean_cost, len(minima))) for t in grid.points])
    elif mode is BaselineMode.renewal:
        variance = float(np.var(cache.costs))
        values = np.array([_renewal_value(t, minima, mean_cost, variance) for t in grid.points])
    else:
        values, stderr = _monte_carlo(cache, grid, simulations, seed)
    values.setflags(write=False)
    return BaselineCurve(grid=grid, values=values, mode=mode, stderr=stderr)


def baseline_value_at(cache, t: float, mode=BaselineMode.analytic, minima: Optional[ExpectedMinima] = None) -> float:
    """Analytic or renewal baseline at a single time"""
    mode = BaselineMode(mode)
    minima = minima or ExpectedMinima(cache.objectives)
    mean_cost = cache.stats.mean_eval_cost
    if mode is BaselineMode.analytic:
        return minima(evaluations_by(t, mean_cost, len(minima)))
    if mode is BaselineMode.renewal:
        return _renewal_value(t, minima, mean_cost, float(np.var(cache.costs)))
    raise ValueError("a Monte Carlo baseline has no closed form value")


def budget_target(cache, cutoff: float = DEFAULT_CUTOFF) -> float:
    """``median - cutoff * (median - optimum)``

    Raises:
        OutOfRangeException: cutoff outside (0, 1]
        DegenerateSpaceException: median equals optimum
    """
    if not 0 < cutoff <= 1:
        raise OutOfRangeException("cutoff", cutoff, "0 < cutoff <= 1")
    stats = cache.stats
    if not stats.median > stats.optimum:
        raise DegenerateSpaceException(stats.median)
    return stats.median - cutoff * (stats.median - stats.optimum)


def compute_budget(cache, cutoff: float = DEFAULT_CUTOFF, mode=BaselineMode.analytic) -> float:
    """Simulated time random search needs, in expectation, to cover ``cutoff`` of the distance from the median
    objective to the optimum.

    In analytic mode the baseline is a step function of the evaluation count, and the budget is the time of
    the first step at or below the target, ``n * mean_eval_cost``. In renewal mode the budget is bisected to
    1e-6 s. A Monte Carlo baseline uses the analytic budget so that all modes share one budget.

    Raises:
        OutOfRangeException: cutoff outside (0, 1]
        DegenerateSpaceException: median equals optimum, the space cannot be scored
    """
    mode = BaselineMode(mode)
    target = budget_target(cache, cutoff)
    minima = ExpectedMinima(cache.objectives)
    mean_cost = cache.stats.mean_eval_cost
    n = minima.smallest_n_reaching(target)
    budget = n * mean_cost

    if mode is BaselineMode.renewal:
        low, high = 0.0, float(np.sum(cache.costs))
        while high - low > BUDGET_RESOLUTION_SECONDS:
            middle = (low + high) / 2
            if baseline_value_at(cache, middle, mode, minima) <= target:
                high = middle
            else:
                low = middle
        budget = high

    atbench.logger.info(f"budget for {cache.cache_id}: {budget:.6g} s ({n} expected evaluations, "
                        f"cutoff {cutoff}, target {target:.6g})")
    return budget
