# The simulated objective: cached measurements on a simulated clock.
from typing import Dict, Optional

import atbench
from atbench.exceptions import InvalidConfigurationException, LengthMismatchException, OutOfRangeException, \
    UnknownConfigurationException
from atbench.simulation.trace import Trace, TraceEvent
from atbench.space import Configuration

# Consecutive memoised repeats after which a run is considered stalled
MAX_CONSECUTIVE_REPEATS = 10000


class BudgetedEvaluator:
    """Serves objective values of a tuning cache to one optimizer run.

    A first evaluation of a configuration advances the simulated clock by the entry's evaluation cost.
    Repeats are answered from a memo at no cost. The evaluation that crosses the budget completes, so the
    spent time may end up above the budget.

    Arguments:
        cache: the :class:`atbench.cache.TuningCache` to serve from
        budget_seconds: simulated time available to the run
        run_id: index of the run in a repeated experiment
        master_seed: experiment seed the run's seed was derived from
        rng_seed: seed of the optimizer's generator, recorded for reproduction
    """

    def __init__(self, cache, budget_seconds: float, run_id: int = 0, master_seed: int = 0,
                 rng_seed: Optional[int] = None):
        atbench.check_positive_args(budget_seconds=budget_seconds)
        self.cache = cache
        self.space = cache.space
        self.budget_seconds = float(budget_seconds)
        self.spent_seconds = 0.0
        self.memo: Dict[Configuration, float] = {}
        self.trace = Trace(run_id=run_id, master_seed=master_seed)
        self.rng_seed = rng_seed
        self._repeats = 0

    def __call__(self, c: Configuration) -> float:
        return self.evaluate(c)

    def evaluate(self, c: Configuration) -> float:
        """The objective of a valid configuration.

        Raises:
            InvalidConfigurationException: c is not in the valid set of the space
            UnknownConfigurationException: the cache holds no measurement for c
        """
        c = tuple(int(i) for i in c)
        if c in self.memo:
            objective = self.memo[c]
            self.trace.append(TraceEvent(self.spent_seconds, c, objective, fresh=False))
            self._repeats += 1
            return objective

        try:
            valid = self.space.is_valid(c)
        except (LengthMismatchException, OutOfRangeException):
            valid = False
        if not valid:
            raise InvalidConfigurationException(c)
        entry = self.cache.entry(c)
        if entry is None or not entry.valid:
            raise UnknownConfigurationException(c)

        self.spent_seconds += entry.eval_cost_seconds
        self.memo[c] = entry.objective
        self.trace.append(TraceEvent(self.spent_seconds, c, entry.objective, fresh=True))
        self._repeats = 0
        return entry.objective

    def is_memoized(self, c: Configuration) -> bool:
        return tuple(c) in self.memo

    @property
    def budget_spent_fraction(self) -> float:
        return self.spent_seconds / self.budget_seconds

    @property
    def exhausted(self) -> bool:
        """Every valid configuration has been evaluated"""
        return len(self.memo) >= self.space.constrained_size

    @property
    def stalled(self) -> bool:
        return self._repeats >= MAX_CONSECUTIVE_REPEATS

    @property
    def finished(self) -> bool:
        """Whether an optimizer should stop before starting another evaluation"""
        return self.budget_spent_fraction >= 1.0 or self.exhausted or self.stalled


def budget_spent_fraction(evaluator: BudgetedEvaluator) -> float:
    return evaluator.budget_spent_fraction
