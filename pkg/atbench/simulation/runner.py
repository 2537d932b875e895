from typing import Optional, Union

import numpy as np

import atbench
from atbench.constants import SEED_MASK, SEED_MIX
from atbench.optimizers import AlgorithmSpec, get_optimizer, parse_algorithm_spec
from atbench.simulation.evaluator import BudgetedEvaluator
from atbench.simulation.trace import Trace


def derive_run_seed(master_seed: int, run_id: int) -> int:
    """Seed of run ``run_id``: ``master_seed XOR (run_id * 0x9E3779B97F4A7C15)`` in 64-bit arithmetic"""
    return ((master_seed & SEED_MASK) ^ ((run_id * SEED_MIX) & SEED_MASK)) & SEED_MASK


def run_optimizer(algo: Union[str, AlgorithmSpec], cache, budget_seconds: float, seed: int, run_id: int = 0,
                  master_seed: Optional[int] = None, observer=None) -> Trace:
    """Run one optimizer on a cache until its budget is spent and return the trace of evaluations.

    Arguments:
        algo: a registered algorithm name, ``name,key=value,...`` text or an :class:`AlgorithmSpec`
        cache: the :class:`atbench.cache.TuningCache` to optimise on
        budget_seconds: simulated time available
        seed: seed of the optimizer's random generator
        run_id: index of the run, recorded in the trace
        master_seed: experiment seed recorded in the trace, defaults to seed
        observer: passed to the optimizer
    Raises:
        UnknownAlgorithmException, UnknownHyperparameterException
    """
    if not isinstance(algo, AlgorithmSpec):
        algo = parse_algorithm_spec(algo)
    optimizer = get_optimizer(algo.name, observer=observer, **dict(algo.hyperparameters))
    seed = seed & SEED_MASK
    evaluator = BudgetedEvaluator(cache, budget_seconds, run_id=run_id,
                                  master_seed=seed if master_seed is None else master_seed, rng_seed=seed)
    optimizer.run(evaluator, cache.space, np.random.default_rng(seed))
    atbench.logger.debug(f"{algo.label} run {run_id} on {cache.cache_id}: {len(evaluator.memo)} evaluations, "
                         f"{evaluator.budget_spent_fraction:.3f} of the budget")
    return evaluator.trace
