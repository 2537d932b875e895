import numpy as np

from atbench.optimizers.base import Optimizer
from atbench.space import Configuration, SearchSpace


class RandomSearch(Optimizer):
    """Uniform sampling of valid configurations without replacement"""
    name = "random_search"
    defaults = {}

    def run(self, evaluator, space: SearchSpace, rng: np.random.Generator) -> Configuration:
        best, best_objective = None, np.inf
        for row in rng.permutation(space.constrained_size):
            if evaluator.finished:
                break
            c = space.configuration(int(row))
            objective = evaluator(c)
            if objective < best_objective:
                best, best_objective = c, objective
        return best


def run_random_search(evaluator, space: SearchSpace, rng: np.random.Generator, observer=None) -> Configuration:
    return RandomSearch(observer=observer).run(evaluator, space, rng)
