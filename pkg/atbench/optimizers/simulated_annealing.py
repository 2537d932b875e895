import numpy as np

import atbench
from atbench.constants import NeighborhoodKind
from atbench.optimizers.base import Optimizer
from atbench.optimizers.components import sa_accept
from atbench.space import Configuration, SearchSpace


class SimulatedAnnealing(Optimizer):
    """Single-state annealer over Hamming neighbours.

    The objective difference of a move is divided by the range of objectives observed so far, which makes
    the temperature scale free. After ``restart_after`` steps without a new best the search restarts from a
    random valid configuration at the initial temperature.
    """
    name = "simulated_annealing"
    defaults = {"T0": 1.0, "cooling": 0.995, "restart_after": 150}

    def validate(self):
        atbench.check_positive_args(T0=self.hyperparameters["T0"], cooling=self.hyperparameters["cooling"],
                                    restart_after=self.hyperparameters["restart_after"])

    def run(self, evaluator, space: SearchSpace, rng: np.random.Generator) -> Configuration:
        T0 = self.hyperparameters["T0"]
        cooling = self.hyperparameters["cooling"]
        restart_after = self.hyperparameters["restart_after"]

        x = space.random_valid(rng)
        fx = evaluator(x)
        best, best_objective = x, fx
        lowest = highest = fx
        temperature = T0
        stagnation = 0
        while not evaluator.finished:
            neighbors = space.neighbors(x, NeighborhoodKind.hamming)
            if not neighbors:
                x = space.random_valid(rng)
                fx = evaluator(x)
                if fx < best_objective:
                    best, best_objective = x, fx
                continue

            y = neighbors[int(rng.integers(len(neighbors)))]
            fy = evaluator(y)
            lowest, highest = min(lowest, fy), max(highest, fy)
            span = highest - lowest
            delta = (fy - fx) / span if span > 0 else fy - fx
            accepted = sa_accept(delta, temperature, rng)
            if accepted:
                x, fx = y, fy
            temperature *= cooling

            if fy < best_objective:
                best, best_objective = y, fy
                stagnation = 0
            else:
                stagnation += 1
            self.notify("iteration", candidate=y, objective=fy, accepted=accepted, temperature=temperature)

            if stagnation >= restart_after and not evaluator.finished:
                x = space.random_valid(rng)
                fx = evaluator(x)
                lowest, highest = min(lowest, fx), max(highest, fx)
                if fx < best_objective:
                    best, best_objective = x, fx
                temperature = T0
                stagnation = 0
                atbench.logger.debug(f"{self.name}: restart at {evaluator.budget_spent_fraction:.3f} of the budget")
                self.notify("restart", config=x)
        return best


def run_simulated_annealing(evaluator, space: SearchSpace, rng: np.random.Generator, observer=None,
                            **hyperparameters) -> Configuration:
    return SimulatedAnnealing(observer=observer, **hyperparameters).run(evaluator, space, rng)
