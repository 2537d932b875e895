from typing import List

import numpy as np

import atbench
from atbench.optimizers.base import Optimizer
from atbench.optimizers.components import EliteHeap, History, NeighborhoodWeights, TabuList, knn_predict, \
    roulette_select, sa_accept
from atbench.space import Configuration, SearchSpace, crossover_uniform

# Tabu penalty while the history is too short to have an objective range
TABU_PENALTY_FALLBACK = 1e9

HYBRID_VNDX_DEFAULTS = {
    "k": 5,
    "pool_size": 8,
    "restart_after": 100,
    "tabu_size": 300,
    "elite_size": 5,
    "T0": 1.0,
    "cooling": 0.995,
}


@atbench.docstring_interpolate("defaults", ", ".join(f"{k}={v}" for k, v in HYBRID_VNDX_DEFAULTS.items()))
class HybridVNDX(Optimizer):
    """Variable neighbourhood descent with adaptive neighbourhood weights, a k-NN surrogate, a tabu list and
    elite recombination.

    Every iteration picks a neighbourhood kind by roulette over the weights and assembles a candidate pool:
    ``pool_size - 2`` neighbours of the current point, a repaired crossover child of two elites and random
    valid configurations to fill the pool. Candidates are scored by the k-NN prediction over the history
    plus a penalty for tabu membership, and only the best scoring candidate is evaluated. It replaces the
    current point under the Metropolis rule, which rewards (x1.1) or penalises (x0.9) the weight of the
    neighbourhood. The temperature cools geometrically and is reset on a restart from a random valid point
    after ``restart_after`` iterations without a new best.

    Hyperparameters (defaults): {defaults}
    """
    name = "hybrid_vndx"
    defaults = HYBRID_VNDX_DEFAULTS

    def validate(self):
        hp = self.hyperparameters
        atbench.check_positive_args(**hp)
        if hp["pool_size"] < 2:
            raise ValueError(f"pool_size must be at least 2, got {hp['pool_size']}")

    def _evaluate(self, evaluator, c: Configuration, history: History, elites: EliteHeap) -> float:
        fresh = not evaluator.is_memoized(c)
        objective = evaluator(c)
        if fresh:
            history.append(c, objective)
            elites.push(c, objective)
        return objective

    def _candidate_pool(self, space: SearchSpace, x: Configuration, kind, elites: EliteHeap,
                        rng: np.random.Generator) -> List[Configuration]:
        size = self.hyperparameters["pool_size"]
        neighbors = space.neighbors(x, kind)
        count = min(size - 2, len(neighbors))
        pool = []
        if count > 0:
            pool.extend(neighbors[int(i)] for i in rng.choice(len(neighbors), size=count, replace=False))
        if len(elites) >= 2:
            configs = elites.configs
            i, j = rng.choice(len(configs), size=2, replace=False)
            pool.append(space.repair(crossover_uniform(configs[int(i)], configs[int(j)], rng)))
        while len(pool) < size:
            pool.append(space.random_valid(rng))
        return pool

    def run(self, evaluator, space: SearchSpace, rng: np.random.Generator) -> Configuration:
        hp = self.hyperparameters
        history = History()
        elites = EliteHeap(hp["elite_size"])
        tabu = TabuList(hp["tabu_size"])
        weights = NeighborhoodWeights()

        x = space.random_valid(rng)
        fx = self._evaluate(evaluator, x, history, elites)
        best_objective = fx
        temperature = hp["T0"]
        iterations = 0
        stagnation = 0
        while not evaluator.finished:
            kind = roulette_select(weights, rng)
            pool = self._candidate_pool(space, x, kind, elites, rng)
            penalty = history.objective_range() if len(history) >= 2 else TABU_PENALTY_FALLBACK
            scores = [knn_predict(history, c, hp["k"]) + (penalty if c in tabu else 0.0) for c in pool]
            candidate = pool[int(np.argmin(scores))]

            fc = self._evaluate(evaluator, candidate, history, elites)
            accepted = sa_accept(fc - fx, temperature, rng)
            if accepted:
                x, fx = candidate, fc
                tabu.push(x)
                weights.reward(kind)
            else:
                weights.penalize(kind)
            temperature *= hp["cooling"]
            iterations += 1

            if fc < best_objective:
                best_objective = fc
                stagnation = 0
            else:
                stagnation += 1
            if self.observer is not None:
                self.notify("iteration", kind=kind, candidate=candidate, objective=fc, accepted=accepted,
                            weight=weights[kind], temperature=temperature, iterations=iterations,
                            tabu_length=len(tabu), elites=elites.entries, history=list(history.records))

            if stagnation >= hp["restart_after"] and not evaluator.finished:
                x = space.random_valid(rng)
                fx = self._evaluate(evaluator, x, history, elites)
                best_objective = min(best_objective, fx)
                temperature = hp["T0"]
                iterations = 0
                stagnation = 0
                atbench.logger.debug(f"{self.name}: restart at {evaluator.budget_spent_fraction:.3f} of the budget")
                self.notify("restart", config=x, temperature=temperature)

        best = history.best()
        return best[0] if best is not None else x


@atbench.docstring_interpolate("defaults", ", ".join(f"{k}={v}" for k, v in HYBRID_VNDX_DEFAULTS.items()))
def run_hybrid_vndx(evaluator, space: SearchSpace, rng: np.random.Generator, observer=None,
                    **hyperparameters) -> Configuration:
    """Run :class:`HybridVNDX` and return the best configuration it evaluated.

    Hyperparameters (defaults): {defaults}
    """
    return HybridVNDX(observer=observer, **hyperparameters).run(evaluator, space, rng)

