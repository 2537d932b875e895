import math
from typing import List

import numpy as np

import atbench
from atbench.constants import NeighborhoodKind
from atbench.optimizers.base import Optimizer
from atbench.optimizers.components import TabuList, sa_accept
from atbench.space import Configuration, SearchSpace

ADAPTIVE_TABU_GREY_WOLF_DEFAULTS = {
    "population_size": 8,
    "tabu_length": None,
    "shake_rate": 0.2,
    "jump_rate": 0.15,
    "stagnation_limit": 80,
    "restart_ratio": 0.3,
    "T0": 1.0,
    "decay": 5.0,
    "T_min": 1e-4,
    "reheat_max": 8.0,
    "tabu_retries": 10,
}


def neighborhood_schedule(budget_fraction: float) -> NeighborhoodKind:
    """Coarse moves early, strict moves late, in equal thirds of the budget"""
    if budget_fraction < 1 / 3:
        return NeighborhoodKind.hamming
    if budget_fraction < 2 / 3:
        return NeighborhoodKind.adjacent
    return NeighborhoodKind.strictly_adjacent


def annealing_temperature(budget_fraction: float, reheat: float, T0: float, decay: float, T_min: float) -> float:
    return max(T_min, reheat * T0 * math.exp(-decay * budget_fraction))


@atbench.docstring_interpolate("defaults", ", ".join(f"{k}={v}" for k, v in ADAPTIVE_TABU_GREY_WOLF_DEFAULTS.items()))
class AdaptiveTabuGreyWolf(Optimizer):
    """Grey wolf style population search over valid configurations with tabu memory and annealed acceptance.

    Each generation sorts the population and takes the three best as leaders. Every other member proposes a
    configuration mixing, per parameter, its own index with those of the leaders. With probability
    ``shake_rate`` the proposal is shaken: with probability ``jump_rate`` one coordinate is copied from a
    random valid configuration, otherwise it makes a move in the neighbourhood the budget schedule
    prescribes. Invalid proposals are repaired and tabu ones resampled before evaluation. Worse proposals are
    accepted with temperature ``max(T_min, reheat * T0 * exp(-decay * b))``, b the spent budget fraction.
    After ``stagnation_limit`` generations without a new best the worst ``floor(restart_ratio *
    population_size)`` members are replaced by random ones and the reheat factor doubles, up to
    ``reheat_max``. It returns to 1 on every new best.

    ``tabu_length`` defaults to three times the population size.

    Hyperparameters (defaults): {defaults}
    """
    name = "adaptive_tabu_grey_wolf"
    defaults = ADAPTIVE_TABU_GREY_WOLF_DEFAULTS

    def validate(self):
        hp = self.hyperparameters
        if hp["population_size"] < 4:
            raise ValueError(f"population_size must be at least 4 (three leaders and one follower), "
                             f"got {hp['population_size']}")
        if hp["tabu_length"] is None:
            hp["tabu_length"] = 3 * hp["population_size"]
        atbench.check_positive_args(tabu_length=hp["tabu_length"], stagnation_limit=hp["stagnation_limit"],
                                    T0=hp["T0"], T_min=hp["T_min"], reheat_max=hp["reheat_max"])
        for rate in ("shake_rate", "jump_rate", "restart_ratio"):
            if not 0 <= hp[rate] <= 1:
                raise ValueError(f"{rate} must be in [0, 1], got {hp[rate]}")
        if hp["decay"] < 0 or hp["tabu_retries"] < 0:
            raise ValueError("decay and tabu_retries must not be negative")

    def _propose(self, space: SearchSpace, leaders: List[Configuration], x: Configuration, budget_fraction: float,
                 rng: np.random.Generator) -> Configuration:
        hp = self.hyperparameters
        sources = (leaders[0], leaders[1], leaders[2], x)
        picks = rng.integers(len(sources), size=space.dims)
        y = tuple(sources[int(pick)][d] for d, pick in enumerate(picks))
        self.notify("proposal", proposal=y, leaders=tuple(leaders), individual=x)

        if rng.random() < hp["shake_rate"]:
            if rng.random() < hp["jump_rate"]:
                donor = space.random_valid(rng)
                d = int(rng.integers(space.dims))
                y = y[:d] + (donor[d],) + y[d + 1:]
            else:
                kind = neighborhood_schedule(budget_fraction)
                neighbors = space.neighbors(y, kind) if space.is_valid(y) else []
                if neighbors:
                    y = neighbors[int(rng.integers(len(neighbors)))]
                else:
                    y = space.random_step(y, kind, rng)
        return space.repair(y)

    def _avoid_tabu(self, space: SearchSpace, y: Configuration, tabu: TabuList,
                    rng: np.random.Generator) -> Configuration:
        # after tabu_retries the point is kept and becomes a memoised repeat
        for _ in range(self.hyperparameters["tabu_retries"]):
            if y not in tabu:
                break
            neighbors = [n for n in space.neighbors(y, NeighborhoodKind.hamming) if n not in tabu]
            y = neighbors[int(rng.integers(len(neighbors)))] if neighbors else space.random_valid(rng)
        return y

    def run(self, evaluator, space: SearchSpace, rng: np.random.Generator) -> Configuration:
        hp = self.hyperparameters
        p = hp["population_size"]
        tabu = TabuList(hp["tabu_length"])

        population, fitness = [], []
        best, best_objective = None, np.inf
        for _ in range(p):
            if evaluator.finished:
                return best
            c = space.random_valid(rng)
            population.append(c)
            fitness.append(evaluator(c))
            if fitness[-1] < best_objective:
                best, best_objective = c, fitness[-1]

        reheat = 1.0
        stagnation = 0
        while not evaluator.finished:
            order = sorted(range(p), key=lambda i: (fitness[i], i))
            population = [population[i] for i in order]
            fitness = [fitness[i] for i in order]
            leaders = population[:3]
            self.notify("generation", population=list(population), fitness=list(fitness), leaders=list(leaders))

            improved = False
            for i in range(3, p):
                if evaluator.finished:
                    break
                x, fx = population[i], fitness[i]
                budget_fraction = evaluator.budget_spent_fraction
                y = self._propose(space, leaders, x, budget_fraction, rng)
                y = self._avoid_tabu(space, y, tabu, rng)
                fy = evaluator(y)

                delta = fy - fx
                temperature = annealing_temperature(budget_fraction, reheat, hp["T0"], hp["decay"], hp["T_min"])
                accepted = sa_accept(delta, temperature, rng)
                if accepted:
                    population[i], fitness[i] = y, fy
                    tabu.push(y)
                new_best = fy < best_objective
                if new_best:
                    best, best_objective = y, fy
                    reheat = 1.0
                    improved = True
                self.notify("acceptance", temperature=temperature, budget_fraction=budget_fraction, reheat=reheat,
                            delta=delta, accepted=accepted, new_best=new_best)

            if improved:
                stagnation = 0
            else:
                stagnation += 1

            if stagnation >= hp["stagnation_limit"]:
                count = int(math.floor(hp["restart_ratio"] * p))
                worst = sorted(range(p), key=lambda i: (fitness[i], i))[p - count:]
                reheat = min(2 * reheat, hp["reheat_max"])
                improved = False
                for i in worst:
                    if evaluator.finished:
                        break
                    population[i] = space.random_valid(rng)
                    fitness[i] = evaluator(population[i])
                    if fitness[i] < best_objective:
                        best, best_objective = population[i], fitness[i]
                        reheat = 1.0
                        improved = True
                stagnation = 0
                atbench.logger.debug(f"{self.name}: reinitialised {count} members, reheat {reheat}")
                self.notify("reinit", count=count, reheat=reheat, improved=improved)
        return best


@atbench.docstring_interpolate("defaults", ", ".join(f"{k}={v}" for k, v in ADAPTIVE_TABU_GREY_WOLF_DEFAULTS.items()))
def run_adaptive_tabu_grey_wolf(evaluator, space: SearchSpace, rng: np.random.Generator, observer=None,
                                **hyperparameters) -> Configuration:
    """Run :class:`AdaptiveTabuGreyWolf` and return the best configuration it evaluated.

    Hyperparameters (defaults): {defaults}
    """
    return AdaptiveTabuGreyWolf(observer=observer, **hyperparameters).run(evaluator, space, rng)
