from typing import List

import numpy as np

import atbench
from atbench.optimizers.base import Optimizer
from atbench.space import Configuration, SearchSpace, crossover_uniform


class GeneticAlgorithm(Optimizer):
    """Generational GA with tournament selection, uniform crossover, per-gene mutation and elitism.
    Every child is repaired to the nearest valid configuration before it is evaluated."""
    name = "genetic_algorithm"
    defaults = {"population_size": 20, "tournament_size": 2, "crossover_rate": 0.9, "mutation_rate": 0.1,
                "elitism": 2}

    def validate(self):
        hp = self.hyperparameters
        atbench.check_positive_args(population_size=hp["population_size"], tournament_size=hp["tournament_size"])
        if not 0 <= hp["elitism"] < hp["population_size"]:
            raise ValueError(f"elitism must be in [0, population_size), got {hp['elitism']}")
        for rate in ("crossover_rate", "mutation_rate"):
            if not 0 <= hp[rate] <= 1:
                raise ValueError(f"{rate} must be in [0, 1], got {hp[rate]}")

    def _tournament(self, population: List[Configuration], fitness: List[float],
                    rng: np.random.Generator) -> Configuration:
        contestants = rng.integers(len(population), size=self.hyperparameters["tournament_size"])
        winner = min(contestants.tolist(), key=lambda i: (fitness[i], i))
        return population[winner]

    def _mutate(self, c: Configuration, space: SearchSpace, rng: np.random.Generator) -> Configuration:
        genes = list(c)
        for d in np.flatnonzero(rng.random(space.dims) < self.hyperparameters["mutation_rate"]):
            genes[d] = int(rng.integers(len(space.domains[d])))
        return tuple(genes)

    def run(self, evaluator, space: SearchSpace, rng: np.random.Generator) -> Configuration:
        hp = self.hyperparameters
        population, fitness = [], []
        best, best_objective = None, np.inf
        for _ in range(hp["population_size"]):
            if evaluator.finished:
                break
            c = space.random_valid(rng)
            population.append(c)
            fitness.append(evaluator(c))
            if fitness[-1] < best_objective:
                best, best_objective = c, fitness[-1]

        generation = 0
        while not evaluator.finished:
            ranked = sorted(range(len(population)), key=lambda i: (fitness[i], i))
            next_population = [population[i] for i in ranked[:hp["elitism"]]]
            next_fitness = [fitness[i] for i in ranked[:hp["elitism"]]]
            while len(next_population) < hp["population_size"] and not evaluator.finished:
                parent = self._tournament(population, fitness, rng)
                other = self._tournament(population, fitness, rng)
                child = crossover_uniform(parent, other, rng) if rng.random() < hp["crossover_rate"] else parent
                child = space.repair(self._mutate(child, space, rng))
                next_population.append(child)
                next_fitness.append(evaluator(child))
                if next_fitness[-1] < best_objective:
                    best, best_objective = child, next_fitness[-1]
            population, fitness = next_population, next_fitness
            generation += 1
            self.notify("generation", generation=generation, population=list(population), fitness=list(fitness))

        return best


def run_genetic_algorithm(evaluator, space: SearchSpace, rng: np.random.Generator, observer=None,
                          **hyperparameters) -> Configuration:
    return GeneticAlgorithm(observer=observer, **hyperparameters).run(evaluator, space, rng)
