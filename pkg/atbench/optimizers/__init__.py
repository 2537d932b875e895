from dataclasses import dataclass
from typing import Dict, Tuple, Type

from atbench.exceptions import UnknownAlgorithmException, UnknownHyperparameterException
from atbench.optimizers.adaptive_tabu_grey_wolf import AdaptiveTabuGreyWolf, run_adaptive_tabu_grey_wolf
from atbench.optimizers.base import Optimizer, coerce_hyperparameter
from atbench.optimizers.components import EliteHeap, History, NeighborhoodWeights, TabuList, knn_predict, \
    roulette_select, sa_accept
from atbench.optimizers.genetic_algorithm import GeneticAlgorithm, run_genetic_algorithm
from atbench.optimizers.hybrid_vndx import HybridVNDX, run_hybrid_vndx
from atbench.optimizers.random_search import RandomSearch, run_random_search
from atbench.optimizers.simulated_annealing import SimulatedAnnealing, run_simulated_annealing

ALGORITHMS: Dict[str, Type[Optimizer]] = {
    cls.name: cls for cls in (RandomSearch, SimulatedAnnealing, GeneticAlgorithm, HybridVNDX, AdaptiveTabuGreyWolf)
}


@dataclass(frozen=True)
class AlgorithmSpec:
    """An algorithm name with hyperparameter overrides, as written on the command line: ``name,key=value,...``"""
    name: str
    hyperparameters: Tuple[Tuple[str, object], ...] = ()

    @property
    def label(self) -> str:
        return ",".join([self.name] + [f"{k}={v}" for k, v in self.hyperparameters])

    def __str__(self):
        return self.label


def get_optimizer(name: str, observer=None, **hyperparameters) -> Optimizer:
    """Instantiate a registered optimizer.

    Raises:
        UnknownAlgorithmException: name is not in :data:`ALGORITHMS`
        UnknownHyperparameterException: a hyperparameter the algorithm does not have
    """
    if name not in ALGORITHMS:
        raise UnknownAlgorithmException(name)
    return ALGORITHMS[name](observer=observer, **hyperparameters)


def parse_algorithm_spec(text: str) -> AlgorithmSpec:
    """Parse ``name[,key=value...]``. Values are converted to the type of the hyperparameter's default.

    Raises:
        UnknownAlgorithmException, UnknownHyperparameterException, ValueError
    """
    name, *assignments = [part.strip() for part in text.split(",")]
    if name not in ALGORITHMS:
        raise UnknownAlgorithmException(name)
    defaults = ALGORITHMS[name].defaults
    overrides = []
    for assignment in assignments:
        key, sep, value = assignment.partition("=")
        key = key.strip()
        if not sep:
            raise ValueError(f"expected key=value in algorithm '{text}', got '{assignment}'")
        if key not in defaults:
            raise UnknownHyperparameterException(name, key)
        overrides.append((key, coerce_hyperparameter(name, key, defaults[key], value.strip())))
    return AlgorithmSpec(name, tuple(overrides))
