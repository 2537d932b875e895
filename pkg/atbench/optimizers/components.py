# Building blocks shared by the optimizers.
import heapq
import itertools
import math
from collections import Counter, deque
from typing import Dict, List, Optional, Tuple

import numpy as np

from atbench.constants import NeighborhoodKind
from atbench.space import Configuration

WEIGHT_MIN = 0.05
WEIGHT_MAX = 20.0


class TabuList:
    """Bounded FIFO of configurations; the oldest entry is evicted first"""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError(f"tabu capacity must be positive, got {capacity}")
        self.capacity = capacity
        self._entries = deque()
        self._counts = Counter()

    def push(self, c: Configuration):
        c = tuple(c)
        if len(self._entries) == self.capacity:
            evicted = self._entries.popleft()
            self._counts[evicted] -= 1
            if not self._counts[evicted]:
                del self._counts[evicted]
        self._entries.append(c)
        self._counts[c] += 1

    def __contains__(self, c) -> bool:
        return tuple(c) in self._counts

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)


class EliteHeap:
    """The k lowest-objective distinct configurations pushed so far.
    Among equal objectives the earlier pushed configuration ranks better."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError(f"elite capacity must be positive, got {capacity}")
        self.capacity = capacity
        # max-heap on (objective, insertion) through negation
        self._heap: List[Tuple[float, int, Configuration]] = []
        self._members = set()
        self._counter = itertools.count()

    def push(self, c: Configuration, objective: float) -> bool:
        """Offer a configuration. Returns whether it entered the elites."""
        c = tuple(c)
        if c in self._members:
            return False
        order = next(self._counter)
        if len(self._heap) < self.capacity:
            heapq.heappush(self._heap, (-objective, -order, c))
            self._members.add(c)
            return True
        worst_objective, worst_order, worst = self._heap[0]
        if (objective, order) < (-worst_objective, -worst_order):
            heapq.heapreplace(self._heap, (-objective, -order, c))
            self._members.discard(worst)
            self._members.add(c)
            return True
        return False

    def __len__(self):
        return len(self._heap)

    def __contains__(self, c) -> bool:
        return tuple(c) in self._members

    @property
    def entries(self) -> List[Tuple[Configuration, float]]:
        """(configuration, objective) from best to worst"""
        ranked = sorted((-objective, -order, c) for objective, order, c in self._heap)
        return [(c, objective) for objective, _, c in ranked]

    @property
    def configs(self) -> List[Configuration]:
        return [c for c, _ in self.entries]


class History:
    """Insertion-ordered record of fresh evaluations"""

    def __init__(self):
        self.records: List[Tuple[Configuration, float]] = []
        self._arrays = None

    def append(self, c: Configuration, objective: float):
        self.records.append((tuple(c), float(objective)))
        self._arrays = None

    def __len__(self):
        return len(self.records)

    def arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        """(configurations, objectives) as arrays, in insertion order"""
        if self._arrays is None:
            configs = np.array([c for c, _ in self.records], dtype=np.int64)
            objectives = np.array([f for _, f in self.records], dtype=np.float64)
            self._arrays = configs, objectives
        return self._arrays

    def objective_range(self) -> float:
        _, objectives = self.arrays()
        return float(objectives.max() - objectives.min())

    def best(self) -> Optional[Tuple[Configuration, float]]:
        """Lowest objective record, the earliest among equals"""
        if not self.records:
            return None
        _, objectives = self.arrays()
        return self.records[int(np.argmin(objectives))]


class NeighborhoodWeights:
    """Selection weight per neighborhood kind, starting at 1 and clamped to [w_min, w_max]"""

    def __init__(self, w_min: float = WEIGHT_MIN, w_max: float = WEIGHT_MAX):
        if not 0 < w_min <= 1 <= w_max:
            raise ValueError(f"weight bounds must satisfy 0 < w_min <= 1 <= w_max, got [{w_min}, {w_max}]")
        self.w_min = w_min
        self.w_max = w_max
        self.w: Dict[NeighborhoodKind, float] = {kind: 1.0 for kind in NeighborhoodKind}

    def __getitem__(self, kind) -> float:
        return self.w[NeighborhoodKind(kind)]

    def __setitem__(self, kind, value: float):
        self.w[NeighborhoodKind(kind)] = min(self.w_max, max(self.w_min, value))

    def scale(self, kind, factor: float):
        self[kind] = self[kind] * factor

    def reward(self, kind):
        self.scale(kind, 1.1)

    def penalize(self, kind):
        self.scale(kind, 0.9)


def knn_predict(history: History, query: Configuration, k: int) -> float:
    """Mean objective of the k records nearest to query in Hamming distance.

    Ties at the cutoff distance go to earlier records. With fewer than k records all are averaged; an empty
    history predicts 0.
    """
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if not len(history):
        return 0.0
    configs, objectives = history.arrays()
    distance = (configs != np.asarray(query, dtype=np.int64)).sum(axis=1)
    nearest = np.argsort(distance, kind="stable")[:k]
    return float(objectives[nearest].mean())


def sa_accept(delta: float, temperature: float, rng: np.random.Generator) -> bool:
    """Metropolis acceptance. Improvements and ties are accepted without drawing from rng."""
    if not temperature > 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    if delta <= 0:
        return True
    return bool(rng.random() < math.exp(-delta / temperature))


def roulette_select(weights: NeighborhoodWeights, rng: np.random.Generator) -> NeighborhoodKind:
    """A neighborhood kind drawn with probability proportional to its weight"""
    kinds = list(NeighborhoodKind)
    cumulative = np.cumsum([weights[kind] for kind in kinds])
    i = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right"))
    return kinds[min(i, len(kinds) - 1)]
