# Constrained discrete search spaces, fully enumerated.
import math
import threading
from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence, Tuple, Union

import numpy as np

import atbench
from atbench.constants import MAX_CARTESIAN_SIZE, NeighborhoodKind
from atbench.exceptions import EmptySpaceException, LengthMismatchException, OutOfRangeException, \
    TooLargeException
from atbench.space.constraints import ConstraintExpr, evaluate_all, parse_constraint

# A configuration is a tuple of domain indices, one per parameter in declaration order
Configuration = Tuple[int, ...]

# Flat Cartesian indices evaluated at once during enumeration
ENUMERATION_CHUNK = 1 << 20


def _value_key(value):
    """Key under which a parameter value is unique. True and 1 are different values, 2 and 2.0 are not."""
    if isinstance(value, (bool, np.bool_)):
        return "bool", bool(value)
    if isinstance(value, (int, float, np.integer, np.floating)):
        return "num", value
    return type(value).__name__, value


@dataclass(frozen=True)
class ParamDomain:
    """A tunable parameter and its ordered list of values. Index arithmetic on ``values`` defines adjacency."""
    name: str
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if not self.name or not isinstance(self.name, str):
            raise ValueError(f"parameter name must be a non-empty string, got {self.name!r}")
        if len(self.values) == 0:
            raise ValueError(f"parameter {self.name} has no values")
        keys = [_value_key(v) for v in self.values]
        if len(set(keys)) != len(keys):
            raise ValueError(f"parameter {self.name} has duplicate values")
        object.__setattr__(self, "_positions", {k: i for i, k in enumerate(keys)})

    def __len__(self):
        return len(self.values)

    def index_of(self, value) -> int:
        try:
            return self._positions[_value_key(value)]
        except (KeyError, TypeError):
            raise ValueError(f"{value!r} is not a value of parameter {self.name}")

    @property
    def value_type(self) -> str:
        if all(isinstance(v, bool) for v in self.values):
            return "bool"
        if all(isinstance(v, int) and not isinstance(v, bool) for v in self.values):
            return "int"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in self.values):
            return "real"
        if all(isinstance(v, str) for v in self.values):
            return "str"
        return "mixed"

    def column(self) -> np.ndarray:
        """The values as an array suitable for vectorised constraint evaluation"""
        value_type = self.value_type
        if value_type in ("int", "real"):
            return np.array(self.values, dtype=np.float64)
        if value_type == "bool":
            return np.array(self.values, dtype=bool)
        column = np.empty(len(self.values), dtype=object)
        column[:] = self.values
        return column


def as_domains(domains) -> List[ParamDomain]:
    """Accept ParamDomains, (name, values) pairs or a name -> values mapping"""
    if isinstance(domains, Mapping):
        return [ParamDomain(name, values) for name, values in domains.items()]
    result = []
    for domain in domains:
        if isinstance(domain, ParamDomain):
            result.append(domain)
        else:
            name, values = domain
            result.append(ParamDomain(name, values))
    return result


class SearchSpace:
    """All valid configurations of a set of parameter domains under a list of constraints.

    Build one with :func:`enumerate_valid`. The space is immutable after construction and may be shared
    between concurrent runs; neighbour queries are memoised behind a lock.
    """

    def __init__(self, domains: Sequence[ParamDomain], constraints: Sequence[ConstraintExpr], valid: np.ndarray):
        self.domains = tuple(domains)
        self.constraints = tuple(constraints)
        self.cartesian_size = math.prod(len(d) for d in self.domains)
        valid = np.asarray(valid, dtype=np.int64).reshape(-1, len(self.domains))
        valid.setflags(write=False)
        self._valid = valid
        self._valid_list = [tuple(row) for row in valid.tolist()]
        self._index = {c: i for i, c in enumerate(self._valid_list)}
        self._sizes = np.array([len(d) for d in self.domains], dtype=np.int64)
        self._columns = [d.column() for d in self.domains]
        self._neighbor_memo: Dict[Tuple[Configuration, NeighborhoodKind], Tuple[Configuration, ...]] = {}
        self._lock = threading.Lock()

    def __getstate__(self):
        state = self.__dict__.copy()
        del state["_lock"]
        state["_neighbor_memo"] = {}
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._lock = threading.Lock()

    def __repr__(self):
        return (f"SearchSpace(dims={self.dims}, cartesian_size={self.cartesian_size}, "
                f"constrained_size={self.constrained_size})")

    @property
    def dims(self) -> int:
        return len(self.domains)

    @property
    def constrained_size(self) -> int:
        return len(self._valid_list)

    @property
    def parameter_names(self) -> List[str]:
        return [d.name for d in self.domains]

    @property
    def valid_set(self) -> List[Configuration]:
        """The valid configurations, sorted lexicographically by index vector"""
        return list(self._valid_list)

    def configuration(self, row: int) -> Configuration:
        """The valid configuration at a row of :attr:`valid_set`"""
        return self._valid_list[row]

    def position(self, c: Configuration) -> int:
        """Row of a valid configuration in :attr:`valid_set`"""
        return self._index[tuple(c)]

    def check(self, c: Configuration):
        """Raise if c does not have one in-range index per parameter"""
        if len(c) != self.dims:
            raise LengthMismatchException(len(c), self.dims)
        for d, i in enumerate(c):
            if not 0 <= i < len(self.domains[d]):
                raise OutOfRangeException(f"index of {self.domains[d].name}", i,
                                          f"0 <= index < {len(self.domains[d])}")

    def is_valid(self, c: Configuration) -> bool:
        self.check(c)
        return tuple(c) in self._index

    def satisfies(self, c: Configuration) -> bool:
        """Evaluate the constraints on the values selected by c"""
        self.check(c)
        columns = [self.domains[d].values[i] for d, i in enumerate(c)]
        columns = [float(v) if isinstance(v, int) and not isinstance(v, bool) else v for v in columns]
        return bool(evaluate_all(self.constraints, columns))

    def values_of(self, c: Configuration) -> tuple:
        return tuple(self.domains[d].values[i] for d, i in enumerate(c))

    def config_of(self, values: Sequence) -> Configuration:
        if len(values) != self.dims:
            raise LengthMismatchException(len(values), self.dims)
        return tuple(domain.index_of(v) for domain, v in zip(self.domains, values))

    def neighbors(self, c: Configuration, kind: NeighborhoodKind) -> List[Configuration]:
        """Valid neighbours of c, c excluded, sorted lexicographically.

        Arguments:
            c: a configuration of this space
            kind: hamming (one parameter changed to any value), adjacent (every index within one step,
              at least one changed) or strictly_adjacent (one index changed by one step)
        """
        c = tuple(c)
        kind = NeighborhoodKind(kind)
        key = (c, kind)
        with self._lock:
            cached = self._neighbor_memo.get(key)
        if cached is None:
            cached = self._compute_neighbors(c, kind)
            with self._lock:
                self._neighbor_memo[key] = cached
        return list(cached)

    def _compute_neighbors(self, c: Configuration, kind: NeighborhoodKind) -> Tuple[Configuration, ...]:
        self.check(c)
        if kind is NeighborhoodKind.adjacent:
            delta = np.abs(self._valid - np.asarray(c, dtype=np.int64))
            mask = (delta.max(axis=1) <= 1) & (delta.sum(axis=1) > 0)
            return tuple(self._valid_list[i] for i in np.flatnonzero(mask))

        found = []
        for d, current in enumerate(c):
            if kind is NeighborhoodKind.hamming:
                candidates = range(len(self.domains[d]))
            else:
                candidates = (current - 1, current + 1)
            for i in candidates:
                if i == current or not 0 <= i < len(self.domains[d]):
                    continue
                neighbor = c[:d] + (i,) + c[d + 1:]
                if neighbor in self._index:
                    found.append(neighbor)
        return tuple(sorted(found))

    def random_valid(self, rng: np.random.Generator) -> Configuration:
        """A uniformly drawn valid configuration"""
        return self._valid_list[int(rng.integers(self.constrained_size))]

    def repair(self, c: Configuration) -> Configuration:
        """c itself if valid, else the nearest valid configuration by Hamming distance.
        Ties go to the lexicographically smallest index vector."""
        c = tuple(c)
        self.check(c)
        if c in self._index:
            return c
        distance = (self._valid != np.asarray(c, dtype=np.int64)).sum(axis=1)
        # rows are sorted, argmin returns the first, i.e. lexicographically smallest, minimum
        return self._valid_list[int(np.argmin(distance))]

    def random_step(self, c: Configuration, kind: NeighborhoodKind, rng: np.random.Generator) -> Configuration:
        """One raw index move of the given kind. c need not be valid and neither is the result."""
        c = tuple(c)
        movable = [d for d in range(self.dims) if len(self.domains[d]) > 1]
        if not movable:
            return c
        kind = NeighborhoodKind(kind)
        if kind is NeighborhoodKind.adjacent:
            low = np.maximum(np.asarray(c) - 1, 0)
            high = np.minimum(np.asarray(c) + 1, self._sizes - 1)
            step = tuple(int(v) for v in rng.integers(low, high + 1))
            if step != c:
                return step
            kind = NeighborhoodKind.strictly_adjacent

        d = movable[int(rng.integers(len(movable)))]
        size = len(self.domains[d])
        if kind is NeighborhoodKind.hamming:
            i = int(rng.integers(size - 1))
            if i >= c[d]:
                i += 1
        else:
            i = c[d] + (1 if rng.random() < 0.5 else -1)
            if not 0 <= i < size:
                i = c[d] - (i - c[d])
        return c[:d] + (i,) + c[d + 1:]


def enumerate_valid(domains, constraints: Sequence[Union[str, ConstraintExpr]] = ()) -> SearchSpace:
    """Enumerate every combination of parameter values that satisfies all constraints.

    Arguments:
        domains: ParamDomains, (name, values) pairs, or a mapping of parameter name to values
        constraints: constraint expressions, as text or already parsed
    Returns:
        The :class:`SearchSpace` with its lexicographically sorted valid set.
    Raises:
        EmptySpaceException: no combination satisfies the constraints
    """
    domains = as_domains(domains)
    if not domains:
        raise ValueError("a search space needs at least one parameter")
    names = [d.name for d in domains]
    if len(set(names)) != len(names):
        raise ValueError("parameter names must be unique")
    parsed = [c if isinstance(c, ConstraintExpr) else parse_constraint(c, domains) for c in constraints]

    shape = tuple(len(d) for d in domains)
    cartesian_size = math.prod(shape)
    if cartesian_size > MAX_CARTESIAN_SIZE:
        raise TooLargeException(cartesian_size, MAX_CARTESIAN_SIZE)

    columns = [d.column() for d in domains]
    valid_chunks = []
    for start in range(0, cartesian_size, ENUMERATION_CHUNK):
        flat = np.arange(start, min(start + ENUMERATION_CHUNK, cartesian_size), dtype=np.int64)
        indices = np.unravel_index(flat, shape)
        if parsed:
            mask = np.broadcast_to(
                evaluate_all(parsed, [column[idx] for column, idx in zip(columns, indices)]), flat.shape)
            indices = [idx[mask] for idx in indices]
        valid_chunks.append(np.stack(indices, axis=1))

    valid = np.concatenate(valid_chunks) if valid_chunks else np.empty((0, len(domains)), dtype=np.int64)
    if len(valid) == 0:
        raise EmptySpaceException(cartesian_size)
    atbench.logger.debug(f"enumerated {len(valid)} valid of {cartesian_size} configurations")
    return SearchSpace(domains, parsed, valid)


def hamming_distance(a: Configuration, b: Configuration) -> int:
    if len(a) != len(b):
        raise LengthMismatchException(len(a), len(b))
    return sum(1 for x, y in zip(a, b) if x != y)


def crossover_uniform(a: Configuration, b: Configuration, rng: np.random.Generator) -> Configuration:
    """Child taking each position from a or b with equal probability. The caller repairs it."""
    if len(a) != len(b):
        raise LengthMismatchException(len(a), len(b))
    take_a = rng.random(len(a)) < 0.5
    return tuple(int(x) if pick else int(y) for x, y, pick in zip(a, b, take_a))
