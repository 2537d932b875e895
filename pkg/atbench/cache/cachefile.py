# Reading and writing exhaustive tuning caches.
import json
import math
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

import atbench
from atbench.cache.stats import space_stats
from atbench.constants import ObjectiveDirection, SCHEMA_VERSION
from atbench.exceptions import ConstraintMismatchException, DuplicateEntryException, FormatException, \
    LengthMismatchException, MissingEntryException, SchemaVersionMismatchException
from atbench.space import Configuration, SearchSpace, enumerate_valid


@dataclass(frozen=True)
class CacheMetadata:
    kernel_name: str
    device_name: str
    input_id: str
    objective_name: str
    objective_direction: ObjectiveDirection
    objective_unit: str

    @property
    def cache_id(self) -> str:
        return f"{self.kernel_name}/{self.device_name}/{self.input_id}"


@dataclass(frozen=True)
class CacheEntry:
    """One measured configuration. ``objective`` is stored minimisation-normalised: caches whose objective is
    maximised hold negated values."""
    config: Configuration
    valid: bool
    objective: Optional[float]
    eval_cost_seconds: float


class TuningCache:
    """Exhaustive measurements of one (kernel, device, input) search space.

    Arguments:
        metadata: what was measured, and on what
        space: the search space the configurations belong to
        entries: measurement per configuration; every valid configuration must be present
    Raises:
        MissingEntryException: a valid configuration of the space has no measurement
    """

    def __init__(self, metadata: CacheMetadata, space: SearchSpace, entries: Dict[Configuration, CacheEntry]):
        self.metadata = metadata
        self.space = space
        self.entries = dict(entries)

        objectives = np.empty(space.constrained_size, dtype=np.float64)
        costs = np.empty(space.constrained_size, dtype=np.float64)
        for row, config in enumerate(space.valid_set):
            entry = self.entries.get(config)
            if entry is None or not entry.valid:
                raise MissingEntryException(_describe(space, config))
            objectives[row] = entry.objective
            costs[row] = entry.eval_cost_seconds
        objectives.setflags(write=False)
        costs.setflags(write=False)
        # aligned with space.valid_set
        self.objectives = objectives
        self.costs = costs

        self.stats = space_stats(self)

    def __repr__(self):
        return f"TuningCache({self.cache_id}, {self.space!r})"

    @property
    def cache_id(self) -> str:
        return self.metadata.cache_id

    def entry(self, config: Configuration) -> Optional[CacheEntry]:
        return self.entries.get(tuple(config))


def _describe(space: SearchSpace, config: Configuration) -> str:
    return "{" + ", ".join(f"{name}={value!r}" for name, value in
                           zip(space.parameter_names, space.values_of(config))) + "}"


def _require(mapping, key, kind, where):
    if not isinstance(mapping, dict) or key not in mapping:
        raise FormatException(f"missing '{key}' in {where}")
    value = mapping[key]
    if not isinstance(value, kind) or (isinstance(value, bool) and kind is not bool):
        raise FormatException(f"'{key}' in {where} has the wrong type")
    return value


def _read_metadata(doc) -> CacheMetadata:
    metadata = _require(doc, "metadata", dict, "cache")
    objective = _require(metadata, "objective", dict, "metadata")
    direction = _require(objective, "direction", str, "metadata.objective")
    try:
        direction = ObjectiveDirection(direction)
    except ValueError:
        raise FormatException(f"objective direction '{direction}' is not 'min' or 'max'")
    return CacheMetadata(
        kernel_name=_require(metadata, "kernel_name", str, "metadata"),
        device_name=_require(metadata, "device_name", str, "metadata"),
        input_id=_require(metadata, "input_id", str, "metadata"),
        objective_name=_require(objective, "name", str, "metadata.objective"),
        objective_direction=direction,
        objective_unit=_require(objective, "unit", str, "metadata.objective"),
    )


def _read_space(doc) -> SearchSpace:
    parameters = _require(doc, "parameters", list, "cache")
    domains = []
    for i, parameter in enumerate(parameters):
        name = _require(parameter, "name", str, f"parameters[{i}]")
        values = _require(parameter, "values", list, f"parameters[{i}]")
        domains.append((name, values))
    constraints = _require(doc, "constraints", list, "cache")
    if not all(isinstance(c, str) for c in constraints):
        raise FormatException("constraints must be a list of strings")
    try:
        return enumerate_valid(domains, constraints)
    except ValueError as e:
        raise FormatException(str(e))


def _read_entries(doc, space: SearchSpace, direction: ObjectiveDirection) -> Dict[Configuration, CacheEntry]:
    sign = -1.0 if direction is ObjectiveDirection.max else 1.0
    entries = {}
    for i, record in enumerate(_require(doc, "entries", list, "cache")):
        where = f"entries[{i}]"
        values = _require(record, "config", list, where)
        valid = _require(record, "valid", bool, where)
        cost = _require(record, "eval_cost_seconds", (int, float), where)
        objective = record.get("objective") if isinstance(record, dict) else None
        try:
            config = space.config_of(values)
        except (ValueError, LengthMismatchException) as e:
            raise FormatException(f"{where}: {e}")
        if config in entries:
            raise DuplicateEntryException(_describe(space, config))

        if valid:
            if isinstance(objective, bool) or not isinstance(objective, (int, float)) or not math.isfinite(objective):
                raise FormatException(f"{where} is valid but has no finite objective")
            if not cost > 0:
                raise FormatException(f"{where} is valid but has a non-positive evaluation cost")
            objective = sign * float(objective)
        else:
            if objective is not None:
                raise FormatException(f"{where} is invalid but has an objective")
            if cost < 0:
                raise FormatException(f"{where} has a negative evaluation cost")

        if valid != space.is_valid(config):
            raise ConstraintMismatchException(_describe(space, config), valid)
        entries[config] = CacheEntry(config=config, valid=valid, objective=objective, eval_cost_seconds=float(cost))
    return entries


def load_cache(path) -> TuningCache:
    """Load, check and index a cache file.

    Arguments:
        path: location of a UTF-8 JSON cache file
    Returns:
        The :class:`TuningCache`. Objectives of maximisation caches are negated so that all downstream
        computations minimise.
    Raises:
        FormatException, SchemaVersionMismatchException, DuplicateEntryException, MissingEntryException,
        ConstraintMismatchException
    """
    try:
        with open(path, encoding="utf-8") as fp:
            doc = json.load(fp)
    except json.JSONDecodeError as e:
        raise FormatException(f"not valid JSON ({e})")
    except UnicodeDecodeError as e:
        raise FormatException(f"not UTF-8 ({e})")
    if not isinstance(doc, dict):
        raise FormatException("top level is not an object")

    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionMismatchException(version, SCHEMA_VERSION)

    metadata = _read_metadata(doc)
    space = _read_space(doc)
    entries = _read_entries(doc, space, metadata.objective_direction)
    cache = TuningCache(metadata, space, entries)
    atbench.logger.info(f"loaded cache {cache.cache_id} from {path}: cartesian={space.cartesian_size} "
                        f"constrained={space.constrained_size} dims={space.dims}")
    return cache


def cache_document(cache: TuningCache) -> dict:
    sign = -1.0 if cache.metadata.objective_direction is ObjectiveDirection.max else 1.0
    space = cache.space
    metadata = cache.metadata
    entries = []
    for config in sorted(cache.entries):
        entry = cache.entries[config]
        entries.append({
            "config": list(space.values_of(config)),
            "valid": entry.valid,
            "objective": sign * entry.objective if entry.valid else None,
            "eval_cost_seconds": entry.eval_cost_seconds,
        })
    return {
        "schema_version": SCHEMA_VERSION,
        "metadata": {
            "kernel_name": metadata.kernel_name,
            "device_name": metadata.device_name,
            "input_id": metadata.input_id,
            "objective": {
                "name": metadata.objective_name,
                "direction": str(metadata.objective_direction),
                "unit": metadata.objective_unit,
            },
        },
        "parameters": [{"name": d.name, "values": list(d.values)} for d in space.domains],
        "constraints": [c.source for c in space.constraints],
        "entries": entries,
    }


def write_cache(cache: TuningCache, path):
    """Write a cache file, entries sorted by configuration index vector"""
    with open(path, "w", encoding="utf-8") as fp:
        json.dump(cache_document(cache), fp, indent=1)
        fp.write("\n")
    atbench.logger.info(f"wrote cache {cache.cache_id} to {path}")
