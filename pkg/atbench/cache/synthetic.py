# Desk-scale synthetic tuning caches.
import numpy as np

import atbench
from atbench.cache.cachefile import CacheEntry, CacheMetadata, TuningCache
from atbench.constants import ObjectiveDirection, SYNTH_ENUMERATION_LIMIT, SynthKind
from atbench.exceptions import OutOfRangeException, TooLargeException
from atbench.space import enumerate_valid

# rugged caches mark roughly one in RUGGED_MODULUS configurations invalid
RUGGED_MODULUS = 10


def synth_cache(kind, dims: int, points_per_dim: int, seed: int) -> TuningCache:
    """Generate an exhaustive synthetic cache.

    Parameters are named ``p0 .. p{dims-1}`` and take the values ``0 .. points_per_dim-1``.

    bowl: objective ``1 + sum((idx - center)**2)`` with its unique optimum at the centre index vector.
    rugged: the bowl times seeded noise from [1, 3], with a generated constraint that invalidates about
      one in ten configurations.
    uniform_random: independent objective values from [1, 100].

    Evaluation costs are drawn from [0.5, 2.0] seconds. The same arguments always give the same cache.

    Raises:
        OutOfRangeException: dims < 1 or points_per_dim < 2
        TooLargeException: more than 10**7 combinations
    """
    kind = SynthKind(kind)
    if dims < 1:
        raise OutOfRangeException("dims", dims, ">= 1")
    if points_per_dim < 2:
        raise OutOfRangeException("points_per_dim", points_per_dim, ">= 2")
    cartesian_size = points_per_dim ** dims
    if cartesian_size > SYNTH_ENUMERATION_LIMIT:
        raise TooLargeException(cartesian_size, SYNTH_ENUMERATION_LIMIT)

    rng = np.random.default_rng(seed)
    names = [f"p{d}" for d in range(dims)]
    grid = np.indices((points_per_dim,) * dims).reshape(dims, -1).T

    constraints = []
    if kind is SynthKind.rugged:
        # p0 has coefficient 1 so at least two residues occur and the space is never empty
        coefficients = [1] + [int(c) for c in rng.integers(1, RUGGED_MODULUS, size=dims - 1)]
        residues = (grid @ np.array(coefficients)) % RUGGED_MODULUS
        forbidden = int(residues[rng.integers(cartesian_size)])
        weighted = " + ".join(f"{a} * {name}" for a, name in zip(coefficients, names))
        constraints.append(f"({weighted}) % {RUGGED_MODULUS} != {forbidden}")

    space = enumerate_valid({name: list(range(points_per_dim)) for name in names}, constraints)

    center = (points_per_dim - 1) // 2
    bowl = 1.0 + ((grid - center) ** 2).sum(axis=1)
    if kind is SynthKind.bowl:
        objectives = bowl
    elif kind is SynthKind.rugged:
        objectives = bowl * rng.uniform(1.0, 3.0, size=cartesian_size)
    else:
        objectives = rng.uniform(1.0, 100.0, size=cartesian_size)
    costs = rng.uniform(0.5, 2.0, size=cartesian_size)

    entries = {}
    for row, objective, cost in zip(grid.tolist(), objectives.tolist(), costs.tolist()):
        config = tuple(row)
        if space.is_valid(config):
            entries[config] = CacheEntry(config=config, valid=True, objective=objective, eval_cost_seconds=cost)
        else:
            entries[config] = CacheEntry(config=config, valid=False, objective=None, eval_cost_seconds=0.0)

    metadata = CacheMetadata(
        kernel_name=f"synthetic_{kind}",
        device_name="simulator",
        input_id=f"d{dims}_p{points_per_dim}_s{seed}",
        objective_name="time",
        objective_direction=ObjectiveDirection.min,
        objective_unit="ms",
    )
    atbench.logger.debug(f"generated {kind} cache with {space.constrained_size} valid configurations")
    return TuningCache(metadata, space, entries)
