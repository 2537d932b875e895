from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np

# Basic characteristics of the four real-world GPU applications commonly used as tuning benchmarks:
# name -> (Cartesian size, constrained size, dimensions)
REFERENCE_SPACES = {
    "dedispersion": (22272, 11130, 8),
    "convolution": (10240, 4362, 10),
    "hotspot": (22200000, 349853, 11),
    "gemm": (663552, 116928, 17),
}


@dataclass(frozen=True)
class SpaceStats:
    """Characteristics of the (minimisation-normalised) objective values of a cache"""
    optimum: float
    median: float
    mean_eval_cost: float
    stddev_eval_cost: float
    value_distribution: np.ndarray = field(repr=False, compare=False)


@dataclass(frozen=True)
class ExpectedCounts:
    cartesian_size: int
    constrained_size: int
    dimensions: int


@dataclass
class ValidationReport:
    cache_id: str
    cartesian_size: int
    constrained_size: int
    dimensions: int
    findings: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.findings

    def __str__(self):
        lines = [f"cache={self.cache_id}",
                 f"cartesian={self.cartesian_size} constrained={self.constrained_size} dims={self.dimensions}"]
        lines.extend(f"MISMATCH {finding}" for finding in self.findings)
        return "\n".join(lines)


def space_stats(cache) -> SpaceStats:
    """Optimum, median (interpolated for even counts), evaluation cost and sorted values of the valid entries"""
    values = np.sort(np.asarray(cache.objectives, dtype=np.float64))
    values.setflags(write=False)
    costs = np.asarray(cache.costs, dtype=np.float64)
    return SpaceStats(
        optimum=float(values[0]),
        median=float(np.median(values)),
        mean_eval_cost=float(costs.mean()),
        stddev_eval_cost=float(costs.std()),
        value_distribution=values,
    )


def validate_cache(cache, expected: Optional[Union[str, ExpectedCounts, tuple]] = None) -> ValidationReport:
    """Report the size characteristics of a loaded cache and flag mismatches against expected counts.

    Arguments:
        cache: a loaded :class:`atbench.cache.TuningCache`
        expected: a name from :data:`REFERENCE_SPACES`, an :class:`ExpectedCounts`, or a
          (cartesian, constrained, dimensions) tuple. Omit to only report counts.
    """
    space = cache.space
    report = ValidationReport(cache_id=cache.cache_id, cartesian_size=space.cartesian_size,
                              constrained_size=space.constrained_size, dimensions=space.dims)
    if expected is None:
        return report
    if isinstance(expected, str):
        if expected not in REFERENCE_SPACES:
            raise ValueError(f"no reference space named '{expected}', "
                             f"expected one of {', '.join(sorted(REFERENCE_SPACES))}")
        expected = REFERENCE_SPACES[expected]
    if not isinstance(expected, ExpectedCounts):
        expected = ExpectedCounts(*expected)

    for name in ("cartesian_size", "constrained_size", "dimensions"):
        found = getattr(report, name)
        wanted = getattr(expected, name)
        if found != wanted:
            report.findings.append(f"{name}: expected {wanted}, found {found}")
    return report
