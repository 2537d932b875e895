import enum

SCHEMA_VERSION = "1.0"

# Upper bound on the Cartesian size that synthetic caches may enumerate
SYNTH_ENUMERATION_LIMIT = 10 ** 7

# Largest Cartesian size representable by a 64-bit count
MAX_CARTESIAN_SIZE = 2 ** 63 - 1

DEFAULT_REPEATS = 100
DEFAULT_CUTOFF = 0.95
DEFAULT_GRID_POINTS = 50
DEFAULT_SIMULATIONS = 10000

# Seed mixing constant for per-run seeds (64-bit golden ratio)
SEED_MIX = 0x9E3779B97F4A7C15
SEED_MASK = 2 ** 64 - 1

EXIT_OK = 0
EXIT_DATA_ERROR = 2
EXIT_USAGE = 64


class NeighborhoodKind(enum.Enum):
    """Neighborhoods of a configuration, from coarse to strict.

    hamming: one parameter differs, by any value.
    adjacent: every parameter index differs by at most one, at least one differs.
    strictly_adjacent: one parameter differs, by exactly one index.
    """

    hamming = "hamming"
    adjacent = "adjacent"
    strictly_adjacent = "strictly_adjacent"

    def __str__(self):
        return self.value


class ObjectiveDirection(enum.Enum):
    min = "min"
    max = "max"

    def __str__(self):
        return self.value


class SynthKind(enum.Enum):
    """Shapes of synthetic tuning caches"""

    bowl = "bowl"
    rugged = "rugged"
    uniform_random = "uniform_random"

    def __str__(self):
        return self.value


class BaselineMode(enum.Enum):
    analytic = "analytic"
    renewal = "renewal"
    monte_carlo = "monte_carlo"

    def __str__(self):
        return self.value


class GroupKey(enum.Enum):
    """Cache metadata that groups search spaces in reports.

    application: the kernel name.
    device: the device name.
    input: the input identifier.
    """

    application = "application"
    device = "device"
    input = "input"

    def __str__(self):
        return self.value
