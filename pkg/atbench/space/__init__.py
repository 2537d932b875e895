from atbench.constants import NeighborhoodKind
from atbench.space.constraints import ConstraintExpr, parse_constraint
from atbench.space.searchspace import Configuration, ParamDomain, SearchSpace, crossover_uniform, \
    enumerate_valid, hamming_distance
