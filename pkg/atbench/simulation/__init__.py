from atbench.simulation.evaluator import BudgetedEvaluator, budget_spent_fraction
from atbench.simulation.runner import derive_run_seed, run_optimizer
from atbench.simulation.trace import Trace, TraceEvent, best_so_far_at, read_traces, write_traces
