from atbench.methodology.baseline import BaselineCurve, ExpectedMinima, TimeGrid, baseline_curve, \
    baseline_value_at, budget_target, compute_budget, evaluations_by, expected_min_after_n, make_grid
from atbench.methodology.curves import AggregateReport, PerformanceCurve, TargetComparison, aggregate, \
    aggregate_groups, confidence_half_width, performance_curve, relative_improvement, score_table, target_split
