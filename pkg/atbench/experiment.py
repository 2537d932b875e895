# Batch experiments: budgets, seeded runs, curves and the files that report them.
import csv
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import atbench
from atbench import format_float
from atbench.cache import CacheMetadata, TuningCache, load_cache
from atbench.constants import BaselineMode, DEFAULT_CUTOFF, DEFAULT_GRID_POINTS, DEFAULT_REPEATS, \
    DEFAULT_SIMULATIONS, GroupKey
from atbench.exceptions import AtbenchException, OutOfRangeException
from atbench.methodology import AggregateReport, aggregate, aggregate_groups, baseline_curve, compute_budget, \
    confidence_half_width, make_grid, performance_curve, relative_improvement, score_table, target_split
from atbench.optimizers import AlgorithmSpec, parse_algorithm_spec
from atbench.simulation import Trace, derive_run_seed, run_optimizer, write_traces

REPORT_COLUMNS = ["algorithm", "cache_id", "score", "ci95_half_width", "repeats", "budget_seconds", "cutoff",
                  "relative_improvement"]
CURVE_COLUMNS = ["algorithm", "t_fraction", "mean_score", "ci95_low", "ci95_high", "spaces", "repeats"]
SPACE_CURVE_COLUMNS = ["algorithm", "cache_id", "t_fraction", "t_seconds", "mean_score", "ci95_low", "ci95_high",
                       "repeats"]
TARGET_COLUMNS = ["group", "algorithm", "target_score", "non_target_mean", "difference", "relative_difference"]
AGGREGATE_ROW = "aggregate"


@dataclass
class ExperimentConfig:
    """Everything that determines the outcome of an experiment.

    Raises:
        OutOfRangeException: fewer than one repeat or grid point, a cutoff outside (0, 1]
        ValueError: no caches or no algorithms, a reference or target naming an algorithm that is not listed

    ``group_by`` adds a report row per group of caches, ``reference`` (the first algorithm by default) is the
    algorithm that relative improvements compare with, and ``targets`` maps algorithm labels to the group
    each was designed for. Targets group by application unless ``group_by`` says otherwise.
    """
    cache_paths: List[str]
    algorithms: List[AlgorithmSpec]
    output_dir: str
    repeats: int = DEFAULT_REPEATS
    master_seed: int = 0
    cutoff: float = DEFAULT_CUTOFF
    points: int = DEFAULT_GRID_POINTS
    workers: int = 1
    baseline: BaselineMode = BaselineMode.analytic
    simulations: int = DEFAULT_SIMULATIONS
    group_by: Optional[GroupKey] = None
    reference: Optional[str] = None
    targets: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.cache_paths:
            raise ValueError("an experiment needs at least one cache")
        if not self.algorithms:
            raise ValueError("an experiment needs at least one algorithm")
        self.algorithms = [a if isinstance(a, AlgorithmSpec) else parse_algorithm_spec(a) for a in self.algorithms]
        labels = [a.label for a in self.algorithms]
        if len(set(labels)) != len(labels):
            raise ValueError("algorithms are listed more than once")
        if self.repeats < 1:
            raise OutOfRangeException("repeats", self.repeats, ">= 1")
        if self.points < 1:
            raise OutOfRangeException("points", self.points, ">= 1")
        if not 0 < self.cutoff <= 1:
            raise OutOfRangeException("cutoff", self.cutoff, "0 < cutoff <= 1")
        if self.workers < 1:
            raise OutOfRangeException("workers", self.workers, ">= 1")
        self.baseline = BaselineMode(self.baseline)
        if self.group_by is not None:
            self.group_by = GroupKey(self.group_by)
        elif self.targets:
            self.group_by = GroupKey.application
        self.reference = labels[0] if self.reference is None else parse_algorithm_spec(self.reference).label
        if self.reference not in labels:
            raise ValueError(f"reference algorithm {self.reference} is not among the algorithms")
        self.targets = {parse_algorithm_spec(label).label: group for label, group in self.targets.items()}
        for label in self.targets:
            if label not in labels:
                raise ValueError(f"target given for {label}, which is not among the algorithms")


@dataclass
class RunArtifacts:
    report_path: str
    curve_path: str
    space_curves_path: str
    targets_path: Optional[str] = None
    trace_paths: Dict[Tuple[str, str], str] = field(default_factory=dict)
    reports: Dict[str, AggregateReport] = field(default_factory=dict)


def _safe_name(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9._=-]+", "_", text)


def trace_file_name(cache_id: str, label: str) -> str:
    return f"{_safe_name(cache_id)}__{_safe_name(label)}.jsonl"


def group_label(metadata: CacheMetadata, key: GroupKey) -> str:
    if key is GroupKey.application:
        return metadata.kernel_name
    if key is GroupKey.device:
        return metadata.device_name
    return metadata.input_id


# caches loaded by a worker process, by path
_worker_caches: Dict[str, TuningCache] = {}


def _run_in_worker(path: str, algorithm: AlgorithmSpec, budget: float, seed: int, run_id: int,
                   master_seed: int) -> Trace:
    if path not in _worker_caches:
        _worker_caches[path] = load_cache(path)
    return run_optimizer(algorithm, _worker_caches[path], budget, seed, run_id=run_id, master_seed=master_seed)


def _execute_runs(config: ExperimentConfig, path: str, cache: TuningCache, algorithm: AlgorithmSpec,
                  budget: float, executor) -> List[Trace]:
    seeds = [derive_run_seed(config.master_seed, run_id) for run_id in range(config.repeats)]
    if executor is None:
        return [run_optimizer(algorithm, cache, budget, seed, run_id=run_id, master_seed=config.master_seed)
                for run_id, seed in enumerate(seeds)]
    futures = [executor.submit(_run_in_worker, path, algorithm, budget, seed, run_id, config.master_seed)
               for run_id, seed in enumerate(seeds)]
    return [future.result() for future in futures]


def _write_csv(path: str, columns: Sequence[str], rows: Sequence[Sequence]):
    with open(path, "w", encoding="utf-8", newline="") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)


def run_experiment(config: ExperimentConfig) -> RunArtifacts:
    """Run every algorithm ``repeats`` times on every cache and write the report, curve and trace files.

    Run i of every (cache, algorithm) pair uses the seed derived from the master seed and i, so the output
    files depend on nothing but the configuration.

    Raises:
        The first data or usage error, its message naming the failing cache and algorithm
    """
    caches = {}
    for path in config.cache_paths:
        try:
            cache = load_cache(path)
        except AtbenchException as e:
            e.args = (f"{path}: {e}",)
            raise
        if cache.cache_id in caches:
            raise ValueError(f"cache {cache.cache_id} is given twice ({caches[cache.cache_id][0]} and {path})")
        caches[cache.cache_id] = (path, cache)
    groups = {}
    if config.group_by is not None:
        groups = {cache_id: group_label(cache.metadata, config.group_by) for cache_id, (_, cache) in caches.items()}
    for label, group in config.targets.items():
        if group not in groups.values():
            raise ValueError(f"no cache belongs to {group}, the target group of {label}")

    traces_dir = os.path.join(config.output_dir, "traces")
    os.makedirs(traces_dir, exist_ok=True)
    artifacts = RunArtifacts(report_path=os.path.join(config.output_dir, "report.csv"),
                             curve_path=os.path.join(config.output_dir, "curve.csv"),
                             space_curves_path=os.path.join(config.output_dir, "space_curves.csv"))
    if config.targets:
        artifacts.targets_path = os.path.join(config.output_dir, "targets.csv")

    budgets = {}
    curves = {algorithm.label: {} for algorithm in config.algorithms}
    executor = ProcessPoolExecutor(max_workers=config.workers) if config.workers > 1 else None
    try:
        for cache_id in sorted(caches):
            path, cache = caches[cache_id]
            try:
                budget = compute_budget(cache, config.cutoff, config.baseline)
                grid = make_grid(budget, config.points)
                baseline = baseline_curve(cache, grid, config.baseline, config.simulations, seed=config.master_seed)
            except AtbenchException as e:
                e.args = (f"{cache_id}: {e}",)
                raise
            budgets[cache_id] = budget

            for algorithm in config.algorithms:
                label = algorithm.label
                atbench.logger.info(f"running {label} on {cache_id}: {config.repeats} runs, budget {budget:.6g} s")
                try:
                    traces = _execute_runs(config, path, cache, algorithm, budget, executor)
                    curves[label][cache_id] = performance_curve(traces, baseline, cache.stats.optimum)
                except AtbenchException as e:
                    e.args = (f"{cache_id} with {label}: {e}",)
                    raise
                trace_path = os.path.join(traces_dir, trace_file_name(cache_id, label))
                write_traces(trace_path, traces, header={
                    "algorithm": label, "cache_id": cache_id, "budget_seconds": budget,
                    "master_seed": config.master_seed, "repeats": config.repeats,
                })
                artifacts.trace_paths[(cache_id, label)] = trace_path
    finally:
        if executor is not None:
            executor.shutdown()

    artifacts.reports = {label: aggregate(per_space) for label, per_space in curves.items()}
    _write_reports(config, artifacts, budgets, groups)
    atbench.logger.info(f"wrote {artifacts.report_path}, {artifacts.curve_path} and {artifacts.space_curves_path}")
    return artifacts


def _half_width_or_nan(stddev: float, runs: int) -> float:
    return confidence_half_width(stddev, runs) if runs > 1 else float("nan")


def _write_reports(config: ExperimentConfig, artifacts: RunArtifacts, budgets: Dict[str, float],
                   groups: Dict[str, str]):
    reports = artifacts.reports
    reference = reports[config.reference]
    report_rows, curve_rows, space_rows = [], [], []
    for label, cache_id, score in score_table(reports):
        curve = reports[label].per_space_curves[cache_id]
        spread = float(curve.run_scores.std(ddof=1)) if curve.run_count > 1 else float("nan")
        improvement = relative_improvement(score, reference.per_space_curves[cache_id].score)
        report_rows.append([label, cache_id, format_float(score),
                            format_float(_half_width_or_nan(spread, curve.run_count)), curve.run_count,
                            format_float(budgets[cache_id]), format_float(config.cutoff), format_float(improvement)])

    reference_groups = aggregate_groups(reference, groups)
    for label in sorted(reports):
        for group, report in aggregate_groups(reports[label], groups).items():
            improvement = relative_improvement(report.score, reference_groups[group].score)
            report_rows.append([label, f"{config.group_by}={group}", format_float(report.score),
                                format_float(report.score_ci95_half_width), report.repeats,
                                format_float(float("nan")), format_float(config.cutoff), format_float(improvement)])

    for algorithm in config.algorithms:
        label = algorithm.label
        report = reports[label]
        improvement = relative_improvement(report.score, reference.score)
        report_rows.append([label, AGGREGATE_ROW, format_float(report.score),
                            format_float(report.score_ci95_half_width), report.repeats, format_float(float("nan")),
                            format_float(config.cutoff), format_float(improvement)])
        for cache_id, curve in report.per_space_curves.items():
            for t_fraction, t_seconds, value, stddev in zip(curve.grid.fractions, curve.grid.points, curve.values,
                                                             curve.stddev):
                half_width = _half_width_or_nan(float(stddev), curve.run_count)
                space_rows.append([label, cache_id, format_float(t_fraction), format_float(t_seconds),
                                   format_float(value), format_float(value - half_width),
                                   format_float(value + half_width), curve.run_count])
        spaces = len(report.per_space_curves)
        for t_fraction, value, low, high in zip(report.fractions, report.aggregate_curve, report.ci95_low,
                                                report.ci95_high):
            curve_rows.append([label, format_float(t_fraction), format_float(value), format_float(low),
                               format_float(high), spaces, report.repeats])

    _write_csv(artifacts.report_path, REPORT_COLUMNS, report_rows)
    _write_csv(artifacts.curve_path, CURVE_COLUMNS, curve_rows)
    _write_csv(artifacts.space_curves_path, SPACE_CURVE_COLUMNS, space_rows)
    if artifacts.targets_path is not None:
        target_rows = [[c.group, c.algorithm, format_float(c.target_score), format_float(c.non_target_mean),
                        format_float(c.difference), format_float(c.relative_difference)]
                       for c in target_split(reports, groups, config.targets)]
        _write_csv(artifacts.targets_path, TARGET_COLUMNS, target_rows)
