# The atbench command line.
import argparse
import os
import sys

import atbench
from atbench import format_float
from atbench.cache import REFERENCE_SPACES, load_cache, synth_cache, validate_cache, write_cache
from atbench.config import config, set_log_level
from atbench.constants import BaselineMode, EXIT_DATA_ERROR, EXIT_OK, EXIT_USAGE, GroupKey, ObjectiveDirection, \
    SynthKind
from atbench.exceptions import DataException, DegenerateSpaceException, UsageException
from atbench.experiment import ExperimentConfig, run_experiment
from atbench.methodology import compute_budget


class ArgumentParser(argparse.ArgumentParser):
    """argparse reporting usage errors with exit status 64"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _require_file(path):
    if not os.path.isfile(path):
        raise FileNotFoundError(f"no such cache file '{path}'")
    return path


def cmd_validate(args) -> int:
    cache = load_cache(_require_file(args.cache))
    report = validate_cache(cache, args.expect)
    print(report)
    return EXIT_OK if report.ok else EXIT_DATA_ERROR


def cmd_stats(args) -> int:
    cache = load_cache(_require_file(args.cache))
    space, stats = cache.space, cache.stats
    cutoff = config.cutoff if args.cutoff is None else args.cutoff
    try:
        budget = format_float(compute_budget(cache, cutoff))
    except DegenerateSpaceException:
        budget = "degenerate"
    print(f"cache={cache.cache_id}")
    print(f"cartesian={space.cartesian_size} constrained={space.constrained_size} dims={space.dims}")
    # reported in the direction of the cache objective
    sign = -1.0 if cache.metadata.objective_direction is ObjectiveDirection.max else 1.0
    print(f"optimum={format_float(sign * stats.optimum)} median={format_float(sign * stats.median)}")
    print(f"mean_eval_cost={format_float(stats.mean_eval_cost)} "
          f"stddev_eval_cost={format_float(stats.stddev_eval_cost)}")
    print(f"budget={budget} cutoff={format_float(cutoff)}")
    return EXIT_OK


def cmd_gen_synthetic(args) -> int:
    cache = synth_cache(args.kind, args.dims, args.points, args.seed)
    write_cache(cache, args.out)
    print(f"wrote {cache.cache_id} to {args.out}: constrained={cache.space.constrained_size}")
    return EXIT_OK


def _parse_target(text: str):
    # labels may contain "=" themselves, the group follows the last one
    label, sep, group = text.rpartition("=")
    if not sep or not label or not group:
        raise UsageException(f"target {text!r} is not LABEL=GROUP")
    return label, group


def cmd_run(args) -> int:
    experiment = ExperimentConfig(
        cache_paths=[_require_file(path) for path in args.cache],
        algorithms=args.algo,
        output_dir=args.out,
        repeats=config.repeats if args.repeats is None else args.repeats,
        master_seed=config.seed if args.seed is None else args.seed,
        cutoff=config.cutoff if args.cutoff is None else args.cutoff,
        points=config.points if args.points is None else args.points,
        workers=config.workers if args.workers is None else args.workers,
        baseline=config.baseline if args.baseline is None else args.baseline,
        simulations=config.simulations,
        group_by=args.group_by,
        reference=args.reference,
        targets=dict(_parse_target(text) for text in args.target),
    )
    artifacts = run_experiment(experiment)
    for label, report in artifacts.reports.items():
        print(f"{label}: score={format_float(report.score)}")
    return EXIT_OK


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="atbench", description="Benchmark auto-tuning optimizers on tuning caches")
    parser.add_argument("--config", help="ini file with [experiment] and [logging] sections")
    parser.add_argument("-v", "--verbose", action="store_true", help="log debug messages")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    validate = commands.add_parser("validate", help="check a cache file and report its size")
    validate.add_argument("cache")
    validate.add_argument("--expect", choices=sorted(REFERENCE_SPACES),
                          help="compare the sizes with a reference application")
    validate.set_defaults(func=cmd_validate)

    stats = commands.add_parser("stats", help="print the characteristics of a cache")
    stats.add_argument("cache")
    stats.add_argument("--cutoff", type=float)
    stats.set_defaults(func=cmd_stats)

    synthetic = commands.add_parser("gen-synthetic", help="write a synthetic cache")
    synthetic.add_argument("--kind", required=True, choices=[k.value for k in SynthKind])
    synthetic.add_argument("--dims", required=True, type=int)
    synthetic.add_argument("--points", required=True, type=int, help="values per parameter")
    synthetic.add_argument("--seed", type=int, default=0)
    synthetic.add_argument("--out", required=True)
    synthetic.set_defaults(func=cmd_gen_synthetic)

    run = commands.add_parser("run", help="run optimizers on caches and score them")
    run.add_argument("--cache", required=True, nargs="+")
    run.add_argument("--algo", required=True, nargs="+", help="NAME[,key=value...]")
    run.add_argument("--repeats", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--cutoff", type=float)
    run.add_argument("--points", type=int)
    run.add_argument("--workers", type=int)
    run.add_argument("--baseline", choices=[m.value for m in BaselineMode])
    run.add_argument("--group-by", choices=[k.value for k in GroupKey], help="add a report row per group of caches")
    run.add_argument("--reference", help="algorithm that relative improvements compare with (default: the first)")
    run.add_argument("--target", action="append", default=[], metavar="LABEL=GROUP",
                     help="group an algorithm was designed for, compared in targets.csv")
    run.add_argument("--out", required=True)
    run.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config or os.getenv("ATBENCH_CONFIG"):
            config.load(args.config)
        if args.verbose:
            set_log_level("DEBUG")
        return args.func(args)
    except DataException as e:
        print(f"atbench: error: {e}", file=sys.stderr)
        return EXIT_DATA_ERROR
    except (UsageException, ValueError, OSError) as e:
        print(f"atbench: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
