"""
Command line interface: `run` benchmarks and `eval` parameter vectors
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, List

from .config import ALGORITHMS, PROBLEM_KINDS, config, load_benchmark_config
from .exceptions import ConfigurationError, FemUpdatingError, ValidationError
from .services.benchmark_service import benchmark_service
from .services.problem_service import problem_service
from .storage import emit_outputs

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fem-updating",
        description="Fish school, particle swarm and genetic FEM updating benchmark"
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="TOML benchmark config")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common], help="Run seeded trials and write trace/summary/params files")
    run.add_argument("--algo", choices=[*ALGORITHMS, "all"], default="all", help="Algorithm to run")
    run.add_argument("--trials", type=int, default=None, help="Trials per algorithm (default 30)")
    run.add_argument("--iters", type=int, default=None, help="Iterations per trial (default 500)")
    run.add_argument("--pop", type=int, default=None, help="Population size (default 20)")
    run.add_argument("--seed", type=int, default=None, help="First seed (default 1)")
    run.add_argument("--problem", choices=PROBLEM_KINDS, default=None, help="Measured list or surrogate truth")
    run.add_argument("--out", type=Path, default=None, help="Output directory")
    run.add_argument("--workers", type=int, default=None, help="Worker processes for independent trials")
    run.add_argument("--zoom-from", type=int, default=None,
                     help="Also write trace_zoom.csv with iterations from this one on")

    ev = sub.add_parser("eval", parents=[common], help="Model frequencies and errors for one parameter vector")
    ev.add_argument("--params", type=Path, default=None, help="JSON or TOML parameter file (nominal if omitted)")
    ev.add_argument("--problem", choices=PROBLEM_KINDS, default=None, help="Measured list or surrogate truth")
    ev.add_argument("--dump-mesh", action="store_true", help="Print the mesh as JSON")

    return parser


def cmd_run(args: argparse.Namespace) -> int:
    bench = load_benchmark_config(args.config or config.config_file).with_overrides(
        population=args.pop,
        max_iter=args.iters,
        trials=args.trials,
        seed=args.seed,
        workers=args.workers,
        kind=args.problem,
    )
    workers = args.workers if args.workers is not None else max(bench.run.workers, config.workers)
    algos = list(ALGORITHMS) if args.algo == "all" else [args.algo]
    out_dir = args.out or config.output_dir

    problem = problem_service.build_problem(bench)
    summary = benchmark_service.run_benchmark(problem, algos, bench.run.trials, bench=bench, workers=workers)
    emit_outputs(summary, summary.records, out_dir, zoom_from=args.zoom_from)

    print(benchmark_service.format_summary(summary))
    return EXIT_OK if summary.algorithms else EXIT_FAILED


def cmd_eval(args: argparse.Namespace) -> int:
    bench = load_benchmark_config(args.config or config.config_file).with_overrides(kind=args.problem)
    problem = problem_service.build_problem(bench)
    parameters = problem_service.load_parameters(args.params) if args.params else None

    report = problem_service.evaluate(problem, parameters)
    print(problem_service.format_report(report))

    if args.dump_mesh or config.debug_mesh:
        mesh = problem_service.mesh_for(problem, parameters)
        print(json.dumps(mesh.to_dict(), indent=2))
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    args = build_parser().parse_args(argv)

    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[logging.StreamHandler(sys.stderr)]
    )

    try:
        config.validate()
        logging.getLogger().setLevel(config.log_level)
        if args.command == "run":
            return cmd_run(args)
        return cmd_eval(args)

    except (ConfigurationError, ValidationError) as e:
        logger.error(f"{e.message} {e.details}")
        return EXIT_USAGE
    except FemUpdatingError as e:
        logger.error(f"{e.message} {e.details}")
        return EXIT_FAILED
    except KeyboardInterrupt:
        logger.info("Interrupted")
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
