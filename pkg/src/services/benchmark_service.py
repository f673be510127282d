"""
Benchmark service layer
Seeded trials of each optimizer on an updating problem and their statistics
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Optional, List, Sequence, Tuple

import numpy as np

from ..config import ALGORITHMS, BenchmarkConfig
from ..exceptions import FemUpdatingError, TrialError, ValidationError
from ..fem.garteur import PARAMETER_NAMES
from ..models import AlgorithmSummary, BenchmarkSummary, TrialFailure, UpdatingProblem
from ..optimizers.core import Objective, Optimizer, RunRecord
from ..optimizers.fss import FishSchoolSearch
from ..optimizers.ga import GeneticAlgorithm
from ..optimizers.pso import ParticleSwarm
from .problem_service import make_objective, per_mode_errors

logger = logging.getLogger(__name__)

TrialOutcome = Tuple[Optional[RunRecord], Optional[TrialFailure]]


def build_optimizer(
    algo: str,
    objective: Objective,
    problem: UpdatingProblem,
    bench: BenchmarkConfig,
    seed: int
) -> Optimizer:
    """Optimizer for one algorithm name, configured from the benchmark settings"""
    space = problem.search_space
    run_settings = bench.run_settings(seed)
    initial = problem.initial_vector.to_array()

    if algo in ("fss", "fssb"):
        return FishSchoolSearch(objective, space, run_settings, bench.fss_settings(biased=algo == "fssb"), initial)
    if algo == "pso":
        return ParticleSwarm(objective, space, run_settings, bench.pso_settings(), initial)
    if algo == "ga":
        return GeneticAlgorithm(objective, space, run_settings, bench.ga_settings(), initial)

    raise ValidationError(
        f"Unknown algorithm '{algo}'",
        details={"algorithm": algo, "allowed": ALGORITHMS}
    )


def run_trial(
    algo: str,
    problem: UpdatingProblem,
    bench: Optional[BenchmarkConfig] = None,
    seed: int = 1
) -> RunRecord:
    """One seeded optimization of the problem's FEM objective"""
    bench = bench or BenchmarkConfig()
    logger.info(f"Starting {algo} trial seed={seed} ({bench.run.population} x {bench.run.max_iter})")
    try:
        objective = make_objective(problem)
        record = build_optimizer(algo, objective, problem, bench, seed).run()
        record.best_model_hz = objective.frequencies(record.best_position).frequencies_hz
    except ValidationError:
        raise
    except FemUpdatingError as e:
        logger.error(f"{algo} trial seed={seed} failed: {e.message}")
        raise TrialError(
            f"{algo} trial seed={seed} failed: {e.message}",
            details={"algorithm": algo, "seed": seed, **e.details}
        ) from e
    except Exception as e:
        logger.error(f"Unexpected error in {algo} trial seed={seed}: {e}")
        raise TrialError(
            f"{algo} trial seed={seed} failed: {str(e)}",
            details={"algorithm": algo, "seed": seed, "error": str(e)}
        ) from e

    logger.info(f"Finished {algo} trial seed={seed}: best {record.final_cost:.4f}% after {record.evaluations} evaluations")
    return record


def _trial_task(algo: str, problem: UpdatingProblem, bench: BenchmarkConfig, seed: int) -> TrialOutcome:
    """Worker entry point; failures come back as values"""
    try:
        return run_trial(algo, problem, bench, seed), None
    except TrialError as e:
        return None, TrialFailure(algo, seed, e.message, _plain(e.details))


def _plain(details: dict) -> dict:
    """Details reduced to JSON-friendly values"""
    return {k: (v if isinstance(v, (str, int, float, bool, list, type(None))) else str(v)) for k, v in details.items()}


def summarize(
    algorithm: str,
    records: List[RunRecord],
    failures: List[TrialFailure],
    problem: UpdatingProblem
) -> AlgorithmSummary:
    """
    Means over completed trials; std is the population standard deviation.

    Model frequencies come from each record, as computed by run_trial.
    """
    finals = np.array([r.final_cost for r in records])
    positions = np.array([r.best_position for r in records])
    model_hz = np.array([r.best_model_hz for r in records])
    errors = np.array([per_mode_errors(problem.measured_hz, f) for f in model_hz])

    return AlgorithmSummary(
        algorithm=algorithm,
        trials_requested=len(records) + len(failures),
        trials_completed=len(records),
        mean_final_cost=float(finals.mean()),
        std_final_cost=float(finals.std()),
        mean_initial_cost=float(np.mean([r.initial_mean_cost for r in records])),
        mean_parameters=dict(zip(PARAMETER_NAMES, positions.mean(axis=0).tolist())),
        mean_model_hz=model_hz.mean(axis=0).tolist(),
        mean_mode_errors=errors.mean(axis=0).tolist(),
        mean_best_trace=np.mean([r.best_cost for r in records], axis=0).tolist(),
        mean_mean_trace=np.mean([r.mean_cost for r in records], axis=0).tolist(),
        mean_plateau_iteration=float(np.mean([r.plateau_iteration() for r in records])),
        mean_evaluations=float(np.mean([r.evaluations for r in records])),
        failed_seeds=[f.seed for f in failures],
    )


class BenchmarkService:
    """Service for multi-trial benchmarks"""

    @staticmethod
    def resolve_seeds(trials: int, seeds: Optional[Sequence[int]] = None, first_seed: int = 1) -> List[int]:
        """Explicit seeds, or `trials` consecutive seeds from `first_seed`"""
        if trials < 1:
            raise ValidationError("Trial count must be positive", details={"trials": trials})
        seeds = list(seeds) if seeds is not None else list(range(first_seed, first_seed + trials))
        if len(seeds) != trials:
            raise ValidationError(
                "Seed list does not match the trial count",
                details={"trials": trials, "seeds": len(seeds)}
            )
        if len(set(seeds)) != len(seeds):
            raise ValidationError("Seeds must be distinct", details={"seeds": seeds})
        return seeds

    @staticmethod
    def run_benchmark(
        problem: UpdatingProblem,
        algos: Sequence[str],
        trials: int,
        seeds: Optional[Sequence[int]] = None,
        bench: Optional[BenchmarkConfig] = None,
        workers: int = 1
    ) -> BenchmarkSummary:
        """
        Run every algorithm once per seed and aggregate.

        Failed trials are excluded from the statistics and listed in the
        summary. Outcomes are reduced in (algorithm, seed) order whatever
        the worker count.
        """
        bench = bench or BenchmarkConfig()
        seeds = BenchmarkService.resolve_seeds(trials, seeds, bench.run.seed)
        unknown = [a for a in algos if a not in ALGORITHMS]
        if unknown or not algos:
            raise ValidationError(
                "Unknown or empty algorithm list",
                details={"algorithms": list(algos), "allowed": ALGORITHMS}
            )

        tasks = [(algo, seed) for algo in algos for seed in seeds]
        logger.info(f"Benchmark: {len(algos)} algorithm(s) x {trials} trial(s) on '{problem.name}', workers={workers}")

        if workers > 1:
            try:
                with ProcessPoolExecutor(max_workers=workers) as pool:
                    futures = [pool.submit(_trial_task, algo, problem, bench, seed) for algo, seed in tasks]
                    outcomes = [f.result() for f in futures]
            except Exception as e:
                logger.error(f"Worker pool failed: {e}")
                raise TrialError(
                    f"Worker pool failed: {str(e)}",
                    details={"workers": workers, "error": str(e)}
                )
        else:
            outcomes = [_trial_task(algo, problem, bench, seed) for algo, seed in tasks]

        summary = BenchmarkSummary(problem=problem, seeds=seeds)
        for algo in algos:
            records = [rec for (a, _), (rec, _) in zip(tasks, outcomes) if a == algo and rec is not None]
            failures = [fail for (a, _), (_, fail) in zip(tasks, outcomes) if a == algo and fail is not None]
            for failure in failures:
                logger.warning(f"Excluding {algo} trial seed={failure.seed}: {failure.message}")
            summary.records.extend(records)
            summary.failures.extend(failures)

            if not records:
                logger.error(f"All {trials} {algo} trials failed; no statistics reported")
                continue

            summary.algorithms[algo] = summarize(algo, records, failures, problem)
            stats = summary.algorithms[algo]
            logger.info(
                f"{algo}: mean final {stats.mean_final_cost:.4f}% (std {stats.std_final_cost:.4f}), "
                f"{stats.trials_completed}/{trials} completed"
            )

        return summary

    @staticmethod
    def format_summary(summary: BenchmarkSummary) -> str:
        """One line per algorithm, best mean final cost first"""
        if not summary.algorithms:
            return f"No completed trials ({len(summary.failures)} failed)."

        lines = [
            f"{'Algorithm':<9}  {'Mean T %':>9}  {'Std':>8}  {'Plateau':>7}  {'Done':>5}",
        ]
        for name in summary.ranking():
            s = summary.algorithms[name]
            lines.append(
                f"{name:<9}  {s.mean_final_cost:>9.3f}  {s.std_final_cost:>8.3f}  "
                f"{s.mean_plateau_iteration:>7.1f}  {s.trials_completed:>2}/{s.trials_requested:<2}"
            )
        if summary.failures:
            lines.append(f"{len(summary.failures)} trial(s) failed and were excluded.")
        return "\n".join(lines)

    @staticmethod
    def format_record(record: RunRecord) -> str:
        return (
            f"{record.algorithm} seed={record.seed}: best {record.final_cost:.4f}% "
            f"(initial best {record.initial_best_cost:.4f}%, {record.evaluations} evaluations, "
            f"plateau at iteration {record.plateau_iteration()})\n"
            "Best position: " + ", ".join(f"{v:.6g}" for v in record.best_position)
        )


# Global service instance
benchmark_service = BenchmarkService()
