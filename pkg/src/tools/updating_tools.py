"""
MCP tools for FEM updating runs
"""

import logging
from pathlib import Path
from typing import Optional, List, Dict

from ..config import ALGORITHMS, config, load_benchmark_config
from ..exceptions import (
    ConfigurationError,
    FemUpdatingError,
    ModelError,
    TrialError,
    ValidationError,
)
from ..fem.garteur import ParameterVector
from ..services.benchmark_service import benchmark_service, run_trial as run_seeded_trial
from ..services.problem_service import problem_service
from ..storage import emit_outputs

logger = logging.getLogger(__name__)


def _load(config_file: Optional[str], **overrides):
    path = Path(config_file) if config_file else config.config_file
    return load_benchmark_config(path).with_overrides(**overrides)


def evaluate_parameters(
    parameters: Optional[Dict[str, float]] = None,
    problem: str = "garteur",
    config_file: Optional[str] = None
) -> str:
    """
    Compare model and measured natural frequencies for a parameter vector.

    Args:
        parameters: Values keyed by parameter name (rho, vtp_imin, l_imin,
            l_imax, l_itors, r_imin, r_imax, r_itors); nominal values if omitted
        problem: 'garteur' (measured list) or 'surrogate'
        config_file: Optional TOML benchmark config

    Returns:
        Per-mode frequency table with the total error
    """
    try:
        bench = _load(config_file, kind=problem)
        updating_problem = problem_service.build_problem(bench)
        vector = ParameterVector.from_dict(parameters) if parameters else None
        report = problem_service.evaluate(updating_problem, vector)
        return problem_service.format_report(report)

    except KeyError as e:
        logger.warning(f"Missing parameter: {e}")
        return f"Error: missing parameter {e}."
    except (ValidationError, ConfigurationError) as e:
        logger.warning(f"Invalid input: {e.message}")
        return f"Error: {e.message}"
    except ModelError as e:
        logger.error(f"Model error: {e.message}")
        return f"Model error: {e.message}"
    except FemUpdatingError as e:
        logger.error(f"Evaluation error: {e.message}")
        return f"Error: {e.message}"
    except Exception as e:
        logger.error(f"Unexpected error in evaluate_parameters: {e}")
        return "Error: Unable to evaluate parameters."


def run_trial(
    algorithm: str = "fssb",
    seed: int = 1,
    iterations: int = 500,
    population: int = 20,
    problem: str = "garteur",
    config_file: Optional[str] = None
) -> str:
    """
    Run one seeded optimization trial.

    Args:
        algorithm: One of fss, fssb, pso, ga
        seed: Random seed of the trial
        iterations: Iteration count
        population: Population size
        problem: 'garteur' or 'surrogate'
        config_file: Optional TOML benchmark config

    Returns:
        Final cost, plateau iteration and best parameter vector
    """
    try:
        if algorithm not in ALGORITHMS:
            return f"Error: unknown algorithm '{algorithm}'. Choose one of {', '.join(ALGORITHMS)}."
        bench = _load(config_file, population=population, max_iter=iterations, kind=problem)
        updating_problem = problem_service.build_problem(bench)
        record = run_seeded_trial(algorithm, updating_problem, bench, seed)
        return benchmark_service.format_record(record)

    except (ValidationError, ConfigurationError) as e:
        logger.warning(f"Invalid input: {e.message}")
        return f"Error: {e.message}"
    except TrialError as e:
        logger.error(f"Trial error: {e.message}")
        return f"Trial failed: {e.message}"
    except FemUpdatingError as e:
        logger.error(f"Run error: {e.message}")
        return f"Error: {e.message}"
    except Exception as e:
        logger.error(f"Unexpected error in run_trial: {e}")
        return "Error: Unable to run the trial."


def run_benchmark(
    algorithms: Optional[List[str]] = None,
    trials: int = 30,
    iterations: int = 500,
    population: int = 20,
    seed: int = 1,
    problem: str = "garteur",
    out_dir: Optional[str] = None,
    config_file: Optional[str] = None
) -> str:
    """
    Run seeded trials of several algorithms and summarize them.

    Args:
        algorithms: Subset of fss, fssb, pso, ga (all if omitted)
        trials: Trials per algorithm, seeds seed..seed+trials-1
        iterations: Iterations per trial
        population: Population size
        seed: First seed
        problem: 'garteur' or 'surrogate'
        out_dir: Write trace.csv, summary.json and params.csv here if given
        config_file: Optional TOML benchmark config

    Returns:
        Ranking table of mean final costs
    """
    try:
        algorithms = algorithms or list(ALGORITHMS)
        bench = _load(
            config_file, population=population, max_iter=iterations,
            trials=trials, seed=seed, kind=problem
        )
        updating_problem = problem_service.build_problem(bench)
        summary = benchmark_service.run_benchmark(
            updating_problem, algorithms, bench.run.trials,
            bench=bench, workers=max(bench.run.workers, config.workers)
        )
        text = benchmark_service.format_summary(summary)
        if out_dir:
            emit_outputs(summary, summary.records, Path(out_dir))
            text += f"\nResults written to {out_dir}"
        return text

    except (ValidationError, ConfigurationError) as e:
        logger.warning(f"Invalid input: {e.message}")
        return f"Error: {e.message}"
    except FemUpdatingError as e:
        logger.error(f"Benchmark error: {e.message}")
        return f"Error: {e.message}"
    except Exception as e:
        logger.error(f"Unexpected error in run_benchmark: {e}")
        return "Error: Unable to run the benchmark."


def describe_problem(problem: str = "garteur", config_file: Optional[str] = None) -> str:
    """
    Show the measured frequencies, nominal vector and bounds of a problem.

    Args:
        problem: 'garteur' or 'surrogate'
        config_file: Optional TOML benchmark config

    Returns:
        Problem description
    """
    try:
        bench = _load(config_file, kind=problem)
        return problem_service.format_problem(problem_service.build_problem(bench))

    except (ValidationError, ConfigurationError) as e:
        logger.warning(f"Invalid input: {e.message}")
        return f"Error: {e.message}"
    except FemUpdatingError as e:
        logger.error(f"Problem error: {e.message}")
        return f"Error: {e.message}"
    except Exception as e:
        logger.error(f"Unexpected error in describe_problem: {e}")
        return "Error: Unable to describe the problem."
