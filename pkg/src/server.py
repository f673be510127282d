"""
MCP server exposing FEM updating runs
"""

import logging
import sys
from typing import Optional, List, Dict

from fastmcp import FastMCP

from .config import config
from .exceptions import ConfigurationError
from .tools import updating_tools

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[
        logging.StreamHandler(sys.stderr),  # stdout carries the MCP protocol
    ]
)

logger = logging.getLogger(__name__)

# Initialize FastMCP server
mcp = FastMCP("FEM Updating Benchmark")


@mcp.tool()
def evaluate_parameters(
    parameters: Optional[Dict[str, float]] = None,
    problem: str = "garteur"
) -> str:
    """
    Compare model and measured natural frequencies of the aeroplane frame.

    Args:
        parameters: Values keyed by rho, vtp_imin, l_imin, l_imax, l_itors,
            r_imin, r_imax, r_itors (nominal model if omitted)
        problem: 'garteur' (measured list) or 'surrogate'

    Returns:
        Per-mode frequency table with the total error
    """
    logger.info(f"evaluate_parameters called (problem={problem})")
    return updating_tools.evaluate_parameters(parameters, problem)


@mcp.tool()
def run_trial(
    algorithm: str = "fssb",
    seed: int = 1,
    iterations: int = 500,
    population: int = 20,
    problem: str = "garteur"
) -> str:
    """
    Run one seeded optimization trial (fss, fssb, pso or ga).

    Args:
        algorithm: Optimizer name
        seed: Random seed
        iterations: Iteration count
        population: Population size
        problem: 'garteur' or 'surrogate'

    Returns:
        Final cost and best parameter vector
    """
    logger.info(f"run_trial called: {algorithm} seed={seed}")
    return updating_tools.run_trial(algorithm, seed, iterations, population, problem)


@mcp.tool()
def run_benchmark(
    algorithms: Optional[List[str]] = None,
    trials: int = 30,
    iterations: int = 500,
    population: int = 20,
    seed: int = 1,
    problem: str = "garteur",
    out_dir: Optional[str] = None
) -> str:
    """
    Run seeded trials of several optimizers and rank them by mean final cost.

    Args:
        algorithms: Subset of fss, fssb, pso, ga (all if omitted)
        trials: Trials per algorithm
        iterations: Iterations per trial
        population: Population size
        seed: First seed
        problem: 'garteur' or 'surrogate'
        out_dir: Directory for trace.csv, summary.json and params.csv

    Returns:
        Ranking table
    """
    logger.info(f"run_benchmark called: {algorithms or 'all'} x {trials}")
    return updating_tools.run_benchmark(
        algorithms, trials, iterations, population, seed, problem, out_dir
    )


@mcp.tool()
def describe_problem(problem: str = "garteur") -> str:
    """
    Show measured frequencies, the nominal parameter vector and its bounds.

    Args:
        problem: 'garteur' or 'surrogate'

    Returns:
        Problem description
    """
    return updating_tools.describe_problem(problem)


def initialize_server() -> bool:
    """Validate configuration and apply the log level"""
    try:
        logger.info("Starting FEM Updating MCP Server")
        config.validate()
        logging.getLogger().setLevel(config.log_level)
        logger.info("✓ Configuration validated successfully")
        return True

    except ConfigurationError as e:
        logger.error(f"❌ Configuration error: {e.message}")
        logger.error(f"Details: {e.details}")
        return False
    except Exception as e:
        logger.error(f"❌ Unexpected error during initialization: {e}", exc_info=True)
        return False


def main():
    """Main entry point"""
    try:
        if not initialize_server():
            logger.error("Server initialization failed")
            sys.exit(1)

        logger.info("Starting MCP server...")
        mcp.run()

    except KeyboardInterrupt:
        logger.info("Received shutdown signal")
    except Exception as e:
        logger.error(f"Fatal error: {e}", exc_info=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
