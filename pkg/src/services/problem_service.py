"""
Updating problem service layer
Cost function, problem construction and single-vector evaluation
"""

import json
import logging
import tomllib
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Dict, Any, Sequence

import numpy as np

from ..config import BenchmarkConfig
from ..exceptions import (
    ConfigurationError,
    DimensionMismatchError,
    FemUpdatingError,
    ModelError,
    ObjectiveEvaluationError,
    ValidationError,
)
from ..fem.assembly import Mesh
from ..fem.garteur import PARAMETER_NAMES, ParameterVector, build_garteur, model_frequencies
from ..fem.modal import ModalResult
from ..models import UpdatingProblem

logger = logging.getLogger(__name__)


def per_mode_errors(measured: Sequence[float], model: Sequence[float]) -> np.ndarray:
    """Percentage error of each model frequency against its measured value"""
    measured = np.asarray(measured, dtype=float).reshape(-1)
    model = np.asarray(model, dtype=float).reshape(-1)
    if measured.size != model.size:
        raise DimensionMismatchError(
            "Measured and model frequency lists differ in length",
            details={"measured": int(measured.size), "model": int(model.size)}
        )
    if np.any(measured <= 0.0):
        raise ValidationError(
            "Measured frequencies must be positive",
            details={"measured_hz": measured.tolist()}
        )
    if not np.all(np.isfinite(model)):
        raise ValidationError(
            "Model frequencies must be finite",
            details={"model_hz": model.tolist()}
        )
    return 100.0 * np.abs(measured - model) / measured


def total_error_percent(measured: Sequence[float], model: Sequence[float]) -> float:
    """Sum of per-mode percentage errors"""
    return float(np.sum(per_mode_errors(measured, model)))


class FemObjective:
    """Total frequency error of the frame model at a position vector"""

    def __init__(self, problem: UpdatingProblem):
        self.problem = problem
        self.evaluations = 0

    def frequencies(self, x: np.ndarray) -> ModalResult:
        p = ParameterVector.from_array(x)
        return model_frequencies(p, self.problem.n_modes, self.problem.mesh)

    def __call__(self, x: np.ndarray) -> float:
        self.evaluations += 1
        try:
            modal = self.frequencies(x)
            return total_error_percent(self.problem.measured_hz, modal.frequencies_hz)
        except FemUpdatingError as e:
            raise ObjectiveEvaluationError(
                f"Model evaluation failed: {e.message}",
                details={**e.details, "parameters": np.asarray(x).tolist()}
            ) from e
        except Exception as e:
            raise ObjectiveEvaluationError(
                f"Model evaluation failed: {str(e)}",
                details={"parameters": np.asarray(x).tolist(), "error": str(e)}
            ) from e


def make_objective(problem: UpdatingProblem) -> FemObjective:
    problem.validate()
    return FemObjective(problem)


def garteur_problem(bench: BenchmarkConfig) -> UpdatingProblem:
    """Problem against the configured measured list"""
    return UpdatingProblem(
        measured_hz=bench.problem.measured_hz,
        search_space=bench.search_space(),
        initial_vector=ParameterVector.initial(),
        n_modes=bench.problem.n_modes,
        mesh=bench.mesh,
        name="garteur",
    )


def run_surrogate(template: UpdatingProblem, truth_seed: int) -> UpdatingProblem:
    """
    Problem whose measured frequencies come from a known in-bounds vector.

    The truth vector is drawn uniformly inside the template's bounds with
    its own generator, so the optimum (cost 0) is known exactly.
    """
    space = template.search_space
    rng = np.random.default_rng(truth_seed)
    truth = ParameterVector.from_array(rng.uniform(space.min_position, space.max_position))
    modal = model_frequencies(truth, template.n_modes, template.mesh)
    logger.info(f"Surrogate problem (truth_seed={truth_seed}): {np.round(modal.frequencies_hz, 3).tolist()} Hz")
    return UpdatingProblem(
        measured_hz=modal.frequencies_hz,
        search_space=space,
        initial_vector=template.initial_vector,
        n_modes=template.n_modes,
        mesh=template.mesh,
        truth_vector=truth,
        name="surrogate",
    )


@dataclass
class EvaluationReport:
    """Model against measured frequencies for one parameter vector"""
    parameters: ParameterVector
    measured_hz: np.ndarray
    model_hz: np.ndarray
    mode_errors: np.ndarray
    total_error: float
    rigid_mode_count: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "parameters": self.parameters.to_dict(),
            "measured_hz": self.measured_hz.tolist(),
            "model_hz": self.model_hz.tolist(),
            "mode_errors": self.mode_errors.tolist(),
            "total_error": self.total_error,
            "rigid_mode_count": self.rigid_mode_count,
        }


class ProblemService:
    """Service for problem construction and parameter evaluation"""

    @staticmethod
    def build_problem(bench: BenchmarkConfig) -> UpdatingProblem:
        """Measured-list or surrogate problem, per the config's problem kind"""
        try:
            problem = garteur_problem(bench)
            if bench.problem.kind == "surrogate":
                problem = run_surrogate(problem, bench.problem.truth_seed)
            return problem

        except (ValidationError, ConfigurationError) as e:
            logger.error(f"Invalid problem settings: {e}")
            raise
        except ModelError as e:
            logger.error(f"Model error building problem: {e}")
            raise
        except Exception as e:
            logger.error(f"Unexpected error building problem: {e}")
            raise ModelError(
                f"Failed to build problem: {str(e)}",
                details={"kind": bench.problem.kind, "error": str(e)}
            )

    @staticmethod
    def evaluate(problem: UpdatingProblem, parameters: Optional[ParameterVector] = None) -> EvaluationReport:
        """Model frequencies and errors; the nominal vector by default"""
        parameters = parameters or problem.initial_vector
        try:
            modal = model_frequencies(parameters, problem.n_modes, problem.mesh)
            errors = per_mode_errors(problem.measured_hz, modal.frequencies_hz)
            report = EvaluationReport(
                parameters=parameters,
                measured_hz=problem.measured_hz,
                model_hz=modal.frequencies_hz,
                mode_errors=errors,
                total_error=float(errors.sum()),
                rigid_mode_count=modal.rigid_mode_count,
            )
            logger.info(f"Evaluated parameters: total error {report.total_error:.3f}%")
            return report

        except FemUpdatingError as e:
            logger.error(f"Error evaluating parameters: {e}")
            raise
        except Exception as e:
            logger.error(f"Unexpected error evaluating parameters: {e}")
            raise ObjectiveEvaluationError(
                f"Failed to evaluate parameters: {str(e)}",
                details={"parameters": parameters.to_dict(), "error": str(e)}
            )

    @staticmethod
    def format_report(report: EvaluationReport) -> str:
        """Measured, model and error columns with the total on the last line"""
        lines = [
            f"{'Mode':>4}  {'Measured (Hz)':>13}  {'Model (Hz)':>10}  {'Error %':>8}",
        ]
        for i, (f_meas, f_model, err) in enumerate(
            zip(report.measured_hz, report.model_hz, report.mode_errors), start=1
        ):
            lines.append(f"{i:>4}  {f_meas:>13.3f}  {f_model:>10.3f}  {err:>8.3f}")
        lines.append(f"Total error: {report.total_error:.3f}%")
        return "\n".join(lines)

    @staticmethod
    def format_problem(problem: UpdatingProblem) -> str:
        space = problem.search_space
        lines = [
            f"Problem: {problem.name} ({problem.n_modes} modes)",
            "Measured (Hz): " + ", ".join(f"{f:.3f}" for f in problem.measured_hz),
            f"{'Parameter':<10}  {'Initial':>11}  {'Min':>11}  {'Max':>11}",
        ]
        initial = problem.initial_vector.to_array()
        for name, x0, lo, hi in zip(PARAMETER_NAMES, initial, space.min_position, space.max_position):
            lines.append(f"{name:<10}  {x0:>11.4g}  {lo:>11.4g}  {hi:>11.4g}")
        if problem.truth_vector is not None:
            lines.append("Truth: " + ", ".join(f"{v:.4g}" for v in problem.truth_vector.to_array()))
        return "\n".join(lines)

    @staticmethod
    def mesh_for(problem: UpdatingProblem, parameters: Optional[ParameterVector] = None) -> Mesh:
        return build_garteur(parameters or problem.initial_vector, problem.mesh)

    @staticmethod
    def load_parameters(path: Path) -> ParameterVector:
        """
        Read a parameter vector from JSON or TOML.

        Accepts a table keyed by parameter name, or a JSON list in
        parameter order.
        """
        path = Path(path)
        try:
            if path.suffix == ".toml":
                with path.open("rb") as fh:
                    data = tomllib.load(fh)
            else:
                data = json.loads(path.read_text())
        except FileNotFoundError:
            raise ConfigurationError("Parameter file not found", details={"path": str(path)})
        except (json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
            raise ConfigurationError(
                f"Parameter file could not be parsed: {str(e)}",
                details={"path": str(path), "error": str(e)}
            )

        if isinstance(data, list):
            return ParameterVector.from_array(data)
        if isinstance(data, dict):
            missing = [name for name in PARAMETER_NAMES if name not in data]
            if missing:
                raise ValidationError(
                    "Parameter file is missing values",
                    details={"path": str(path), "missing": missing}
                )
            return ParameterVector.from_dict(data)
        raise ValidationError(
            "Parameter file must hold a table or a list",
            details={"path": str(path)}
        )


# Global service instance
problem_service = ProblemService()
