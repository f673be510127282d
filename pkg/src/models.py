"""
Data models for the FEM updating benchmark
"""

from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Optional, List, Dict, Any

import numpy as np

from .exceptions import DimensionMismatchError, ValidationError
from .fem.garteur import PARAMETER_NAMES, MeshSettings, ParameterVector
from .optimizers.core import RunRecord, SearchSpace


@dataclass
class UpdatingProblem:
    """Measured frequencies, search space and model settings of one updating problem"""
    measured_hz: np.ndarray
    search_space: SearchSpace
    initial_vector: ParameterVector = field(default_factory=ParameterVector.initial)
    n_modes: int = 10
    mesh: MeshSettings = field(default_factory=MeshSettings)
    truth_vector: Optional[ParameterVector] = None
    name: str = "garteur"

    def __post_init__(self):
        """Validate problem data"""
        self.measured_hz = np.array(self.measured_hz, dtype=float).reshape(-1)
        self.validate()

    def validate(self) -> None:
        """Validate problem data"""
        if self.n_modes < 1:
            raise ValidationError(
                "At least one mode must be compared",
                details={"field": "n_modes", "value": self.n_modes}
            )

        if self.measured_hz.size != self.n_modes:
            raise DimensionMismatchError(
                f"Expected {self.n_modes} measured frequencies, got {self.measured_hz.size}",
                details={"expected": self.n_modes, "actual": int(self.measured_hz.size)}
            )

        if not np.all(self.measured_hz > 0.0):
            raise ValidationError(
                "Measured frequencies must be positive",
                details={"field": "measured_hz", "value": self.measured_hz.tolist()}
            )

        if np.any(np.diff(self.measured_hz) < 0.0):
            raise ValidationError(
                "Measured frequencies must be in ascending order",
                details={"field": "measured_hz", "value": self.measured_hz.tolist()}
            )

        if self.search_space.dim != len(PARAMETER_NAMES):
            raise DimensionMismatchError(
                "Search space does not match the updating vector",
                details={"expected": len(PARAMETER_NAMES), "actual": self.search_space.dim}
            )

    @property
    def dim(self) -> int:
        return self.search_space.dim

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary"""
        return {
            "name": self.name,
            "measured_hz": self.measured_hz.tolist(),
            "n_modes": self.n_modes,
            "search_space": self.search_space.to_dict(),
            "initial_vector": self.initial_vector.to_dict(),
            "truth_vector": self.truth_vector.to_dict() if self.truth_vector else None,
            "mesh": self.mesh.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'UpdatingProblem':
        """Create from dictionary"""
        truth = data.get("truth_vector")
        return cls(
            measured_hz=data["measured_hz"],
            search_space=SearchSpace.from_dict(data["search_space"]),
            initial_vector=ParameterVector.from_dict(data["initial_vector"]),
            n_modes=data.get("n_modes", 10),
            mesh=MeshSettings(**data.get("mesh", {})),
            truth_vector=ParameterVector.from_dict(truth) if truth else None,
            name=data.get("name", "garteur"),
        )


@dataclass
class TrialFailure:
    """A trial that raised instead of producing a record"""
    algorithm: str
    seed: int
    message: str
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "seed": self.seed,
            "message": self.message,
            "details": self.details,
        }


@dataclass
class AlgorithmSummary:
    """Statistics over the completed trials of one algorithm"""
    algorithm: str
    trials_requested: int
    trials_completed: int
    mean_final_cost: float
    std_final_cost: float
    mean_initial_cost: float
    mean_parameters: Dict[str, float]
    mean_model_hz: List[float]
    mean_mode_errors: List[float]
    mean_best_trace: List[float]
    mean_mean_trace: List[float]
    mean_plateau_iteration: float
    mean_evaluations: float
    failed_seeds: List[int] = field(default_factory=list)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.trials_completed < 1:
            raise ValidationError(
                "A summary needs at least one completed trial",
                details={"algorithm": self.algorithm}
            )

        if self.trials_completed + len(self.failed_seeds) != self.trials_requested:
            raise ValidationError(
                "Completed and failed trials do not add up",
                details={
                    "algorithm": self.algorithm,
                    "requested": self.trials_requested,
                    "completed": self.trials_completed,
                    "failed": len(self.failed_seeds),
                }
            )

        if len(self.mean_best_trace) != len(self.mean_mean_trace):
            raise DimensionMismatchError(
                "Mean traces have different lengths",
                details={"best": len(self.mean_best_trace), "mean": len(self.mean_mean_trace)}
            )

    @property
    def failed_count(self) -> int:
        return len(self.failed_seeds)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "trials_requested": self.trials_requested,
            "trials_completed": self.trials_completed,
            "failed_seeds": list(self.failed_seeds),
            "mean_final_cost": self.mean_final_cost,
            "std_final_cost": self.std_final_cost,
            "mean_initial_cost": self.mean_initial_cost,
            "mean_parameters": dict(self.mean_parameters),
            "mean_model_hz": list(self.mean_model_hz),
            "mean_mode_errors": list(self.mean_mode_errors),
            "mean_best_trace": list(self.mean_best_trace),
            "mean_mean_trace": list(self.mean_mean_trace),
            "mean_plateau_iteration": self.mean_plateau_iteration,
            "mean_evaluations": self.mean_evaluations,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'AlgorithmSummary':
        return cls(**data)


@dataclass
class BenchmarkSummary:
    """Per-algorithm statistics of a benchmark, plus the raw records behind them"""
    problem: UpdatingProblem
    algorithms: Dict[str, AlgorithmSummary] = field(default_factory=dict)
    seeds: List[int] = field(default_factory=list)
    failures: List[TrialFailure] = field(default_factory=list)
    records: List[RunRecord] = field(default_factory=list)
    created_at: datetime = field(default_factory=lambda: datetime.now(timezone.utc))

    def records_for(self, algorithm: str) -> List[RunRecord]:
        """Records of one algorithm in seed order"""
        return [r for r in self.records if r.algorithm == algorithm]

    def ranking(self) -> List[str]:
        """Algorithm names by ascending mean final cost"""
        return sorted(self.algorithms, key=lambda name: self.algorithms[name].mean_final_cost)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary; traces are written separately"""
        return {
            "created_at": self.created_at.isoformat(),
            "problem": self.problem.to_dict(),
            "seeds": list(self.seeds),
            "algorithms": {name: s.to_dict() for name, s in self.algorithms.items()},
            "failures": [f.to_dict() for f in self.failures],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'BenchmarkSummary':
        """Create from dictionary"""
        created = data.get("created_at")
        return cls(
            problem=UpdatingProblem.from_dict(data["problem"]),
            algorithms={
                name: AlgorithmSummary.from_dict(s) for name, s in data.get("algorithms", {}).items()
            },
            seeds=list(data.get("seeds", [])),
            failures=[TrialFailure(**f) for f in data.get("failures", [])],
            created_at=datetime.fromisoformat(created) if created else datetime.now(timezone.utc),
        )
