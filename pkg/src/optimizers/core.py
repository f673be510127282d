"""
Shared contracts for bounded continuous optimization

Search space, candidates, run settings and run records used by the fish
school, particle swarm and genetic optimizers, plus the seeded run loop
they all share.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from ..exceptions import (
    DimensionMismatchError,
    FemUpdatingError,
    ObjectiveEvaluationError,
    ValidationError,
)

logger = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], float]


def _as_vector(values: Sequence[float], name: str) -> np.ndarray:
    vector = np.array(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(vector)):
        raise ValidationError(
            f"{name} must contain finite values",
            details={"field": name, "value": vector.tolist()}
        )
    return vector


@dataclass
class SearchSpace:
    """Per-dimension position bounds and optional symmetric velocity bounds"""
    min_position: np.ndarray
    max_position: np.ndarray
    min_velocity: Optional[np.ndarray] = None
    max_velocity: Optional[np.ndarray] = None
    names: Optional[List[str]] = None

    def __post_init__(self):
        self.min_position = _as_vector(self.min_position, "min_position")
        self.max_position = _as_vector(self.max_position, "max_position")
        if self.min_velocity is not None:
            self.min_velocity = _as_vector(self.min_velocity, "min_velocity")
        if self.max_velocity is not None:
            self.max_velocity = _as_vector(self.max_velocity, "max_velocity")
        if self.names is not None:
            self.names = list(self.names)
        self.validate()

    def validate(self) -> None:
        """Validate bounds"""
        if self.min_position.size == 0:
            raise ValidationError("Search space needs at least one dimension")

        if self.min_position.shape != self.max_position.shape:
            raise DimensionMismatchError(
                "Position bounds have different lengths",
                details={
                    "min_position": self.min_position.size,
                    "max_position": self.max_position.size,
                }
            )

        if np.any(self.min_position >= self.max_position):
            bad = np.flatnonzero(self.min_position >= self.max_position).tolist()
            raise ValidationError(
                "min_position must be strictly below max_position",
                details={"dimensions": bad}
            )

        if (self.min_velocity is None) != (self.max_velocity is None):
            raise ValidationError("Velocity bounds must be given as a pair")

        if self.has_velocity_bounds:
            for name, bound in (("min_velocity", self.min_velocity),
                                ("max_velocity", self.max_velocity)):
                if bound.shape != self.min_position.shape:
                    raise DimensionMismatchError(
                        f"{name} length does not match the search space",
                        details={"field": name, "expected": self.dim, "actual": bound.size}
                    )
            if np.any(self.min_velocity >= self.max_velocity):
                raise ValidationError("min_velocity must be strictly below max_velocity")
            if not np.allclose(-self.min_velocity, self.max_velocity, rtol=1e-12, atol=0.0):
                raise ValidationError(
                    "Velocity bounds must be symmetric",
                    details={
                        "min_velocity": self.min_velocity.tolist(),
                        "max_velocity": self.max_velocity.tolist(),
                    }
                )

        if self.names is not None and len(self.names) != self.dim:
            raise DimensionMismatchError(
                "Dimension names do not match the search space",
                details={"expected": self.dim, "actual": len(self.names)}
            )

    @property
    def dim(self) -> int:
        return int(self.min_position.size)

    @property
    def amplitude(self) -> np.ndarray:
        """Bound width per dimension"""
        return self.max_position - self.min_position

    @property
    def has_velocity_bounds(self) -> bool:
        return self.max_velocity is not None

    def contains(self, x: np.ndarray) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.min_position) and np.all(x <= self.max_position))

    def check_dimension(self, x: np.ndarray, name: str = "position") -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise DimensionMismatchError(
                f"{name} has {x.shape[-1]} components, search space has {self.dim}",
                details={"field": name, "expected": self.dim, "actual": int(x.shape[-1])}
            )
        return x

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "min_position": self.min_position.tolist(),
            "max_position": self.max_position.tolist(),
            "names": self.names,
        }
        if self.has_velocity_bounds:
            data["min_velocity"] = self.min_velocity.tolist()
            data["max_velocity"] = self.max_velocity.tolist()
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SearchSpace':
        return cls(**data)


@dataclass
class Candidate:
    """A position in the search space and its cost"""
    position: np.ndarray
    cost: float

    def __post_init__(self):
        self.position = np.array(self.position, dtype=float)
        self.cost = float(self.cost)
        if not math.isfinite(self.cost) or self.cost < 0.0:
            raise ValidationError(
                "Candidate cost must be a finite non-negative number",
                details={"cost": self.cost}
            )

    def copy(self) -> 'Candidate':
        return Candidate(self.position.copy(), self.cost)


@dataclass
class RunSettings:
    """Population size, iteration budget and seed for one trial"""
    population_size: int = 20
    max_iter: int = 500
    seed: int = 1
    include_initial_vector: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.population_size < 1:
            raise ValidationError(
                "Population size must be positive",
                details={"field": "population_size", "value": self.population_size}
            )
        if self.max_iter < 1:
            raise ValidationError(
                "Iteration count must be positive",
                details={"field": "max_iter", "value": self.max_iter}
            )
        if not 0 <= self.seed < 2 ** 64:
            raise ValidationError(
                "Seed must be a 64-bit unsigned integer",
                details={"field": "seed", "value": self.seed}
            )


@dataclass
class RunRecord:
    """Per-iteration trace and final result of one seeded trial"""
    algorithm: str
    seed: int
    best_cost: np.ndarray
    mean_cost: np.ndarray
    best_position: np.ndarray
    evaluations: int
    initial_best_cost: float
    initial_mean_cost: float
    # model frequencies at best_position, filled in by the harness
    best_model_hz: Optional[np.ndarray] = None

    def __post_init__(self):
        self.best_cost = np.asarray(self.best_cost, dtype=float)
        self.mean_cost = np.asarray(self.mean_cost, dtype=float)
        self.best_position = np.asarray(self.best_position, dtype=float)
        if self.best_model_hz is not None:
            self.best_model_hz = np.asarray(self.best_model_hz, dtype=float)
        self.validate()

    def validate(self) -> None:
        if self.best_cost.shape != self.mean_cost.shape:
            raise ValidationError(
                "Best and mean traces must have the same length",
                details={"best": self.best_cost.size, "mean": self.mean_cost.size}
            )
        if np.any(np.diff(self.best_cost) > 0.0):
            raise ValidationError(
                "Best-so-far trace must be non-increasing",
                details={"algorithm": self.algorithm, "seed": self.seed}
            )

    @property
    def max_iter(self) -> int:
        return int(self.best_cost.size)

    @property
    def final_cost(self) -> float:
        return float(self.best_cost[-1])

    def plateau_iteration(self, tolerance: float = 0.05) -> int:
        """First iteration whose best cost is within `tolerance` of the final cost"""
        threshold = self.final_cost * (1.0 + tolerance)
        return int(np.flatnonzero(self.best_cost <= threshold)[0])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "seed": self.seed,
            "best_cost": self.best_cost.tolist(),
            "mean_cost": self.mean_cost.tolist(),
            "best_position": self.best_position.tolist(),
            "evaluations": self.evaluations,
            "initial_best_cost": self.initial_best_cost,
            "initial_mean_cost": self.initial_mean_cost,
            "best_model_hz": None if self.best_model_hz is None else self.best_model_hz.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunRecord':
        return cls(**data)


def make_rng(seed: int) -> np.random.Generator:
    """The single generator owned by one trial"""
    return np.random.default_rng(seed)


def clamp_to_bounds(x: np.ndarray, space: SearchSpace) -> np.ndarray:
    """Coerce every component into its position bounds"""
    x = space.check_dimension(x)
    return np.clip(x, space.min_position, space.max_position)


def clamp_velocity(v: np.ndarray, space: SearchSpace) -> np.ndarray:
    v = space.check_dimension(v, "velocity")
    if not space.has_velocity_bounds:
        return v.copy()
    return np.clip(v, space.min_velocity, space.max_velocity)


def uniform_init(space: SearchSpace, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw `n` positions uniformly inside the bounds, shape (n, dim)"""
    if n < 1:
        raise ValidationError("Population size must be positive", details={"n": n})
    return rng.uniform(space.min_position, space.max_position, size=(n, space.dim))


def linear_schedule(v_start, v_end, iteration: int, max_iter: int):
    """Linear interpolation from `v_start` at 0 to `v_end` at `max_iter`"""
    if max_iter == 0:
        raise ValidationError("max_iter must be non-zero for a schedule")
    if not 0 <= iteration <= max_iter:
        raise ValidationError(
            "Iteration outside the schedule range",
            details={"iteration": iteration, "max_iter": max_iter}
        )
    return v_start + (v_end - v_start) * iteration / max_iter


class CountingObjective:
    """Wraps an objective, counts evaluations and rejects invalid costs"""

    def __init__(self, objective: Objective):
        self._objective = objective
        self.evaluations = 0

    def __call__(self, x: np.ndarray) -> float:
        self.evaluations += 1
        try:
            cost = float(self._objective(x))
        except FemUpdatingError:
            raise
        except Exception as e:
            raise ObjectiveEvaluationError(
                f"Objective evaluation failed: {str(e)}",
                details={"parameters": np.asarray(x).tolist(), "error": str(e)}
            ) from e

        if not math.isfinite(cost) or cost < 0.0:
            raise ObjectiveEvaluationError(
                "Objective returned an invalid cost",
                details={"parameters": np.asarray(x).tolist(), "cost": cost}
            )
        return cost

    def evaluate_all(self, positions: np.ndarray) -> np.ndarray:
        """Evaluate rows in index order"""
        return np.array([self(x) for x in positions], dtype=float)


class Optimizer(ABC):
    """
    Seeded run loop shared by all algorithms.

    Subclasses build their population in `initialize` and advance it one
    iteration in `iterate`; both return the current population costs and
    keep `self.best` up to date.
    """

    name: str = ""

    def __init__(
        self,
        objective: Objective,
        space: SearchSpace,
        settings: RunSettings,
        initial_vector: Optional[np.ndarray] = None
    ):
        self.space = space
        self.settings = settings
        self.objective = CountingObjective(objective)
        self.rng = make_rng(settings.seed)
        self.initial_vector = (
            None if initial_vector is None
            else clamp_to_bounds(initial_vector, space)
        )
        self.best: Optional[Candidate] = None

    def initial_positions(self) -> np.ndarray:
        """Uniform population, optionally seeded with the reference vector"""
        positions = uniform_init(self.space, self.settings.population_size, self.rng)
        if self.settings.include_initial_vector and self.initial_vector is not None:
            positions[0] = self.initial_vector
        return positions

    def update_best(self, positions: np.ndarray, costs: np.ndarray) -> None:
        """Elitist best-so-far tracking; ties keep the lowest index"""
        i = int(np.argmin(costs))
        if self.best is None or costs[i] < self.best.cost:
            self.best = Candidate(positions[i].copy(), costs[i])

    @abstractmethod
    def initialize(self) -> np.ndarray:
        """Create and evaluate the initial population"""

    @abstractmethod
    def iterate(self, iteration: int) -> np.ndarray:
        """Advance one iteration"""

    def run(self) -> RunRecord:
        max_iter = self.settings.max_iter
        best_trace = np.empty(max_iter)
        mean_trace = np.empty(max_iter)

        costs = self.initialize()
        initial_best = self.best.cost
        initial_mean = float(np.mean(costs))
        logger.debug(f"{self.name} seed={self.settings.seed}: initial best {initial_best:.6g}")

        for t in range(max_iter):
            costs = self.iterate(t)
            best_trace[t] = self.best.cost
            mean_trace[t] = float(np.mean(costs))
            logger.debug(f"{self.name} iter {t}: best {best_trace[t]:.6g} mean {mean_trace[t]:.6g}")

        return RunRecord(
            algorithm=self.name,
            seed=self.settings.seed,
            best_cost=best_trace,
            mean_cost=mean_trace,
            best_position=self.best.position.copy(),
            evaluations=self.objective.evaluations,
            initial_best_cost=initial_best,
            initial_mean_cost=initial_mean,
        )
