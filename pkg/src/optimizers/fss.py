"""
Fish School Search

Individual, collective-instinctive and collective-volitive swimming with
weight-based feeding, plus the biased feeding variant (FSSb) that gives
extra weight gain to fish sitting on their own or the school's best.

Costs are minimized; a fish's fitness is the negated cost, so a positive
fitness delta means the error went down.
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np

from ..exceptions import ValidationError
from .core import (
    Candidate,
    Objective,
    Optimizer,
    RunSettings,
    SearchSpace,
    clamp_to_bounds,
    linear_schedule,
)

logger = logging.getLogger(__name__)


class FeedMode(str, Enum):
    PLAIN = "plain"
    BIASED = "biased"


@dataclass
class FssSettings:
    """Step schedules, weight scale and feeding bias"""
    step_ind_init: np.ndarray
    step_ind_final: np.ndarray
    step_vol_init: float = 0.08
    step_vol_final: float = 0.06
    w_min: float = 1.0
    w_scale: float = 250.0
    bias_enabled: bool = False
    beta_local: float = 1.5
    beta_global: float = 2.0
    beta_default: float = 1.0

    def __post_init__(self):
        self.step_ind_init = np.array(self.step_ind_init, dtype=float).reshape(-1)
        self.step_ind_final = np.array(self.step_ind_final, dtype=float).reshape(-1)
        self.validate()

    def validate(self) -> None:
        if self.step_ind_init.shape != self.step_ind_final.shape:
            raise ValidationError(
                "Individual step vectors have different lengths",
                details={
                    "step_ind_init": self.step_ind_init.size,
                    "step_ind_final": self.step_ind_final.size,
                }
            )
        if np.any(self.step_ind_final < 0) or np.any(self.step_ind_final > self.step_ind_init):
            raise ValidationError(
                "Individual step must decay: 0 <= step_ind_final <= step_ind_init",
                details={
                    "step_ind_init": self.step_ind_init.tolist(),
                    "step_ind_final": self.step_ind_final.tolist(),
                }
            )
        if not 0 <= self.step_vol_final <= self.step_vol_init:
            raise ValidationError(
                "Volitive step must decay: 0 <= step_vol_final <= step_vol_init",
                details={"step_vol_init": self.step_vol_init, "step_vol_final": self.step_vol_final}
            )
        if not 0 < self.w_min < self.w_scale:
            raise ValidationError(
                "Weight bounds must satisfy 0 < w_min < w_scale",
                details={"w_min": self.w_min, "w_scale": self.w_scale}
            )

    @classmethod
    def with_final_ratio(
        cls,
        step_ind_init: Sequence[float],
        final_ratio: float = 0.1,
        **kwargs
    ) -> 'FssSettings':
        """Individual step decaying to `final_ratio` of its initial amplitude"""
        init = np.array(step_ind_init, dtype=float)
        return cls(step_ind_init=init, step_ind_final=init * final_ratio, **kwargs)

    @property
    def feed_mode(self) -> FeedMode:
        return FeedMode.BIASED if self.bias_enabled else FeedMode.PLAIN


@dataclass
class Fish:
    """One fish: position, fitness, weight and its last individual move"""
    position: np.ndarray
    fitness: float
    weight: float
    last_displacement: np.ndarray
    last_fitness_delta: float = 0.0
    personal_best_fitness: Optional[float] = None

    def __post_init__(self):
        if self.personal_best_fitness is None:
            self.personal_best_fitness = self.fitness

    @property
    def cost(self) -> float:
        return -self.fitness

    @property
    def at_personal_best(self) -> bool:
        return self.fitness >= self.personal_best_fitness


@dataclass
class SchoolState:
    fish: List[Fish]
    barycenter: Optional[np.ndarray] = None
    total_weight_prev: float = 0.0
    total_weight_curr: float = 0.0
    global_best: Optional[Candidate] = None

    @property
    def positions(self) -> np.ndarray:
        return np.array([f.position for f in self.fish])

    @property
    def weights(self) -> np.ndarray:
        return np.array([f.weight for f in self.fish])

    @property
    def costs(self) -> np.ndarray:
        return np.array([f.cost for f in self.fish])

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weights))

    def refresh_global_best(self) -> None:
        """Keep the best-ever candidate; ties go to the lowest fish index"""
        costs = self.costs
        i = int(np.argmin(costs))
        if self.global_best is None or costs[i] < self.global_best.cost:
            self.global_best = Candidate(self.fish[i].position.copy(), costs[i])

    def global_best_holder(self) -> Optional[int]:
        """Index of the first fish whose current fitness is the best-ever fitness"""
        if self.global_best is None:
            return None
        best_fitness = -self.global_best.cost
        for i, f in enumerate(self.fish):
            if f.fitness == best_fitness:
                return i
        return None


def individual_movement(
    fish: Fish,
    step_ind_now: np.ndarray,
    objective: Objective,
    space: SearchSpace,
    rng: np.random.Generator
) -> Fish:
    """
    Greedy random step.

    The candidate x + U(-1, 1) * step is clamped and evaluated; the fish
    only moves if fitness strictly improves. A rejected move leaves a zero
    displacement and zero fitness delta.
    """
    step_ind_now = np.asarray(step_ind_now, dtype=float)
    if np.any(step_ind_now < 0):
        raise ValidationError(
            "Individual step must be non-negative",
            details={"step_ind": step_ind_now.tolist()}
        )

    r = rng.uniform(-1.0, 1.0, size=space.dim)
    candidate = clamp_to_bounds(fish.position + r * step_ind_now, space)
    candidate_fitness = -objective(candidate)

    if candidate_fitness > fish.fitness:
        return replace(
            fish,
            position=candidate,
            fitness=candidate_fitness,
            last_displacement=candidate - fish.position,
            last_fitness_delta=candidate_fitness - fish.fitness,
            personal_best_fitness=max(fish.personal_best_fitness, candidate_fitness),
        )

    return replace(
        fish,
        last_displacement=np.zeros(space.dim),
        last_fitness_delta=0.0,
    )


def feeding_factors(school: SchoolState, mode: FeedMode, settings: FssSettings) -> np.ndarray:
    """Per-fish multiplier on the normalized fitness gain"""
    n = len(school.fish)
    if mode == FeedMode.PLAIN:
        return np.ones(n)

    betas = np.full(n, settings.beta_default, dtype=float)
    for i, f in enumerate(school.fish):
        if f.at_personal_best:
            betas[i] = settings.beta_local
    holder = school.global_best_holder()
    if holder is not None:
        betas[holder] = settings.beta_global
    return betas


def feed(school: SchoolState, mode: FeedMode, settings: FssSettings) -> SchoolState:
    """
    Weight update w += beta * df / max|df|, clamped to [w_min, w_scale].

    Skipped entirely when no fish changed fitness.
    """
    deltas = np.array([f.last_fitness_delta for f in school.fish])
    max_delta = float(np.max(np.abs(deltas))) if deltas.size else 0.0
    if max_delta == 0.0:
        return school

    betas = feeding_factors(school, mode, settings)
    weights = school.weights + betas * deltas / max_delta
    weights = np.clip(weights, settings.w_min, settings.w_scale)

    fish = [replace(f, weight=float(w)) for f, w in zip(school.fish, weights)]
    return replace(school, fish=fish)


def instinctive_drift(school: SchoolState) -> np.ndarray:
    """Fitness-gain weighted average of the individual displacements"""
    deltas = np.array([f.last_fitness_delta for f in school.fish])
    total = float(np.sum(deltas))
    dim = school.fish[0].position.size
    if total == 0.0:
        return np.zeros(dim)
    displacements = np.array([f.last_displacement for f in school.fish])
    return (displacements * deltas[:, None]).sum(axis=0) / total


def collective_instinctive_movement(school: SchoolState, space: SearchSpace) -> SchoolState:
    """Shift every fish by the school's instinctive drift"""
    drift = instinctive_drift(school)
    if not np.any(drift):
        return school
    fish = [
        replace(f, position=clamp_to_bounds(f.position + drift, space))
        for f in school.fish
    ]
    return replace(school, fish=fish)


def compute_barycenter(school: SchoolState) -> np.ndarray:
    """Weight-averaged school position"""
    weights = school.weights
    return (school.positions * weights[:, None]).sum(axis=0) / np.sum(weights)


def collective_volitive_movement(
    school: SchoolState,
    step_vol_now: float,
    space: SearchSpace,
    rng: np.random.Generator
) -> SchoolState:
    """
    Contract toward the barycenter if the school gained weight, expand otherwise.

    `step_vol_now` is a fraction of each dimension's bound width. Distance
    to the barycenter is measured in bound-normalized coordinates, so the
    move is always along the line through the fish and the barycenter.
    A fish sitting on the barycenter does not move.
    """
    if school.barycenter is None:
        raise ValidationError("Barycenter must be computed before the volitive move")

    barycenter = school.barycenter
    amplitude = space.amplitude
    sign = -1.0 if school.total_weight_curr > school.total_weight_prev else 1.0

    fish = []
    for f in school.fish:
        r = rng.random()
        offset = f.position - barycenter
        dist = float(np.linalg.norm(offset / amplitude))
        if dist == 0.0:
            fish.append(f)
            continue
        position = f.position + sign * step_vol_now * r * offset / dist
        fish.append(replace(f, position=clamp_to_bounds(position, space)))
    return replace(school, fish=fish)


def init_school(
    positions: np.ndarray,
    objective: Objective,
    settings: FssSettings
) -> SchoolState:
    """All fish start at half the weight scale"""
    fish = []
    for x in positions:
        fitness = -objective(x)
        fish.append(Fish(
            position=np.array(x, dtype=float),
            fitness=fitness,
            weight=settings.w_scale / 2.0,
            last_displacement=np.zeros(x.size),
        ))
    school = SchoolState(fish=fish)
    school.total_weight_prev = school.total_weight_curr = school.total_weight
    school.refresh_global_best()
    return school


def fss_iteration(
    state: SchoolState,
    iteration: int,
    max_iter: int,
    settings: FssSettings,
    objective: Objective,
    space: SearchSpace,
    rng: np.random.Generator
) -> SchoolState:
    """
    One swim cycle: individual moves, feeding, instinctive drift,
    barycenter, volitive move, re-evaluation.
    """
    step_ind_now = linear_schedule(settings.step_ind_init, settings.step_ind_final, iteration, max_iter)
    step_vol_now = linear_schedule(settings.step_vol_init, settings.step_vol_final, iteration, max_iter)

    school = replace(state, fish=[
        individual_movement(f, step_ind_now, objective, space, rng)
        for f in state.fish
    ])
    school.refresh_global_best()

    weight_before = school.total_weight
    school = feed(school, settings.feed_mode, settings)
    school = replace(school, total_weight_prev=weight_before, total_weight_curr=school.total_weight)

    school = collective_instinctive_movement(school, space)
    school = replace(school, barycenter=compute_barycenter(school))
    school = collective_volitive_movement(school, step_vol_now, space, rng)

    fish = []
    for f in school.fish:
        fitness = -objective(f.position)
        fish.append(replace(
            f,
            fitness=fitness,
            personal_best_fitness=max(f.personal_best_fitness, fitness),
        ))
    school = replace(school, fish=fish)
    school.refresh_global_best()
    return school


class FishSchoolSearch(Optimizer):
    """FSS, or FSSb when `settings.bias_enabled`"""

    def __init__(
        self,
        objective: Objective,
        space: SearchSpace,
        run_settings: RunSettings,
        fss_settings: FssSettings,
        initial_vector: Optional[np.ndarray] = None
    ):
        super().__init__(objective, space, run_settings, initial_vector)
        if fss_settings.step_ind_init.size != space.dim:
            raise ValidationError(
                "Individual step vector does not match the search space",
                details={"expected": space.dim, "actual": fss_settings.step_ind_init.size}
            )
        self.fss_settings = fss_settings
        self.name = "fssb" if fss_settings.bias_enabled else "fss"
        self.school: Optional[SchoolState] = None

    def initialize(self) -> np.ndarray:
        self.school = init_school(self.initial_positions(), self.objective, self.fss_settings)
        self.best = self.school.global_best.copy()
        return self.school.costs

    def iterate(self, iteration: int) -> np.ndarray:
        self.school = fss_iteration(
            self.school,
            iteration,
            self.settings.max_iter,
            self.fss_settings,
            self.objective,
            self.space,
            self.rng,
        )
        self.best = self.school.global_best.copy()
        return self.school.costs
