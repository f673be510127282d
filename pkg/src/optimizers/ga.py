"""
Real-coded genetic algorithm

Truncation selection, blend crossover and Gaussian perturbation mutation
on the bounded parameter space, with elitism.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..exceptions import ValidationError
from .core import (
    Objective,
    Optimizer,
    RunSettings,
    SearchSpace,
    clamp_to_bounds,
)

logger = logging.getLogger(__name__)


@dataclass
class GaSettings:
    mutation_rate: float = 0.2
    selection_rate: float = 0.5
    elite_count: int = 1
    blend_alpha: float = 0.5
    mutation_scale: float = 0.05

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not 0.0 < self.selection_rate <= 1.0:
            raise ValidationError(
                "Selection rate must be in (0, 1]",
                details={"selection_rate": self.selection_rate}
            )
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValidationError(
                "Mutation rate must be in [0, 1]",
                details={"mutation_rate": self.mutation_rate}
            )
        if self.elite_count < 0:
            raise ValidationError(
                "Elite count cannot be negative",
                details={"elite_count": self.elite_count}
            )
        if self.blend_alpha < 0 or self.mutation_scale < 0:
            raise ValidationError(
                "Blend alpha and mutation scale must be non-negative",
                details={"blend_alpha": self.blend_alpha, "mutation_scale": self.mutation_scale}
            )


@dataclass
class Individual:
    chromosome: np.ndarray
    cost: float = math.inf


def sort_population(population: List[Individual]) -> List[Individual]:
    """Ascending cost, stable by index"""
    return sorted(population, key=lambda ind: ind.cost)


def select(population: List[Individual], selection_rate: float) -> List[Individual]:
    """Truncation selection: the best ceil(rate * N) individuals"""
    if not population:
        raise ValidationError("Cannot select from an empty population")
    size = max(1, math.ceil(selection_rate * len(population)))
    return sort_population(population)[:size]


def crossover(
    parent_a: Individual,
    parent_b: Individual,
    space: SearchSpace,
    rng: np.random.Generator,
    alpha: float = 0.5
) -> Tuple[Individual, Individual]:
    """
    Blend crossover with one factor u ~ U(-alpha, 1 + alpha) per gene.

    The first child is a + u (b - a), the second b + u (a - b).
    """
    a = parent_a.chromosome
    b = parent_b.chromosome
    u = rng.uniform(-alpha, 1.0 + alpha, size=space.dim)
    child_a = clamp_to_bounds(a + u * (b - a), space)
    child_b = clamp_to_bounds(b + u * (a - b), space)
    return Individual(child_a), Individual(child_b)


def mutate(
    individual: Individual,
    mutation_rate: float,
    space: SearchSpace,
    rng: np.random.Generator,
    scale: float = 0.05
) -> Individual:
    """Each gene perturbed with probability `mutation_rate` by N(0, scale * width)"""
    mask = rng.random(space.dim) < mutation_rate
    noise = rng.normal(0.0, 1.0, size=space.dim) * scale * space.amplitude
    chromosome = clamp_to_bounds(individual.chromosome + np.where(mask, noise, 0.0), space)
    return Individual(chromosome)


def ga_generation(
    population: List[Individual],
    settings: GaSettings,
    objective: Objective,
    space: SearchSpace,
    rng: np.random.Generator
) -> List[Individual]:
    """Elites carried over, the rest bred from the truncated pool and evaluated"""
    n = len(population)
    ranked = sort_population(population)
    elite_count = min(settings.elite_count, n)
    elites = [Individual(ind.chromosome.copy(), ind.cost) for ind in ranked[:elite_count]]
    pool = select(ranked, settings.selection_rate)

    children: List[Individual] = []
    while len(children) < n - elite_count:
        i, j = rng.integers(0, len(pool), size=2)
        for child in crossover(pool[i], pool[j], space, rng, settings.blend_alpha):
            if len(children) < n - elite_count:
                children.append(child)

    offspring = []
    for child in children:
        child = mutate(child, settings.mutation_rate, space, rng, settings.mutation_scale)
        offspring.append(Individual(child.chromosome, objective(child.chromosome)))

    return elites + offspring


class GeneticAlgorithm(Optimizer):
    name = "ga"

    def __init__(
        self,
        objective: Objective,
        space: SearchSpace,
        run_settings: RunSettings,
        ga_settings: GaSettings,
        initial_vector: Optional[np.ndarray] = None
    ):
        super().__init__(objective, space, run_settings, initial_vector)
        self.ga_settings = ga_settings
        self.population: List[Individual] = []

    def _costs(self) -> np.ndarray:
        return np.array([ind.cost for ind in self.population])

    def _chromosomes(self) -> np.ndarray:
        return np.array([ind.chromosome for ind in self.population])

    def initialize(self) -> np.ndarray:
        self.population = [
            Individual(x, self.objective(x)) for x in self.initial_positions()
        ]
        costs = self._costs()
        self.update_best(self._chromosomes(), costs)
        return costs

    def iterate(self, iteration: int) -> np.ndarray:
        self.population = ga_generation(
            self.population,
            self.ga_settings,
            self.objective,
            self.space,
            self.rng,
        )
        costs = self._costs()
        self.update_best(self._chromosomes(), costs)
        return costs
