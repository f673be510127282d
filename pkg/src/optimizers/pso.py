"""
Inertia-weight particle swarm optimization

Synchronous swarm: every particle moves using the global best from the
previous iteration, then all are evaluated and the bests refreshed.
"""

import logging
from dataclasses import dataclass, replace
from typing import List, Optional

import numpy as np

from ..exceptions import ValidationError
from .core import (
    Candidate,
    Objective,
    Optimizer,
    RunSettings,
    SearchSpace,
    clamp_to_bounds,
    clamp_velocity,
    linear_schedule,
)

logger = logging.getLogger(__name__)


@dataclass
class PsoSettings:
    """Acceleration coefficients and inertia schedule endpoints"""
    c1: float = 2.0
    c2: float = 2.0
    inertia_start: float = 1.0
    inertia_end: float = 0.0

    def __post_init__(self):
        if self.c1 < 0 or self.c2 < 0:
            raise ValidationError(
                "Acceleration coefficients must be non-negative",
                details={"c1": self.c1, "c2": self.c2}
            )


@dataclass
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    best_position: np.ndarray
    best_cost: float
    cost: float

    def refresh_personal_best(self) -> 'Particle':
        if self.cost < self.best_cost:
            return replace(self, best_position=self.position.copy(), best_cost=self.cost)
        return self


@dataclass
class SwarmState:
    particles: List[Particle]
    global_best: Optional[Candidate] = None

    @property
    def costs(self) -> np.ndarray:
        return np.array([p.cost for p in self.particles])

    def refresh_global_best(self) -> None:
        """Global best is the minimum over personal bests"""
        best_costs = np.array([p.best_cost for p in self.particles])
        i = int(np.argmin(best_costs))
        if self.global_best is None or best_costs[i] < self.global_best.cost:
            self.global_best = Candidate(self.particles[i].best_position.copy(), best_costs[i])


def inertia_weight(iteration: int, max_iter: int, start: float = 1.0, end: float = 0.0) -> float:
    """(max_iter - iter) / max_iter with the default endpoints"""
    return float(linear_schedule(start, end, iteration, max_iter))


def update_velocity(
    particle: Particle,
    global_best: np.ndarray,
    w: float,
    settings: PsoSettings,
    space: SearchSpace,
    rng: np.random.Generator
) -> np.ndarray:
    """v = w v + c1 r1 (p - x) + c2 r2 (g - x), clamped to the velocity bounds"""
    r1 = rng.random(space.dim)
    r2 = rng.random(space.dim)
    x = particle.position
    velocity = (
        w * particle.velocity
        + settings.c1 * r1 * (particle.best_position - x)
        + settings.c2 * r2 * (global_best - x)
    )
    return clamp_velocity(velocity, space)


def update_position(particle: Particle, space: SearchSpace) -> np.ndarray:
    return clamp_to_bounds(particle.position + particle.velocity, space)


def init_swarm(
    positions: np.ndarray,
    space: SearchSpace,
    objective: Objective,
    rng: np.random.Generator
) -> SwarmState:
    """Velocities drawn uniformly inside the velocity bounds (zero if unbounded)"""
    n = positions.shape[0]
    if space.has_velocity_bounds:
        velocities = rng.uniform(space.min_velocity, space.max_velocity, size=(n, space.dim))
    else:
        velocities = np.zeros((n, space.dim))

    particles = []
    for x, v in zip(positions, velocities):
        cost = objective(x)
        particles.append(Particle(
            position=np.array(x, dtype=float),
            velocity=v,
            best_position=np.array(x, dtype=float),
            best_cost=cost,
            cost=cost,
        ))
    swarm = SwarmState(particles=particles)
    swarm.refresh_global_best()
    return swarm


def pso_iteration(
    swarm: SwarmState,
    iteration: int,
    max_iter: int,
    settings: PsoSettings,
    objective: Objective,
    space: SearchSpace,
    rng: np.random.Generator
) -> SwarmState:
    w = inertia_weight(iteration, max_iter, settings.inertia_start, settings.inertia_end)
    global_best = swarm.global_best.position

    moved = []
    for p in swarm.particles:
        p = replace(p, velocity=update_velocity(p, global_best, w, settings, space, rng))
        p = replace(p, position=update_position(p, space))
        moved.append(p)

    particles = [
        replace(p, cost=objective(p.position)).refresh_personal_best()
        for p in moved
    ]
    swarm = replace(swarm, particles=particles)
    swarm.refresh_global_best()
    return swarm


class ParticleSwarm(Optimizer):
    name = "pso"

    def __init__(
        self,
        objective: Objective,
        space: SearchSpace,
        run_settings: RunSettings,
        pso_settings: PsoSettings,
        initial_vector: Optional[np.ndarray] = None
    ):
        super().__init__(objective, space, run_settings, initial_vector)
        self.pso_settings = pso_settings
        self.swarm: Optional[SwarmState] = None

    def initialize(self) -> np.ndarray:
        self.swarm = init_swarm(self.initial_positions(), self.space, self.objective, self.rng)
        self.best = self.swarm.global_best.copy()
        return self.swarm.costs

    def iterate(self, iteration: int) -> np.ndarray:
        self.swarm = pso_iteration(
            self.swarm,
            iteration,
            self.settings.max_iter,
            self.pso_settings,
            self.objective,
            self.space,
            self.rng,
        )
        self.best = self.swarm.global_best.copy()
        return self.swarm.costs
