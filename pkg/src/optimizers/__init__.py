"""Bounded continuous optimizers: FSS/FSSb, inertia-weight PSO and a real-coded GA"""

from .core import (
    Candidate,
    RunRecord,
    RunSettings,
    SearchSpace,
    clamp_to_bounds,
    linear_schedule,
    uniform_init,
)
from .fss import FishSchoolSearch, FssSettings
from .ga import GaSettings, GeneticAlgorithm
from .pso import ParticleSwarm, PsoSettings

__all__ = [
    'Candidate', 'RunRecord', 'RunSettings', 'SearchSpace',
    'clamp_to_bounds', 'linear_schedule', 'uniform_init',
    'FishSchoolSearch', 'FssSettings',
    'GaSettings', 'GeneticAlgorithm',
    'ParticleSwarm', 'PsoSettings',
]
