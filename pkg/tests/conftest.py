"""Shared fixtures for the FEM updating test suite"""

from collections import deque
from typing import Iterable, Optional

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from src.config import BenchmarkConfig
from src.fem.garteur import MeshSettings
from src.models import UpdatingProblem
from src.optimizers.core import RunSettings, SearchSpace
from src.services.problem_service import garteur_problem


class FixedRng:
    """Generator stand-in returning scripted draws, in call order"""

    def __init__(self, uniform: Optional[Iterable] = None, random: Optional[Iterable] = None):
        self._uniform = deque(uniform or [])
        self._random = deque(random or [])

    def uniform(self, low=0.0, high=1.0, size=None):
        value = self._uniform.popleft()
        return np.asarray(value, dtype=float) if size is not None else float(value)

    def random(self, size=None):
        value = self._random.popleft()
        return np.asarray(value, dtype=float) if size is not None else float(value)


# randomized mini-runs (pop 5, 20 iterations) per optimizer invariant test
mini_runs = settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def sphere(x: np.ndarray) -> float:
    return float(np.sum(np.asarray(x) ** 2))


@pytest.fixture
def sphere_objective():
    return sphere


@pytest.fixture
def box_space() -> SearchSpace:
    """[-5, 5]^2 with velocity bound 1"""
    return SearchSpace(
        min_position=[-5.0, -5.0],
        max_position=[5.0, 5.0],
        min_velocity=[-1.0, -1.0],
        max_velocity=[1.0, 1.0],
    )


@pytest.fixture
def mini_run() -> RunSettings:
    return RunSettings(population_size=5, max_iter=20, seed=7)


@pytest.fixture
def small_bench() -> BenchmarkConfig:
    """Benchmark settings small enough to run the FEM objective in unit tests"""
    bench = BenchmarkConfig()
    bench.run.population = 4
    bench.run.max_iter = 3
    bench.run.trials = 2
    return bench


@pytest.fixture
def coarse_mesh() -> MeshSettings:
    return MeshSettings(
        fuselage_elements=6,
        wing_elements=6,
        vertical_tail_elements=2,
        horizontal_tail_elements=2,
    )


@pytest.fixture
def coarse_bench(small_bench, coarse_mesh) -> BenchmarkConfig:
    small_bench.mesh = coarse_mesh
    return small_bench


@pytest.fixture
def coarse_problem(coarse_bench) -> UpdatingProblem:
    """Measured-list problem on the coarse mesh"""
    return garteur_problem(coarse_bench)


@pytest.fixture
def coarse_config_file(tmp_path):
    """TOML config with the coarse mesh, for tool and CLI runs"""
    path = tmp_path / "coarse.toml"
    path.write_text(
        "[mesh]\n"
        "fuselage_elements = 6\n"
        "wing_elements = 6\n"
        "vertical_tail_elements = 2\n"
        "horizontal_tail_elements = 2\n"
    )
    return path
