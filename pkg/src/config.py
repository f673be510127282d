"""
Configuration management for the FEM updating benchmark

Runtime settings come from the environment (optionally a .env file);
benchmark settings come from a nested TOML file whose every key falls
back to the reference protocol defaults.
"""

import os
import tomllib
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from dotenv import find_dotenv, load_dotenv

from .exceptions import ConfigurationError, FemUpdatingError
from .fem.garteur import PARAMETER_NAMES, MeshSettings
from .optimizers.core import RunSettings, SearchSpace
from .optimizers.fss import FssSettings
from .optimizers.ga import GaSettings
from .optimizers.pso import PsoSettings

ALGORITHMS = ["fss", "fssb", "pso", "ga"]
PROBLEM_KINDS = ["garteur", "surrogate"]

MEASURED_HZ = [6.51, 16.37, 33.44, 33.97, 36.17, 49.41, 50.2, 55.61, 64.04, 69.39]

# (min, max, max |velocity|) per parameter
DEFAULT_BOUNDS = {
    "rho": (2000.0, 3000.0, 10.0),
    "vtp_imin": (7.3e-9, 9.8e-9, 0.05e-9),
    "l_imin": (7.3e-9, 9.8e-9, 0.05e-9),
    "l_imax": (7.3e-7, 9.8e-7, 0.05e-7),
    "l_itors": (3.0e-8, 5.5e-8, 0.05e-8),
    "r_imin": (7.3e-9, 9.8e-9, 0.05e-9),
    "r_imax": (7.3e-7, 9.8e-7, 0.05e-7),
    "r_itors": (3.0e-8, 5.5e-8, 0.05e-8),
}

# initial individual step amplitude per parameter
DEFAULT_STEP_IND = {
    "rho": 30.0,
    "vtp_imin": 0.08e-9,
    "l_imin": 0.08e-9,
    "l_imax": 0.08e-7,
    "l_itors": 0.08e-8,
    "r_imin": 0.08e-9,
    "r_imax": 0.08e-7,
    "r_itors": 0.08e-8,
}


class Config:
    """Application configuration"""

    def __init__(self):
        self._dotenv_loaded = False
        self._log_level: str = "INFO"
        self._workers: int = 1
        self._output_dir: str = "results"

    def _env(self, name: str, default: Optional[str] = None) -> Optional[str]:
        if not self._dotenv_loaded:
            load_dotenv(find_dotenv(usecwd=True))
            self._dotenv_loaded = True
        return os.getenv(name, default)

    @property
    def log_level(self) -> str:
        """Get logging level name"""
        return self._env("FEMU_LOG_LEVEL", self._log_level).upper()

    @property
    def workers(self) -> int:
        """Get number of worker processes for independent trials"""
        try:
            return int(self._env("FEMU_WORKERS", str(self._workers)))
        except ValueError as e:
            raise ConfigurationError(
                "FEMU_WORKERS must be an integer",
                details={"env_var": "FEMU_WORKERS", "error": str(e)}
            )

    @property
    def output_dir(self) -> Path:
        """Get default results directory"""
        return Path(self._env("FEMU_OUTPUT_DIR", self._output_dir))

    @property
    def config_file(self) -> Optional[Path]:
        """Get default benchmark config file, if any"""
        value = self._env("FEMU_CONFIG_FILE")
        return Path(value) if value else None

    @property
    def debug_mesh(self) -> bool:
        """Dump the mesh alongside model evaluations"""
        return self._env("FEMU_DEBUG_MESH", "0").lower() in ("1", "true", "yes")

    def validate(self) -> bool:
        """Validate configuration"""
        if self.log_level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ConfigurationError(
                "Invalid log level",
                details={"env_var": "FEMU_LOG_LEVEL", "value": self.log_level}
            )

        if self.workers < 1:
            raise ConfigurationError(
                "Worker count must be positive",
                details={"env_var": "FEMU_WORKERS", "value": self.workers}
            )

        config_file = self.config_file
        if config_file is not None and not config_file.is_file():
            raise ConfigurationError(
                "Config file not found",
                details={"env_var": "FEMU_CONFIG_FILE", "path": str(config_file)}
            )

        return True


@dataclass
class RunSection:
    population: int = 20
    max_iter: int = 500
    trials: int = 30
    seed: int = 1
    workers: int = 1
    include_initial_vector: bool = False


@dataclass
class ProblemSection:
    kind: str = "garteur"
    measured_hz: List[float] = field(default_factory=lambda: list(MEASURED_HZ))
    n_modes: int = 10
    truth_seed: int = 0


@dataclass
class BoundSection:
    min: float
    max: float
    max_velocity: float


@dataclass
class FssSection:
    step_ind_init: Dict[str, float] = field(default_factory=lambda: dict(DEFAULT_STEP_IND))
    step_ind_final_ratio: float = 0.1
    step_vol_init: float = 0.08
    step_vol_final: float = 0.06
    w_min: float = 1.0
    w_scale: float = 250.0
    beta_local: float = 1.5
    beta_global: float = 2.0
    beta_default: float = 1.0


@dataclass
class PsoSection:
    c1: float = 2.0
    c2: float = 2.0
    inertia_start: float = 1.0
    inertia_end: float = 0.0


@dataclass
class GaSection:
    mutation_rate: float = 0.2
    selection_rate: float = 0.5
    elite_count: int = 1
    blend_alpha: float = 0.5
    mutation_scale: float = 0.05


def _default_bounds() -> Dict[str, BoundSection]:
    return {name: BoundSection(*DEFAULT_BOUNDS[name]) for name in PARAMETER_NAMES}


def _section(cls, data: Dict[str, Any], name: str):
    """Build a dataclass section, rejecting unknown keys"""
    if not isinstance(data, dict):
        raise ConfigurationError(f"[{name}] must be a table", details={"section": name})
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigurationError(
            f"Unknown keys in [{name}]",
            details={"section": name, "keys": unknown}
        )
    try:
        return cls(**data)
    except FemUpdatingError as e:
        raise ConfigurationError(
            f"Invalid [{name}] settings: {e.message}",
            details={"section": name, **e.details}
        )
    except (TypeError, ValueError) as e:
        raise ConfigurationError(
            f"Invalid [{name}] settings: {str(e)}",
            details={"section": name, "error": str(e)}
        )


@dataclass
class BenchmarkConfig:
    """All benchmark settings; defaults reproduce the reference protocol"""
    run: RunSection = field(default_factory=RunSection)
    problem: ProblemSection = field(default_factory=ProblemSection)
    bounds: Dict[str, BoundSection] = field(default_factory=_default_bounds)
    fss: FssSection = field(default_factory=FssSection)
    pso: PsoSection = field(default_factory=PsoSection)
    ga: GaSection = field(default_factory=GaSection)
    mesh: MeshSettings = field(default_factory=MeshSettings)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.problem.kind not in PROBLEM_KINDS:
            raise ConfigurationError(
                "Unknown problem kind",
                details={"kind": self.problem.kind, "allowed": PROBLEM_KINDS}
            )
        missing = [name for name in PARAMETER_NAMES if name not in self.bounds]
        if missing:
            raise ConfigurationError("Bounds missing for parameters", details={"parameters": missing})
        missing = [name for name in PARAMETER_NAMES if name not in self.fss.step_ind_init]
        if missing:
            raise ConfigurationError("Individual steps missing for parameters", details={"parameters": missing})
        if self.run.trials < 1 or self.run.workers < 1:
            raise ConfigurationError(
                "Trials and workers must be positive",
                details={"trials": self.run.trials, "workers": self.run.workers}
            )

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'BenchmarkConfig':
        known = {"run", "problem", "bounds", "fss", "pso", "ga", "mesh"}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError("Unknown config sections", details={"sections": unknown})

        bounds = _default_bounds()
        for name, values in data.get("bounds", {}).items():
            if name not in bounds:
                raise ConfigurationError("Unknown parameter in [bounds]", details={"parameter": name})
            merged = asdict(bounds[name])
            merged.update(values)
            bounds[name] = _section(BoundSection, merged, f"bounds.{name}")

        fss_data = dict(data.get("fss", {}))
        steps = dict(DEFAULT_STEP_IND)
        steps.update(fss_data.pop("step_ind_init", {}))
        unknown_steps = sorted(set(steps) - set(PARAMETER_NAMES))
        if unknown_steps:
            raise ConfigurationError("Unknown parameter in [fss.step_ind_init]", details={"parameters": unknown_steps})
        fss_data["step_ind_init"] = steps

        return cls(
            run=_section(RunSection, data.get("run", {}), "run"),
            problem=_section(ProblemSection, data.get("problem", {}), "problem"),
            bounds=bounds,
            fss=_section(FssSection, fss_data, "fss"),
            pso=_section(PsoSection, data.get("pso", {}), "pso"),
            ga=_section(GaSection, data.get("ga", {}), "ga"),
            mesh=_section(MeshSettings, data.get("mesh", {}), "mesh"),
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def with_overrides(
        self,
        population: Optional[int] = None,
        max_iter: Optional[int] = None,
        trials: Optional[int] = None,
        seed: Optional[int] = None,
        workers: Optional[int] = None,
        kind: Optional[str] = None
    ) -> 'BenchmarkConfig':
        """Copy with command-line values layered over the file values"""
        run_overrides = {
            "population": population,
            "max_iter": max_iter,
            "trials": trials,
            "seed": seed,
            "workers": workers,
        }
        run = replace(self.run, **{k: v for k, v in run_overrides.items() if v is not None})
        problem = replace(self.problem, kind=kind) if kind is not None else self.problem
        return replace(self, run=run, problem=problem)

    def search_space(self) -> SearchSpace:
        """Position and velocity bounds in parameter order"""
        lo = np.array([self.bounds[n].min for n in PARAMETER_NAMES])
        hi = np.array([self.bounds[n].max for n in PARAMETER_NAMES])
        vmax = np.array([self.bounds[n].max_velocity for n in PARAMETER_NAMES])
        try:
            return SearchSpace(lo, hi, -vmax, vmax, names=list(PARAMETER_NAMES))
        except FemUpdatingError as e:
            raise ConfigurationError(f"Invalid bounds: {e.message}", details=e.details)

    def run_settings(self, seed: int) -> RunSettings:
        return RunSettings(
            population_size=self.run.population,
            max_iter=self.run.max_iter,
            seed=seed,
            include_initial_vector=self.run.include_initial_vector,
        )

    def fss_settings(self, biased: bool) -> FssSettings:
        f = self.fss
        return FssSettings.with_final_ratio(
            [f.step_ind_init[n] for n in PARAMETER_NAMES],
            final_ratio=f.step_ind_final_ratio,
            step_vol_init=f.step_vol_init,
            step_vol_final=f.step_vol_final,
            w_min=f.w_min,
            w_scale=f.w_scale,
            bias_enabled=biased,
            beta_local=f.beta_local,
            beta_global=f.beta_global,
            beta_default=f.beta_default,
        )

    def pso_settings(self) -> PsoSettings:
        return PsoSettings(**asdict(self.pso))

    def ga_settings(self) -> GaSettings:
        return GaSettings(**asdict(self.ga))


def load_benchmark_config(path: Optional[Path] = None) -> BenchmarkConfig:
    """Read a TOML config; no path means all defaults"""
    if path is None:
        return BenchmarkConfig()
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigurationError("Config file not found", details={"path": str(path)})
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationError(
            f"Config file is not valid TOML: {str(e)}",
            details={"path": str(path), "error": str(e)}
        )
    return BenchmarkConfig.from_dict(data)


# Global configuration instance
config = Config()
