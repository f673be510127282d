"""End-to-end runs through the command line entry point"""

import json

import numpy as np
import pandas as pd
import pytest

from src.cli import EXIT_OK, EXIT_USAGE, main
from src.config import BenchmarkConfig
from src.fem.garteur import ParameterVector
from src.models import BenchmarkSummary
from src.services.benchmark_service import BenchmarkService
from src.services.problem_service import ProblemService


class TestEvalCommand:
    def test_nominal(self, coarse_config_file, capsys):
        assert main(["eval", "--config", str(coarse_config_file)]) == EXIT_OK
        out = capsys.readouterr().out
        assert "Total error:" in out

    def test_params_file_and_mesh_dump(self, coarse_config_file, tmp_path, capsys):
        params = tmp_path / "params.json"
        params.write_text(json.dumps(ParameterVector.initial().to_dict()))
        code = main(["eval", "--config", str(coarse_config_file), "--params", str(params), "--dump-mesh"])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        mesh = json.loads(out[out.index("{"):])
        assert mesh["ndof"] == 6 * len(mesh["nodes"])

    def test_bad_params_file(self, coarse_config_file, tmp_path):
        params = tmp_path / "params.json"
        params.write_text("[1.0, 2.0]")
        assert main(["eval", "--config", str(coarse_config_file), "--params", str(params)]) == EXIT_USAGE

    def test_missing_config(self, tmp_path):
        assert main(["eval", "--config", str(tmp_path / "absent.toml")]) == EXIT_USAGE

    def test_unknown_algorithm_is_a_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["run", "--algo", "sa"])
        assert exc.value.code == 2


class TestRunCommand:
    def test_single_algorithm(self, coarse_config_file, tmp_path, capsys):
        out = tmp_path / "out"
        code = main([
            "run", "--algo", "pso", "--trials", "2", "--iters", "3", "--pop", "4",
            "--config", str(coarse_config_file), "--out", str(out),
        ])
        assert code == EXIT_OK
        trace = pd.read_csv(out / "trace.csv")
        assert len(trace) == 2 * 3
        assert set(trace["seed"]) == {1, 2}
        assert "pso" in capsys.readouterr().out

    def test_all_algorithms_on_surrogate(self, coarse_config_file, tmp_path):
        out = tmp_path / "out"
        code = main([
            "run", "--algo", "all", "--trials", "2", "--iters", "3", "--pop", "4",
            "--problem", "surrogate", "--config", str(coarse_config_file),
            "--out", str(out), "--zoom-from", "1",
        ])
        assert code == EXIT_OK
        assert len(pd.read_csv(out / "trace.csv")) == 4 * 2 * 3
        assert len(pd.read_csv(out / "trace_zoom.csv")) == 4 * 2 * 2

        summary = BenchmarkSummary.from_dict(json.loads((out / "summary.json").read_text()))
        assert set(summary.algorithms) == {"fss", "fssb", "pso", "ga"}
        assert summary.problem.truth_vector is not None

        params = pd.read_csv(out / "params.csv")
        assert params["label"].tolist() == ["initial", "truth", "fss", "fssb", "pso", "ga"]

    def test_reruns_are_identical(self, coarse_config_file, tmp_path):
        args = ["run", "--algo", "fssb", "--trials", "2", "--iters", "3", "--pop", "4",
                "--config", str(coarse_config_file)]
        assert main([*args, "--out", str(tmp_path / "a")]) == EXIT_OK
        assert main([*args, "--out", str(tmp_path / "b")]) == EXIT_OK
        assert (tmp_path / "a" / "trace.csv").read_bytes() == (tmp_path / "b" / "trace.csv").read_bytes()

    def test_worker_pool_matches_serial(self, coarse_config_file, tmp_path):
        args = ["run", "--algo", "ga", "--trials", "2", "--iters", "2", "--pop", "4",
                "--config", str(coarse_config_file)]
        assert main([*args, "--workers", "1", "--out", str(tmp_path / "serial")]) == EXIT_OK
        assert main([*args, "--workers", "2", "--out", str(tmp_path / "pool")]) == EXIT_OK
        serial = (tmp_path / "serial" / "trace.csv").read_bytes()
        assert serial == (tmp_path / "pool" / "trace.csv").read_bytes()


@pytest.fixture(scope="module")
def surrogate_benchmark():
    """Full protocol on the surrogate problem"""
    bench = BenchmarkConfig().with_overrides(kind="surrogate")
    problem = ProblemService.build_problem(bench)
    return BenchmarkService.run_benchmark(problem, ["fss", "fssb", "pso", "ga"], 30, bench=bench, workers=4)


@pytest.mark.slow
def test_swarm_methods_beat_ga(surrogate_benchmark):
    stats = surrogate_benchmark.algorithms
    for name in ("pso", "fss", "fssb"):
        assert stats[name].mean_final_cost < stats["ga"].mean_final_cost


@pytest.mark.slow
@pytest.mark.parametrize("algo", ["fss", "fssb", "pso", "ga"])
def test_final_cost_below_fifth_of_initial(surrogate_benchmark, algo):
    stats = surrogate_benchmark.algorithms[algo]
    assert stats.trials_completed == 30
    assert stats.mean_final_cost / stats.mean_initial_cost < 0.2


@pytest.mark.slow
@pytest.mark.parametrize("algo", ["fss", "fssb"])
def test_fish_schools_plateau_early(surrogate_benchmark, algo):
    stats = surrogate_benchmark.algorithms[algo]
    trace = np.array(stats.mean_best_trace)
    assert np.flatnonzero(trace <= 1.05 * trace[-1])[0] <= 100
    assert stats.mean_plateau_iteration <= 100


@pytest.mark.slow
def test_ga_descends_faster_at_first(surrogate_benchmark):
    ga = np.array(surrogate_benchmark.algorithms["ga"].mean_best_trace)
    fss = np.array(surrogate_benchmark.algorithms["fss"].mean_best_trace)
    assert ga[0] - ga[9] > fss[0] - fss[9]


@pytest.mark.slow
def test_fss_improves_on_measured_list():
    bench = BenchmarkConfig()
    problem = ProblemService.build_problem(bench)
    summary = BenchmarkService.run_benchmark(problem, ["fss"], 1, bench=bench)
    record = summary.records_for("fss")[0]
    assert record.final_cost < record.initial_best_cost
