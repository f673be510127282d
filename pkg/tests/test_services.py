"""Tests for the problem and benchmark services"""

import importlib
import json

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.config import MEASURED_HZ, BenchmarkConfig
from src.exceptions import (
    ConfigurationError,
    DimensionMismatchError,
    EigenSolveError,
    ObjectiveEvaluationError,
    TrialError,
    ValidationError,
)
from src.fem.garteur import ParameterVector
from src.models import UpdatingProblem
from src.services.benchmark_service import BenchmarkService, run_trial
from src.services.problem_service import (
    FemObjective,
    ProblemService,
    make_objective,
    per_mode_errors,
    run_surrogate,
    total_error_percent,
)

benchmark_module = importlib.import_module("src.services.benchmark_service")

INITIAL_HZ = [5.726, 15.338, 32.457, 35.323, 36.020, 44.992, 54.685, 55.753, 60.021, 68.745]
GA_HZ = [6.247, 16.22, 33.086, 34.949, 36.284, 49.05, 53.964, 54.603, 63.695, 70.326]
PSO_HZ = [6.237, 16.495, 33.306, 34.154, 35.908, 48.839, 52.938, 55.512, 64.16, 68.922]
FSS_HZ = [6.232, 16.489, 33.278, 34.127, 35.896, 48.799, 52.903, 55.574, 64.130, 68.868]
FSSB_ERRORS = [4.396, 0.651, 0.269, 0.742, 0.678, 1.377, 5.248, 0.012, 0.043, 0.859]


class ModesUnavailable(FemObjective):
    """Cheap stand-in cost; the frame model itself never solves"""

    def __call__(self, x):
        self.evaluations += 1
        return float(np.sum(x / self.problem.search_space.max_position))

    def frequencies(self, x):
        raise EigenSolveError("Not enough elastic modes", details={"requested": self.problem.n_modes})


class TestTotalError:
    def test_identity(self):
        assert total_error_percent(MEASURED_HZ, MEASURED_HZ) == 0.0

    @pytest.mark.parametrize("model, expected", [
        (INITIAL_HZ, 51.024),
        (PSO_HZ, 14.272),
        (FSS_HZ, 14.277),
    ])
    def test_reference_totals(self, model, expected):
        assert total_error_percent(MEASURED_HZ, model) == pytest.approx(expected, abs=0.005)

    def test_reference_ga_total(self):
        # two GA frequencies are printed with only two decimals
        assert total_error_percent(MEASURED_HZ, GA_HZ) == pytest.approx(21.132, abs=0.01)

    def test_reference_fssb_total_from_mode_errors(self):
        model = np.asarray(MEASURED_HZ) * (1.0 - np.array(FSSB_ERRORS) / 100.0)
        assert total_error_percent(MEASURED_HZ, model) == pytest.approx(14.275, abs=0.005)

    def test_per_mode_values(self):
        errors = per_mode_errors(MEASURED_HZ, INITIAL_HZ)
        assert errors[0] == pytest.approx(100.0 * abs(6.51 - 5.726) / 6.51)
        assert errors[0] == pytest.approx(12.043, abs=5e-4)
        assert errors[7] == pytest.approx(100.0 * abs(MEASURED_HZ[7] - INITIAL_HZ[7]) / MEASURED_HZ[7])

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            total_error_percent(MEASURED_HZ, MEASURED_HZ[:9])

    def test_non_positive_measured(self):
        with pytest.raises(ValidationError):
            total_error_percent([0.0, 1.0], [1.0, 1.0])

    @given(st.lists(st.floats(0.1, 1000.0), min_size=1, max_size=10),
           st.floats(-50.0, 50.0))
    def test_non_negative_and_zero_only_on_match(self, measured, shift):
        model = np.asarray(measured) + shift
        cost = total_error_percent(measured, model)
        assert cost >= 0.0
        assert (cost == 0.0) == bool(np.all(model == np.asarray(measured)))


class TestUpdatingProblem:
    def test_measured_length_must_match(self, coarse_problem):
        with pytest.raises(DimensionMismatchError):
            UpdatingProblem(MEASURED_HZ[:9], coarse_problem.search_space)

    def test_measured_must_ascend(self, coarse_problem):
        with pytest.raises(ValidationError):
            UpdatingProblem(list(reversed(MEASURED_HZ)), coarse_problem.search_space)

    def test_dict_round_trip(self, coarse_problem):
        restored = UpdatingProblem.from_dict(json.loads(json.dumps(coarse_problem.to_dict())))
        npt.assert_array_equal(restored.measured_hz, coarse_problem.measured_hz)
        assert restored.mesh == coarse_problem.mesh
        assert restored.initial_vector == coarse_problem.initial_vector


class TestObjective:
    def test_pure(self, coarse_problem):
        objective = make_objective(coarse_problem)
        x = ParameterVector.initial().to_array()
        assert objective(x) == objective(x)
        assert objective.evaluations == 2

    def test_finite_inside_bounds(self, coarse_problem):
        objective = make_objective(coarse_problem)
        space = coarse_problem.search_space
        for x in np.random.default_rng(8).uniform(space.min_position, space.max_position, size=(3, 8)):
            cost = objective(x)
            assert np.isfinite(cost) and cost >= 0.0

    def test_failure_carries_parameters(self, coarse_problem):
        with pytest.raises(ObjectiveEvaluationError) as exc:
            make_objective(coarse_problem)(np.full(8, -1.0))
        assert exc.value.details["parameters"] == [-1.0] * 8


class TestSurrogate:
    def test_truth_has_zero_cost(self, coarse_problem):
        problem = run_surrogate(coarse_problem, truth_seed=3)
        assert problem.search_space.contains(problem.truth_vector.to_array())
        assert make_objective(problem)(problem.truth_vector.to_array()) < 1e-9

    def test_initial_vector_is_off(self, coarse_problem):
        problem = run_surrogate(coarse_problem, truth_seed=3)
        assert make_objective(problem)(ParameterVector.initial().to_array()) > 0.0

    def test_deterministic(self, coarse_problem):
        a = run_surrogate(coarse_problem, truth_seed=11)
        b = run_surrogate(coarse_problem, truth_seed=11)
        assert a.truth_vector == b.truth_vector
        npt.assert_array_equal(a.measured_hz, b.measured_hz)

    def test_built_from_config(self, coarse_bench):
        coarse_bench.problem.kind = "surrogate"
        problem = ProblemService.build_problem(coarse_bench)
        assert problem.name == "surrogate"
        assert problem.truth_vector is not None


class TestProblemService:
    def test_evaluate_nominal(self, coarse_problem):
        report = ProblemService.evaluate(coarse_problem)
        assert report.rigid_mode_count == 6
        assert report.total_error == pytest.approx(report.mode_errors.sum())
        assert report.parameters == ParameterVector.initial()

    def test_format_report(self, coarse_problem):
        text = ProblemService.format_report(ProblemService.evaluate(coarse_problem))
        assert text.splitlines()[-1].startswith("Total error:")
        assert len(text.splitlines()) == 12

    def test_format_problem_lists_parameters(self, coarse_problem):
        text = ProblemService.format_problem(coarse_problem)
        assert "r_itors" in text and "6.510" in text

    def test_load_json_table(self, tmp_path):
        path = tmp_path / "p.json"
        path.write_text(json.dumps(ParameterVector.initial().to_dict()))
        assert ProblemService.load_parameters(path) == ParameterVector.initial()

    def test_load_json_list(self, tmp_path):
        path = tmp_path / "p.json"
        path.write_text(json.dumps(ParameterVector.initial().to_array().tolist()))
        assert ProblemService.load_parameters(path) == ParameterVector.initial()

    def test_load_toml(self, tmp_path):
        path = tmp_path / "p.toml"
        path.write_text("\n".join(f"{k} = {v!r}" for k, v in ParameterVector.initial().to_dict().items()))
        assert ProblemService.load_parameters(path) == ParameterVector.initial()

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            ProblemService.load_parameters(tmp_path / "nope.json")

    def test_missing_value(self, tmp_path):
        path = tmp_path / "p.json"
        path.write_text(json.dumps({"rho": 2700.0}))
        with pytest.raises(ValidationError):
            ProblemService.load_parameters(path)


class TestRunTrial:
    @pytest.mark.parametrize("algo", ["fss", "fssb", "pso", "ga"])
    def test_record_contract(self, coarse_problem, coarse_bench, algo):
        record = run_trial(algo, coarse_problem, coarse_bench, seed=3)
        assert record.algorithm == algo
        assert record.max_iter == coarse_bench.run.max_iter
        assert record.final_cost <= record.initial_best_cost
        assert make_objective(coarse_problem)(record.best_position) == record.final_cost

    def test_same_seed_same_record(self, coarse_problem, coarse_bench):
        a = run_trial("fssb", coarse_problem, coarse_bench, seed=5)
        b = run_trial("fssb", coarse_problem, coarse_bench, seed=5)
        assert a.to_dict() == b.to_dict()

    def test_record_carries_model_frequencies(self, coarse_problem, coarse_bench):
        record = run_trial("pso", coarse_problem, coarse_bench, seed=2)
        expected = make_objective(coarse_problem).frequencies(record.best_position).frequencies_hz
        npt.assert_array_equal(record.best_model_hz, expected)
        assert record.to_dict()["best_model_hz"] == expected.tolist()

    def test_model_failure_at_best_position_is_a_trial_error(self, coarse_problem, coarse_bench, monkeypatch):
        monkeypatch.setattr(benchmark_module, "make_objective", ModesUnavailable)
        with pytest.raises(TrialError) as exc:
            run_trial("ga", coarse_problem, coarse_bench, seed=4)
        assert exc.value.details["seed"] == 4
        assert exc.value.details["requested"] == coarse_problem.n_modes

    def test_unknown_algorithm(self, coarse_problem, coarse_bench):
        with pytest.raises(ValidationError):
            run_trial("sa", coarse_problem, coarse_bench)


class TestBenchmark:
    def test_default_seeds(self):
        assert BenchmarkService.resolve_seeds(3, first_seed=1) == [1, 2, 3]

    def test_duplicate_seeds(self):
        with pytest.raises(ValidationError):
            BenchmarkService.resolve_seeds(2, [4, 4])

    def test_seed_count_mismatch(self):
        with pytest.raises(ValidationError):
            BenchmarkService.resolve_seeds(3, [1, 2])

    def test_unknown_algorithm(self, coarse_problem, coarse_bench):
        with pytest.raises(ValidationError):
            BenchmarkService.run_benchmark(coarse_problem, ["fss", "de"], 1, bench=coarse_bench)

    def test_single_trial_is_the_record(self, coarse_problem, coarse_bench):
        summary = BenchmarkService.run_benchmark(coarse_problem, ["ga"], 1, bench=coarse_bench)
        stats = summary.algorithms["ga"]
        record = summary.records_for("ga")[0]
        assert stats.mean_final_cost == record.final_cost
        assert stats.std_final_cost == 0.0
        assert stats.mean_best_trace == record.best_cost.tolist()
        assert list(stats.mean_parameters.values()) == record.best_position.tolist()
        assert stats.mean_plateau_iteration == record.plateau_iteration()
        assert stats.mean_model_hz == record.best_model_hz.tolist()

    def test_pure_function_of_seeds(self, coarse_problem, coarse_bench):
        a = BenchmarkService.run_benchmark(coarse_problem, ["pso"], 2, bench=coarse_bench)
        b = BenchmarkService.run_benchmark(coarse_problem, ["pso"], 2, bench=coarse_bench)
        assert a.algorithms["pso"].to_dict() == b.algorithms["pso"].to_dict()
        assert [r.seed for r in a.records] == [1, 2]

    def test_failed_trial_is_excluded(self, coarse_problem, coarse_bench, monkeypatch):
        real = benchmark_module.run_trial

        def flaky(algo, problem, bench, seed):
            if seed == 2:
                raise TrialError("solver blew up", details={"seed": seed})
            return real(algo, problem, bench, seed)

        monkeypatch.setattr(benchmark_module, "run_trial", flaky)
        summary = BenchmarkService.run_benchmark(coarse_problem, ["fss"], 2, bench=coarse_bench)
        stats = summary.algorithms["fss"]
        assert stats.trials_completed == 1
        assert stats.failed_seeds == [2]
        assert [f.seed for f in summary.failures] == [2]
        assert "1 trial(s) failed" in BenchmarkService.format_summary(summary)

    def test_model_failure_after_search_is_excluded(self, coarse_problem, coarse_bench, monkeypatch):
        monkeypatch.setattr(benchmark_module, "make_objective", ModesUnavailable)
        summary = BenchmarkService.run_benchmark(coarse_problem, ["fss", "pso"], 2, bench=coarse_bench)
        assert summary.algorithms == {}
        assert [(f.algorithm, f.seed) for f in summary.failures] == [("fss", 1), ("fss", 2), ("pso", 1), ("pso", 2)]

    def test_all_failed_algorithm_is_omitted(self, coarse_problem, coarse_bench, monkeypatch):
        def broken(algo, problem, bench, seed):
            raise TrialError("always fails")

        monkeypatch.setattr(benchmark_module, "run_trial", broken)
        summary = BenchmarkService.run_benchmark(coarse_problem, ["ga"], 2, bench=coarse_bench)
        assert summary.algorithms == {}
        assert len(summary.failures) == 2
        assert BenchmarkService.format_summary(summary).startswith("No completed trials")

    def test_ranking_orders_by_mean_cost(self, coarse_problem, coarse_bench):
        summary = BenchmarkService.run_benchmark(coarse_problem, ["ga", "pso"], 1, bench=coarse_bench)
        costs = [summary.algorithms[name].mean_final_cost for name in summary.ranking()]
        assert costs == sorted(costs)


def test_default_config_reproduces_protocol():
    bench = BenchmarkConfig()
    assert (bench.run.population, bench.run.max_iter, bench.run.trials) == (20, 500, 30)
