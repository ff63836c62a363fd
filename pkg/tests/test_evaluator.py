"""Measurement policies, command building, real subprocess path, mock objectives."""

import math

import pytest

from pragmatune.evaluator import (
    CLIFF_PENALTY,
    COMPILE_ERROR,
    OK,
    RUN_ERROR,
    TIMEOUT,
    BadCommandTemplate,
    InvalidPolicy,
    Measurement,
    MeasurementPolicy,
    UnknownObjective,
    aggregate,
    build_command,
    evaluate,
    mock_evaluate,
    mock_objective_value,
    parse_objective,
)
from pragmatune.space import INACTIVE, enumerate_space, resolve_activity
from conftest import StubProblem, mixed_space, ordinal_only_space, toy_parent_child_space


def tiny_problem(**overrides) -> StubProblem:
    space = ordinal_only_space(k=3)
    return StubProblem(space=space, **overrides)


def any_config(space):
    return enumerate_space(space, limit=10_000)[0]


# ---- aggregation and parsing ----------------------------------------------


def test_aggregate_min_mean_median():
    runs = [0.3, 0.1, 0.2]
    assert aggregate(runs, "min") == 0.1
    assert aggregate(runs, "mean") == pytest.approx(0.2)
    assert aggregate(runs, "median") == 0.2
    assert aggregate([0.1, 0.2, 0.3, 0.4], "median") == pytest.approx(0.25)


def test_parse_objective_takes_last_number():
    assert parse_objective("a\n0.5\n0.123\n") == 0.123
    assert parse_objective("checksum 42 elapsed 0.25") == 0.25
    assert parse_objective("rate 1.5e-3") == pytest.approx(0.0015)
    assert parse_objective("no numeric content") is None
    assert parse_objective("") is None


def test_policy_validation():
    with pytest.raises(InvalidPolicy):
        MeasurementPolicy(repeats=0)
    with pytest.raises(InvalidPolicy):
        MeasurementPolicy(aggregation="max")
    with pytest.raises(InvalidPolicy):
        MeasurementPolicy(timeout_sec=0.0)
    with pytest.raises(InvalidPolicy):
        MeasurementPolicy(timeout_sec=math.inf)
    with pytest.raises(InvalidPolicy):
        MeasurementPolicy(objective_source="rdtsc")


def test_measurement_objective_presence_matches_status():
    with pytest.raises(Exception):
        Measurement(objective=None, runs=(), elapsed=0.0, status=OK)
    with pytest.raises(Exception):
        Measurement(objective=1.0, runs=(1.0,), elapsed=0.0, status=RUN_ERROR)
    with pytest.raises(Exception):
        Measurement(objective=1.0, runs=(1.0,), elapsed=0.0, status="exploded")


def test_build_command_substitutes_then_splits():
    argv = build_command(
        "cc {flags} {src} -o {bin}",
        {"flags": "-O2 -g", "src": "a.c", "bin": "a.out"},
    )
    assert argv == ["cc", "-O2", "-g", "a.c", "-o", "a.out"]


def test_build_command_rejects_empty_result():
    with pytest.raises(BadCommandTemplate):
        build_command("{flags}", {"flags": ""})


# ---- real evaluation path (no C compiler needed: cp + python3) -------------


def test_evaluate_ok_parses_stdout_and_repeats(tmp_path):
    problem = tiny_problem()
    policy = MeasurementPolicy(repeats=3, aggregation="min", timeout_sec=30.0)
    script = 'print("warmup text")\nprint(0.125)\n'
    result = evaluate(problem, script, any_config(problem.space), tmp_path, policy)
    assert result.status == OK
    assert result.runs == (0.125, 0.125, 0.125)
    assert result.objective == 0.125
    assert result.elapsed > 0.0
    assert (tmp_path / "source.c").read_text(encoding="utf-8") == script


def test_evaluate_accepts_a_relative_workdir(tmp_path, monkeypatch):
    # commands run with cwd=workdir, so {src}/{bin} must not keep the
    # caller-relative prefix
    monkeypatch.chdir(tmp_path)
    problem = tiny_problem()
    policy = MeasurementPolicy(repeats=1, timeout_sec=30.0)
    script = 'print(0.25)\n'
    result = evaluate(problem, script, any_config(problem.space), "nested/work", policy)
    assert result.status == OK
    assert result.objective == 0.25
    assert (tmp_path / "nested" / "work" / "source.c").exists()


def test_evaluate_compile_failure_captures_stderr(tmp_path):
    problem = tiny_problem(compile_template="cp {src}")  # missing destination
    policy = MeasurementPolicy(repeats=1, timeout_sec=30.0)
    result = evaluate(problem, "x", any_config(problem.space), tmp_path, policy)
    assert result.status == COMPILE_ERROR
    assert result.objective is None
    assert result.detail != ""


def test_evaluate_unlaunchable_compiler_is_compile_error(tmp_path):
    problem = tiny_problem(compile_template="/nonexistent/compiler {src} {bin}")
    policy = MeasurementPolicy(repeats=1, timeout_sec=30.0)
    result = evaluate(problem, "x", any_config(problem.space), tmp_path, policy)
    assert result.status == COMPILE_ERROR
    assert "launch" in result.detail


def test_evaluate_nonzero_exit_is_run_error(tmp_path):
    problem = tiny_problem()
    policy = MeasurementPolicy(repeats=2, timeout_sec=30.0)
    script = "import sys\nsys.exit(3)\n"
    result = evaluate(problem, script, any_config(problem.space), tmp_path, policy)
    assert result.status == RUN_ERROR
    assert "3" in result.detail


def test_evaluate_missing_number_on_stdout_is_run_error(tmp_path):
    problem = tiny_problem()
    policy = MeasurementPolicy(repeats=1, timeout_sec=30.0)
    script = 'print("no numeric content")\n'
    result = evaluate(problem, script, any_config(problem.space), tmp_path, policy)
    assert result.status == RUN_ERROR


def test_evaluate_timeout_reported_as_status(tmp_path):
    problem = tiny_problem()
    policy = MeasurementPolicy(repeats=1, timeout_sec=0.8)
    script = "import time\ntime.sleep(30)\n"
    result = evaluate(problem, script, any_config(problem.space), tmp_path, policy)
    assert result.status == TIMEOUT
    assert result.objective is None


def test_evaluate_compile_timeout_reported_as_status(tmp_path):
    problem = tiny_problem(compile_template="sleep 30")
    policy = MeasurementPolicy(repeats=1, timeout_sec=0.5)
    result = evaluate(problem, "x", any_config(problem.space), tmp_path, policy)
    assert result.status == TIMEOUT


def test_evaluate_walltime_mode_times_silent_programs(tmp_path):
    problem = tiny_problem()
    policy = MeasurementPolicy(repeats=2, timeout_sec=30.0, objective_source="walltime")
    result = evaluate(problem, "pass\n", any_config(problem.space), tmp_path, policy)
    assert result.status == OK
    assert len(result.runs) == 2
    assert all(wall > 0.0 for wall in result.runs)


def test_evaluate_exports_evaluation_index(tmp_path):
    problem = tiny_problem()
    policy = MeasurementPolicy(repeats=1, timeout_sec=30.0)
    script = 'import os\nprint(os.environ["PRAGMATUNE_EVAL_INDEX"])\n'
    result = evaluate(
        problem, script, any_config(problem.space), tmp_path, policy, eval_index=7
    )
    assert result.status == OK
    assert result.objective == 7.0


# ---- mock objectives --------------------------------------------------------


def test_mock_objective_is_deterministic_and_pure():
    space = mixed_space()
    config = resolve_activity(space, {"C0": "x", "C1": "p", "O0": "2", "O1": "5"})
    first = mock_objective_value(space, config, "sphere", seed=1234)
    second = mock_objective_value(mixed_space(), config, "sphere", seed=1234)
    assert first == second
    assert mock_objective_value(space, config, "sphere", seed=99) != first


def test_sphere_matches_hand_computed_ordinal_part():
    space = ordinal_only_space(k=11)  # values "0".."10", rank/10 grid
    values = {}
    for config in enumerate_space(space, limit=100):
        rank = int(config["O0"]) / 10.0
        values[config] = (rank - 0.3) ** 2
    for config, expected in values.items():
        assert mock_objective_value(space, config, "sphere", seed=0) == pytest.approx(
            expected
        )
    best = min(values, key=values.get)
    assert best["O0"] == "3"  # the 0.3 target sits exactly on the grid


def test_sphere_categorical_offsets_are_positive_and_distinct_per_choice():
    space = toy_parent_child_space()
    values = {
        config: mock_objective_value(space, config, "sphere", seed=7)
        for config in enumerate_space(space, limit=10)
    }
    assert all(v >= 0.2 for v in values.values())  # two categoricals, >= 0.1 each
    assert len(set(values.values())) == len(values)  # offsets separate all configs


def test_plateau_rounds_sphere_to_two_decimals():
    space = mixed_space()
    for config in enumerate_space(space, limit=100)[:10]:
        sphere = mock_objective_value(space, config, "sphere", seed=5)
        plateau = mock_objective_value(space, config, "plateau", seed=5)
        assert plateau == round(sphere, 2)


def test_cliff_penalizes_configs_with_inactive_parameters():
    space = toy_parent_child_space()
    for config in enumerate_space(space, limit=10):
        sphere = mock_objective_value(space, config, "sphere", seed=7)
        cliff = mock_objective_value(space, config, "cliff", seed=7)
        if any(value is INACTIVE for _, value in config):
            assert cliff == pytest.approx(sphere + CLIFF_PENALTY)
        else:
            assert cliff == sphere


def test_unknown_mock_objective_rejected():
    space = ordinal_only_space()
    config = any_config(space)
    with pytest.raises(UnknownObjective):
        mock_objective_value(space, config, "rosenbrock", seed=0)


def test_mock_evaluate_wraps_value_in_ok_measurement():
    space = ordinal_only_space()
    config = any_config(space)
    result = mock_evaluate(space, config, "sphere", seed=3)
    assert result.status == OK
    assert result.runs == (result.objective,)
    assert result.elapsed == 0.0
