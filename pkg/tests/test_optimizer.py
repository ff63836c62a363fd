"""Acquisition, proposal, trace summaries, and the full tune loop."""

import itertools
import math

import numpy as np
import pytest

from pragmatune.evaluator import OK, RUN_ERROR, Measurement, mock_evaluate, mock_objective_value
from pragmatune.optimizer import (
    EXHAUSTED,
    EmptyTrace,
    InvalidOptions,
    NoFeasibleConfiguration,
    TuneOptions,
    TuneResult,
    best_so_far,
    lcb,
    lcb_scores,
    propose,
    tune,
)
from pragmatune.perfdb import (
    DUPLICATE,
    EvalRecord,
    NoSuccessfulEvaluation,
    PerfDb,
    iso_timestamp,
)
from pragmatune.space import ParamSpace, encode, enumerate_space, resolve_activity
from pragmatune.surrogate import GP, RF, Prediction
from conftest import StubProblem, mixed_space, ordinal_only_space, toy_parent_child_space


def counting_clock(start: float = 1_000_000_000.0):
    ticker = itertools.count()
    return lambda: start + next(ticker)


def mock_eval_fn(space, objective_id: str = "sphere", seed: int = 1234):
    return lambda config, index: mock_evaluate(space, config, objective_id, seed)


def always_failing(config, index):
    return Measurement(objective=None, runs=(), elapsed=0.1, status=RUN_ERROR, detail="boom")


class ScriptedModel:
    """predict_log driven by a fixed per-candidate table (extended by a filler)."""

    def __init__(self, rows, filler=(0.0, 0.0)):
        self.rows = rows
        self.filler = filler

    def predict_log(self, X):
        table = list(self.rows) + [self.filler] * (len(X) - len(self.rows))
        means = np.array([m for m, _ in table[: len(X)]])
        sigmas = np.array([s for _, s in table[: len(X)]])
        return means, sigmas


class ExactLogModel:
    """Zero-sigma model returning the true log objective for known feature rows."""

    def __init__(self, space, objective_fn):
        self.table = {
            encode(space, config).tobytes(): math.log(objective_fn(config))
            for config in enumerate_space(space, limit=100_000)
        }

    def predict_log(self, X):
        means = np.array([self.table[np.ascontiguousarray(row).tobytes()] for row in X])
        return means, np.zeros(len(X))


def make_record(index, config, objective, status=OK, duplicate_of=None):
    return EvalRecord.create(
        index=index,
        config=config,
        objective=objective,
        elapsed=0.0,
        status=status,
        duplicate_of=duplicate_of,
        timestamp=iso_timestamp(1_000_000_000.0 + index),
    )


# ---- acquisition -------------------------------------------------------------


def test_lcb_is_mean_minus_kappa_sigma():
    assert lcb(Prediction(mean=1.0, sigma=0.5), kappa=1.96) == pytest.approx(0.02)
    assert lcb(Prediction(mean=1.1, sigma=0.8), kappa=1.96) == pytest.approx(-0.468)
    # the wider prediction wins despite the higher mean
    assert lcb(Prediction(1.1, 0.8), 1.96) < lcb(Prediction(1.0, 0.5), 1.96)
    assert lcb(Prediction(0.7, 0.3), kappa=0.0) == 0.7


def test_lcb_scores_matches_scalar_form_elementwise():
    means = np.array([0.0, -1.0, 2.5])
    sigmas = np.array([0.5, 0.1, 1.0])
    scores = lcb_scores(means, sigmas, kappa=1.96)
    assert scores == pytest.approx(means - 1.96 * sigmas)
    assert lcb_scores(means, sigmas, kappa=0.0) == pytest.approx(means)


# ---- propose -------------------------------------------------------------------


def test_propose_prefers_high_uncertainty_under_lcb(tmp_path):
    space = toy_parent_child_space()
    db = PerfDb.fresh(space, tmp_path)
    opts = TuneOptions(kappa=1.96, candidate_pool=64)
    model = ScriptedModel(rows=[(0.0, 0.5)], filler=(math.log(1.1), 0.8))
    choice = propose(model, space, db, np.random.default_rng(0), opts)
    assert choice == enumerate_space(space, limit=10)[1]


def test_propose_with_zero_kappa_picks_lowest_mean(tmp_path):
    space = toy_parent_child_space()
    db = PerfDb.fresh(space, tmp_path)
    opts = TuneOptions(kappa=0.0, candidate_pool=64)
    model = ScriptedModel(rows=[(0.5, 9.0), (0.4, 9.0), (0.6, 9.0)])
    choice = propose(model, space, db, np.random.default_rng(0), opts)
    assert choice == enumerate_space(space, limit=10)[1]


def test_propose_breaks_ties_toward_lowest_candidate_index(tmp_path):
    space = toy_parent_child_space()
    db = PerfDb.fresh(space, tmp_path)
    opts = TuneOptions(kappa=1.0, candidate_pool=64)
    model = ScriptedModel(rows=[], filler=(0.25, 0.25))
    choice = propose(model, space, db, np.random.default_rng(0), opts)
    assert choice == enumerate_space(space, limit=10)[0]


def test_propose_returns_already_seen_configurations(tmp_path):
    space = toy_parent_child_space()
    db = PerfDb.fresh(space, tmp_path)
    first = enumerate_space(space, limit=10)[0]
    db.append(make_record(1, first, 0.5))
    model = ScriptedModel(rows=[(-5.0, 0.0)], filler=(0.0, 0.0))
    choice = propose(model, space, db, np.random.default_rng(0), TuneOptions())
    assert choice == first  # duplicate bookkeeping is the caller's job


def test_propose_reports_exhaustion_of_small_spaces(tmp_path):
    space = toy_parent_child_space()
    db = PerfDb.fresh(space, tmp_path)
    for i, config in enumerate(enumerate_space(space, limit=10), start=1):
        db.append(make_record(i, config, 0.1 * i))
    model = ScriptedModel(rows=[], filler=(0.0, 0.0))
    assert propose(model, space, db, np.random.default_rng(0), TuneOptions()) is EXHAUSTED


def test_propose_samples_a_pool_for_large_spaces(tmp_path):
    space = mixed_space()
    db = PerfDb.fresh(space, tmp_path)
    opts = TuneOptions(candidate_pool=8)  # smaller than the 64 raw configs
    model = ScriptedModel(rows=[], filler=(0.0, 0.0))
    first = propose(model, space, db, np.random.default_rng(5), opts)
    second = propose(model, space, db, np.random.default_rng(5), opts)
    assert first == second  # same rng state, same pool
    assert first.is_active("C1") == (first["C0"] == "x")


def test_propose_with_exact_model_and_zero_kappa_finds_the_argmin(tmp_path):
    space = mixed_space()
    objective = lambda config: mock_objective_value(space, config, "sphere", 1234)
    true_best = min(enumerate_space(space, limit=1000), key=objective)
    db = PerfDb.fresh(space, tmp_path)
    model = ExactLogModel(space, objective)
    opts = TuneOptions(kappa=0.0, candidate_pool=4096)
    assert propose(model, space, db, np.random.default_rng(0), opts) == true_best


# ---- best_so_far ------------------------------------------------------------


def test_best_so_far_tracks_prefix_minimum(parent_child_space):
    configs = enumerate_space(parent_child_space, limit=10)
    trace = [
        make_record(1, configs[0], 0.709),
        make_record(2, configs[1], 0.265),
        make_record(3, configs[2], 0.229),
    ]
    assert best_so_far(trace) == [(1, 0.709), (2, 0.265), (3, 0.229)]


def test_best_so_far_holds_flat_when_no_improvement(parent_child_space):
    configs = enumerate_space(parent_child_space, limit=10)
    trace = [
        make_record(1, configs[0], 1.0),
        make_record(2, configs[1], 2.0),
        make_record(3, configs[2], 3.0),
    ]
    assert best_so_far(trace) == [(1, 1.0), (2, 1.0), (3, 1.0)]


def test_best_so_far_starts_at_first_successful_record(parent_child_space):
    configs = enumerate_space(parent_child_space, limit=10)
    trace = [
        make_record(1, configs[0], None, status=RUN_ERROR),
        make_record(2, configs[1], 0.5),
        make_record(3, configs[0], None, status=DUPLICATE, duplicate_of=1),
        make_record(4, configs[2], 0.75),
    ]
    assert best_so_far(trace) == [(2, 0.5), (3, 0.5), (4, 0.5)]


def test_best_so_far_rejects_empty_traces():
    with pytest.raises(EmptyTrace):
        best_so_far([])


def test_best_so_far_is_non_increasing_on_random_traces(parent_child_space):
    configs = enumerate_space(parent_child_space, limit=10)
    rng = np.random.default_rng(17)
    trace = [
        make_record(i, configs[int(rng.integers(3))], float(round(rng.uniform(0.1, 2.0), 6)))
        for i in range(1, 40)
    ]
    curve = [value for _, value in best_so_far(trace)]
    assert all(later <= earlier for earlier, later in zip(curve, curve[1:]))
    assert curve[-1] == min(r.objective for r in trace)


# ---- options ------------------------------------------------------------------


def test_options_validation():
    for bad in (
        dict(max_evals=0),
        dict(learner="SVM"),
        dict(n_init=0),
        dict(kappa=-0.1),
        dict(kappa=math.inf),
        dict(candidate_pool=0),
        dict(seed=-1),
    ):
        with pytest.raises(InvalidOptions):
            TuneOptions(**bad)


def test_effective_n_init_caps_at_budget():
    assert TuneOptions().effective_n_init == 10
    assert TuneOptions(max_evals=4).effective_n_init == 4
    assert TuneOptions(n_init=3, max_evals=100).effective_n_init == 3
    assert TuneOptions(n_init=50, max_evals=20).effective_n_init == 20


# ---- tune ----------------------------------------------------------------------


def test_tune_spends_exactly_the_proposal_budget(tmp_path):
    space = mixed_space()
    problem = StubProblem(space=space)
    db = PerfDb.fresh(space, tmp_path)
    opts = TuneOptions(max_evals=15, learner=RF, seed=3, candidate_pool=64)
    result = tune(problem, opts, mock_eval_fn(space), db, clock=counting_clock())
    assert result.proposed == 15
    assert len(result.trace) == 15
    assert len(db.records) == 15
    assert [r.index for r in result.trace] == list(range(1, 16))
    duplicates = sum(1 for r in result.trace if r.status == DUPLICATE)
    assert result.evaluated == 15 - duplicates


def test_tune_never_evaluates_a_configuration_twice(tmp_path):
    space = toy_parent_child_space()  # 3 distinct configs force duplicates
    problem = StubProblem(space=space)
    db = PerfDb.fresh(space, tmp_path)
    seen = []

    def spy(config, index):
        seen.append(config)
        return mock_evaluate(space, config, "sphere", 1234)

    opts = TuneOptions(max_evals=12, learner=RF, seed=0, candidate_pool=64)
    tune(problem, opts, spy, db, clock=counting_clock())
    assert len(seen) == len(set(seen))
    for record in db.records:
        if record.status == DUPLICATE:
            assert db.records[record.duplicate_of - 1].config == record.config
            assert db.contains(record.config) == record.duplicate_of


def test_tune_finds_the_sphere_optimum_on_a_small_space(tmp_path):
    space = mixed_space()
    problem = StubProblem(space=space)
    db = PerfDb.fresh(space, tmp_path)
    objective = lambda c: mock_evaluate(space, c, "sphere", 1234).objective
    oracle = min(objective(c) for c in enumerate_space(space, limit=1000))
    opts = TuneOptions(max_evals=60, learner=RF, seed=7, candidate_pool=64)
    result = tune(problem, opts, mock_eval_fn(space), db, clock=counting_clock())
    assert result.best.objective == pytest.approx(round(oracle, 6), abs=1e-9)
    assert result.best_index == result.best.index


def test_tune_gp_mode_samples_randomly_and_records_duplicates(tmp_path):
    space = toy_parent_child_space()
    problem = StubProblem(space=space)
    db = PerfDb.fresh(space, tmp_path)
    opts = TuneOptions(max_evals=10, learner=GP, seed=1)
    result = tune(problem, opts, mock_eval_fn(space), db, clock=counting_clock())
    assert result.proposed == 10  # random proposals never exhaust the space
    assert result.evaluated <= 3
    assert result.evaluated + sum(1 for r in result.trace if r.status == DUPLICATE) == 10


def test_tune_is_deterministic_per_seed(tmp_path):
    space = mixed_space()
    problem = StubProblem(space=space)
    opts = TuneOptions(max_evals=20, learner=RF, seed=11, candidate_pool=64)
    runs = []
    for sub in ("a", "b"):
        db = PerfDb.fresh(space, tmp_path / sub)
        runs.append(tune(problem, opts, mock_eval_fn(space), db, clock=counting_clock()))
    assert runs[0].trace == runs[1].trace
    assert runs[0].best == runs[1].best
    csv_a = (tmp_path / "a" / "results.csv").read_bytes()
    csv_b = (tmp_path / "b" / "results.csv").read_bytes()
    assert csv_a == csv_b


def test_tune_different_seeds_usually_diverge(tmp_path):
    space = mixed_space()
    problem = StubProblem(space=space)
    traces = []
    for seed in (1, 2):
        db = PerfDb.fresh(space, tmp_path / str(seed))
        opts = TuneOptions(max_evals=8, learner=GP, seed=seed)
        traces.append(
            tune(problem, opts, mock_eval_fn(space), db, clock=counting_clock()).trace
        )
    assert [r.config for r in traces[0]] != [r.config for r in traces[1]]


def test_tune_keeps_failure_records_but_raises_without_successes(tmp_path):
    space = mixed_space()
    problem = StubProblem(space=space)
    db = PerfDb.fresh(space, tmp_path)
    opts = TuneOptions(max_evals=6, learner=RF, seed=5, candidate_pool=64)
    with pytest.raises(NoSuccessfulEvaluation):
        tune(problem, opts, always_failing, db, clock=counting_clock())
    assert len(db.records) == 6
    assert all(r.status in (RUN_ERROR, DUPLICATE) for r in db.records)


def test_tune_excludes_failures_from_training_and_still_finishes(tmp_path):
    space = mixed_space()
    problem = StubProblem(space=space)
    db = PerfDb.fresh(space, tmp_path)

    def flaky(config, index):
        if index % 3 == 0:
            return Measurement(None, (), 0.05, RUN_ERROR, detail="flaky")
        return mock_evaluate(space, config, "sphere", 1234)

    opts = TuneOptions(max_evals=20, learner=RF, seed=9, candidate_pool=64)
    result = tune(problem, opts, flaky, db, clock=counting_clock())
    assert result.proposed == 20
    assert any(r.status == RUN_ERROR for r in result.trace)
    assert result.best.status == OK


def test_tune_resumes_on_top_of_existing_records(tmp_path):
    space = mixed_space()
    problem = StubProblem(space=space)
    db = PerfDb.fresh(space, tmp_path)
    configs = enumerate_space(space, limit=100)
    db.append(make_record(1, configs[0], 0.9))
    db.append(make_record(2, configs[1], 0.8))
    opts = TuneOptions(max_evals=5, learner=RF, seed=2, candidate_pool=64)
    result = tune(problem, opts, mock_eval_fn(space), db, clock=counting_clock())
    assert result.proposed == 5
    assert [r.index for r in result.trace] == [3, 4, 5, 6, 7]
    assert len(db.records) == 7


def test_tune_rejects_parameterless_spaces(tmp_path):
    space = ParamSpace(parameters=(), conditions=(), seed=0)
    problem = StubProblem(space=space)
    db = PerfDb.fresh(space, tmp_path)
    with pytest.raises(NoFeasibleConfiguration):
        tune(problem, TuneOptions(), mock_eval_fn(space), db)


def test_tune_initialization_is_latin_hypercube_when_ordinals_exist(tmp_path):
    space = ordinal_only_space(k=11, seed=0)
    problem = StubProblem(space=space)
    db = PerfDb.fresh(space, tmp_path)
    opts = TuneOptions(max_evals=11, n_init=11, learner=RF, seed=21)
    result = tune(problem, opts, mock_eval_fn(space), db, clock=counting_clock())
    init_values = {r.config["O0"] for r in result.trace[:11]}
    assert len(init_values) == 11  # stratified: every rank visited exactly once


def test_tune_result_reports_the_database_minimum(tmp_path):
    space = mixed_space()
    problem = StubProblem(space=space)
    db = PerfDb.fresh(space, tmp_path)
    opts = TuneOptions(max_evals=25, learner=RF, seed=13, candidate_pool=64)
    result = tune(problem, opts, mock_eval_fn(space), db, clock=counting_clock())
    ok_records = [r for r in db.records if r.status == OK]
    assert result.best.objective == min(r.objective for r in ok_records)
    best, index = db.find_min()
    assert (result.best, result.best_index) == (best, index)
    assert isinstance(result, TuneResult)
