"""Bayesian-optimization loop over a conditional parameter space.

Phase 1 draws initialization samples (Latin hypercube when the space has
ordinals, uniform otherwise).  Phase 2 refits the surrogate each iteration
and proposes the candidate minimizing the lower confidence bound.  Budget
counts proposals: a proposal duplicating an earlier configuration is
recorded (status duplicate) without evaluation but still consumes budget.
"""

from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .evaluator import OK, Measurement
from .perfdb import DUPLICATE, EvalRecord, PerfDb, iso_timestamp
from .space import (
    Configuration,
    ParamSpace,
    _random_index_matrix,
    encode,
    enumerate_indices,
    sample_lhs,
    sample_random,
    size,
)
from .surrogate import GP, KINDS, Prediction, SurrogateModel, TrainingSet, fit

DEFAULT_MAX_EVALS = 100
DEFAULT_LEARNER = "RF"
DEFAULT_N_INIT_CAP = 10
DEFAULT_KAPPA = 1.96
DEFAULT_CANDIDATE_POOL = 4096
DEFAULT_SEED = 42


class OptimizerError(Exception):
    """Base class for optimizer errors."""


class InvalidOptions(OptimizerError):
    """TuneOptions fields are out of range."""


class EmptyTrace(OptimizerError):
    """best_so_far needs at least one record."""


class NoFeasibleConfiguration(OptimizerError):
    """The space contains no configurations."""


class _ExhaustedType:
    """Sentinel returned by propose when no unseen configuration remains."""

    _instance = None

    def __new__(cls) -> _ExhaustedType:
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "EXHAUSTED"


EXHAUSTED = _ExhaustedType()


@dataclass(frozen=True)
class TuneOptions:
    """Search budget, learner choice, and acquisition knobs."""

    max_evals: int = DEFAULT_MAX_EVALS
    learner: str = DEFAULT_LEARNER
    n_init: int | None = None
    kappa: float = DEFAULT_KAPPA
    candidate_pool: int = DEFAULT_CANDIDATE_POOL
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if not isinstance(self.max_evals, int) or self.max_evals < 1:
            raise InvalidOptions("max_evals must be an integer >= 1")
        if self.learner not in KINDS:
            raise InvalidOptions(f"learner must be one of {KINDS}, got {self.learner!r}")
        if self.n_init is not None and (not isinstance(self.n_init, int) or self.n_init < 1):
            raise InvalidOptions("n_init must be an integer >= 1")
        if not (math.isfinite(self.kappa) and self.kappa >= 0):
            raise InvalidOptions("kappa must be a non-negative finite number")
        if not isinstance(self.candidate_pool, int) or self.candidate_pool < 1:
            raise InvalidOptions("candidate_pool must be an integer >= 1")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise InvalidOptions("seed must be a non-negative integer")

    @property
    def effective_n_init(self) -> int:
        base = DEFAULT_N_INIT_CAP if self.n_init is None else self.n_init
        return min(base, self.max_evals)


@dataclass(frozen=True)
class TuneResult:
    """Outcome of one tune run."""

    best: EvalRecord
    best_index: int
    evaluated: int
    proposed: int
    trace: tuple[EvalRecord, ...]


def lcb(pred: Prediction, kappa: float) -> float:
    """Lower confidence bound on the prediction fields; lower is better."""
    return pred.mean - kappa * pred.sigma


def lcb_scores(log_means: np.ndarray, sigmas: np.ndarray, kappa: float) -> np.ndarray:
    """Acquisition scores in log space, matching the surrogates' fitting space."""
    return np.asarray(log_means) - kappa * np.asarray(sigmas)


@functools.lru_cache(maxsize=8)
def _enumerated(space: ParamSpace) -> tuple[np.ndarray, np.ndarray]:
    idx = enumerate_indices(space, limit=size(space))
    idx.setflags(write=False)
    features = space._encode_indices(idx)
    features.setflags(write=False)
    return idx, features


def propose(
    model: SurrogateModel,
    space: ParamSpace,
    db: PerfDb,
    rng: np.random.Generator,
    opts: TuneOptions,
) -> Configuration | _ExhaustedType:
    """Lowest-LCB candidate from the pool (full enumeration for small spaces).

    The winning candidate is returned even when the database already holds
    it; the caller decides duplicate bookkeeping.  Ties break toward the
    lowest candidate index.
    """
    if size(space) <= opts.candidate_pool:
        idx, features = _enumerated(space)
        if db.distinct_count >= idx.shape[0]:
            return EXHAUSTED
    else:
        idx = _random_index_matrix(space, rng, opts.candidate_pool)
        features = space._encode_indices(idx)
    log_means, sigmas = model.predict_log(features)
    pick = int(np.argmin(lcb_scores(log_means, sigmas, opts.kappa)))
    return space._config_from_indices(idx[pick])


def best_so_far(trace) -> list[tuple[int, float]]:
    """Prefix-minimum objective per record index, from the first ok record on."""
    records = list(trace)
    if not records:
        raise EmptyTrace("best_so_far needs at least one record")
    out: list[tuple[int, float]] = []
    best: float | None = None
    for record in records:
        if record.status == OK and (best is None or record.objective < best):
            best = record.objective
        if best is not None:
            out.append((record.index, best))
    return out


def tune(
    problem,
    opts: TuneOptions,
    evaluator: Callable[[Configuration, int], Measurement],
    db: PerfDb,
    clock: Callable[[], float] | None = None,
) -> TuneResult:
    """Run the full loop against `evaluator`, appending every proposal to `db`.

    `evaluator(config, index)` returns a Measurement; failures are recorded
    with their status and excluded from surrogate training.  Deterministic
    given opts.seed, a deterministic evaluator, and a deterministic clock.
    """
    space: ParamSpace = problem.space
    if not space.parameters:
        raise NoFeasibleConfiguration("the space has no parameters")
    if clock is None:
        clock = time.time
    rng = np.random.default_rng(opts.seed)

    train_X: list[np.ndarray] = []
    train_y: list[float] = []
    for record in db.records:
        if record.status == OK:
            train_X.append(encode(space, record.config))
            train_y.append(record.objective)

    trace: list[EvalRecord] = []
    proposed = 0

    def record_proposal(config: Configuration) -> None:
        nonlocal proposed
        proposed += 1
        index = len(db.records) + 1
        seen = db.contains(config)
        if seen is not None:
            record = EvalRecord.create(
                index, config, None, 0.0, DUPLICATE, seen, iso_timestamp(clock())
            )
        else:
            measurement = evaluator(config, index)
            record = EvalRecord.create(
                index,
                config,
                measurement.objective,
                measurement.elapsed,
                measurement.status,
                None,
                iso_timestamp(clock()),
            )
            if record.status == OK:
                train_X.append(encode(space, config))
                train_y.append(record.objective)
        db.append(record)
        trace.append(record)

    n_init = opts.effective_n_init
    draw = sample_lhs if space.has_ordinal() else sample_random
    for config in draw(space, rng, n_init):
        if proposed >= opts.max_evals:
            break
        record_proposal(config)

    while proposed < opts.max_evals:
        if opts.learner == GP or not train_y:
            # GP mode and the no-trainable-data fallback both propose by
            # plain random sampling
            config = sample_random(space, rng, 1)[0]
        else:
            model = fit(opts.learner, TrainingSet(np.array(train_X), np.array(train_y)), rng)
            candidate = propose(model, space, db, rng, opts)
            if candidate is EXHAUSTED:
                break
            config = candidate
        record_proposal(config)

    best, best_index = db.find_min()
    evaluated = sum(1 for record in trace if record.status != DUPLICATE)
    return TuneResult(
        best=best,
        best_index=best_index,
        evaluated=evaluated,
        proposed=proposed,
        trace=tuple(trace),
    )
