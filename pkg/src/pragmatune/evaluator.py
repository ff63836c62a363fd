"""Turns generated sources into objective values.

The real path writes the source, compiles it, runs the binary repeatedly,
and parses seconds from its output (or measures wall time).  The mock path
computes deterministic synthetic objectives so everything above it can be
tested without compilers.
"""

from __future__ import annotations

import functools
import math
import os
import re
import statistics
import subprocess
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .space import INACTIVE, ORDINAL, Configuration, ParamSpace

OK = "ok"
COMPILE_ERROR = "compile_error"
RUN_ERROR = "run_error"
TIMEOUT = "timeout"
MEASUREMENT_STATUSES = (OK, COMPILE_ERROR, RUN_ERROR, TIMEOUT)

AGGREGATIONS = ("min", "mean", "median")
PROGRAM_STDOUT = "program-stdout"
WALLTIME = "walltime"
OBJECTIVE_SOURCES = (PROGRAM_STDOUT, WALLTIME)

DEFAULT_REPEATS = 3
DEFAULT_AGGREGATION = "min"
DEFAULT_TIMEOUT_SEC = 300.0

MOCK_OBJECTIVES = ("sphere", "plateau", "cliff")
SPHERE_TARGET = 0.3
CLIFF_PENALTY = 100.0
EVAL_INDEX_ENV_VAR = "PRAGMATUNE_EVAL_INDEX"

_FLOAT_RE = re.compile(r"[-+]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?")


class EvaluatorError(Exception):
    """Base class for evaluator errors."""


class InvalidPolicy(EvaluatorError):
    """Measurement policy fields are out of range."""


class UnknownObjective(EvaluatorError):
    """mock_evaluate was asked for an unregistered synthetic objective."""


class BadCommandTemplate(EvaluatorError):
    """A compile/run template produced an empty argument vector."""


@dataclass(frozen=True)
class MeasurementPolicy:
    """How many runs to take, how to aggregate them, and when to give up."""

    repeats: int = DEFAULT_REPEATS
    aggregation: str = DEFAULT_AGGREGATION
    timeout_sec: float = DEFAULT_TIMEOUT_SEC
    objective_source: str = PROGRAM_STDOUT

    def __post_init__(self) -> None:
        if not isinstance(self.repeats, int) or self.repeats < 1:
            raise InvalidPolicy("repeats must be an integer >= 1")
        if self.aggregation not in AGGREGATIONS:
            raise InvalidPolicy(f"aggregation must be one of {AGGREGATIONS}")
        if not (self.timeout_sec > 0 and math.isfinite(self.timeout_sec)):
            raise InvalidPolicy("timeout_sec must be a positive finite number")
        if self.objective_source not in OBJECTIVE_SOURCES:
            raise InvalidPolicy(f"objective_source must be one of {OBJECTIVE_SOURCES}")


@dataclass(frozen=True)
class Measurement:
    """Outcome of one evaluation: aggregated objective plus run details."""

    objective: float | None
    runs: tuple[float, ...]
    elapsed: float
    status: str
    detail: str = ""

    def __post_init__(self) -> None:
        if self.status not in MEASUREMENT_STATUSES:
            raise EvaluatorError(f"unknown measurement status {self.status!r}")
        if self.status == OK and self.objective is None:
            raise EvaluatorError("ok measurement must carry an objective")
        if self.status != OK and self.objective is not None:
            raise EvaluatorError("failed measurement must not carry an objective")


def aggregate(runs: list[float] | tuple[float, ...], aggregation: str) -> float:
    if aggregation == "min":
        return min(runs)
    if aggregation == "mean":
        return statistics.fmean(runs)
    if aggregation == "median":
        return statistics.median(runs)
    raise InvalidPolicy(f"aggregation must be one of {AGGREGATIONS}")


def parse_objective(stdout: str) -> float | None:
    """Last floating-point number on stdout, or None when there is none."""
    matches = _FLOAT_RE.findall(stdout)
    if not matches:
        return None
    return float(matches[-1])


def build_command(template: str, substitutions: dict[str, str]) -> list[str]:
    """Substitute {placeholders}, then whitespace-split; no shell involved."""
    text = template
    for key, value in substitutions.items():
        text = text.replace("{" + key + "}", value)
    argv = text.split()
    if not argv:
        raise BadCommandTemplate(f"template {template!r} produced an empty command")
    return argv


def evaluate(
    problem,
    source_text: str,
    config: Configuration,
    workdir: str | Path,
    policy: MeasurementPolicy,
    eval_index: int = 0,
) -> Measurement:
    """Write, compile, and time one instantiated source.

    Failures come back as Measurement statuses (compile_error, run_error,
    timeout), never as exceptions.  Runs are strictly sequential.
    """
    # resolve before building commands: {src}/{bin} must stay valid when the
    # subprocess runs with cwd=workdir, even for a caller-relative workdir
    workdir = Path(workdir).resolve()
    workdir.mkdir(parents=True, exist_ok=True)
    src = workdir / "source.c"
    binary = workdir / "program"
    src.write_text(source_text, encoding="utf-8")

    env = dict(os.environ)
    env[EVAL_INDEX_ENV_VAR] = str(eval_index)
    subs = {
        "src": str(src),
        "bin": str(binary),
        "flags": " ".join(problem.flags),
    }
    started = time.perf_counter()

    def done(status: str, runs: tuple[float, ...] = (), detail: str = "") -> Measurement:
        objective = aggregate(runs, policy.aggregation) if status == OK else None
        return Measurement(
            objective=objective,
            runs=runs,
            elapsed=time.perf_counter() - started,
            status=status,
            detail=detail,
        )

    compile_cmd = build_command(problem.compile_template, subs)
    try:
        proc = subprocess.run(
            compile_cmd,
            capture_output=True,
            text=True,
            env=env,
            cwd=workdir,
            timeout=policy.timeout_sec,
        )
    except subprocess.TimeoutExpired:
        return done(TIMEOUT, detail="compile timed out")
    except OSError as exc:
        return done(COMPILE_ERROR, detail=f"compiler could not be launched: {exc}")
    if proc.returncode != 0:
        return done(COMPILE_ERROR, detail=proc.stderr.strip() or proc.stdout.strip())

    runs: list[float] = []
    run_cmd = build_command(problem.run_template, subs)
    for _ in range(policy.repeats):
        run_started = time.perf_counter()
        try:
            proc = subprocess.run(
                run_cmd,
                capture_output=True,
                text=True,
                env=env,
                cwd=workdir,
                timeout=policy.timeout_sec,
            )
        except subprocess.TimeoutExpired:
            return done(TIMEOUT, detail="run timed out")
        except OSError as exc:
            return done(RUN_ERROR, detail=f"binary could not be launched: {exc}")
        walltime = time.perf_counter() - run_started
        if proc.returncode != 0:
            return done(RUN_ERROR, detail=f"exit code {proc.returncode}: {proc.stderr.strip()}")
        if policy.objective_source == PROGRAM_STDOUT:
            value = parse_objective(proc.stdout)
            if value is None:
                return done(RUN_ERROR, detail="no number found on program stdout")
            runs.append(value)
        else:
            runs.append(walltime)
    return done(OK, runs=tuple(runs))


# ---- mock objectives ---------------------------------------------------


@functools.lru_cache(maxsize=None)
def _categorical_offsets(space: ParamSpace, seed: int) -> dict[str, np.ndarray]:
    """Per-categorical additive offsets: one per choice plus one for INACTIVE.

    Offsets are at least 0.1 so every synthetic objective stays strictly
    positive (the surrogates fit log targets).
    """
    rng = np.random.default_rng(seed)
    offsets: dict[str, np.ndarray] = {}
    for p in space.parameters:
        if p.kind != ORDINAL:
            offsets[p.name] = rng.uniform(0.1, 0.5, size=len(p.values) + 1)
    return offsets


def _sphere(space: ParamSpace, config: Configuration, seed: int) -> float:
    offsets = _categorical_offsets(space, seed)
    total = 0.0
    for p in space.parameters:
        value = config[p.name]
        if p.kind == ORDINAL:
            if value is INACTIVE:
                continue
            k = len(p.values)
            coord = p.values.index(value) / (k - 1) if k > 1 else 0.0
            total += (coord - SPHERE_TARGET) ** 2
        else:
            table = offsets[p.name]
            choice = len(p.values) if value is INACTIVE else p.values.index(value)
            total += float(table[choice])
    return total


def mock_objective_value(
    space: ParamSpace, config: Configuration, objective_id: str, seed: int
) -> float:
    """Deterministic synthetic objective; pure in all arguments."""
    if objective_id not in MOCK_OBJECTIVES:
        raise UnknownObjective(f"unknown mock objective {objective_id!r}")
    value = _sphere(space, config, seed)
    if objective_id == "plateau":
        return round(value, 2)
    if objective_id == "cliff":
        if any(v is INACTIVE for _, v in config):
            return value + CLIFF_PENALTY
    return value


def mock_evaluate(
    space: ParamSpace, config: Configuration, objective_id: str, seed: int
) -> Measurement:
    """Synthetic evaluation: always ok, zero elapsed, single pseudo-run."""
    value = mock_objective_value(space, config, objective_id, seed)
    return Measurement(objective=value, runs=(value,), elapsed=0.0, status=OK)
