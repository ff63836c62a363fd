"""pragmatune: a compile-and-time autotuner for pragma-parameterized code.

Searches conditional categorical/ordinal parameter spaces with surrogate-
guided Bayesian optimization, instantiates code molds, measures them, and
records every proposal in an append-only performance database.
"""

from .corpus import FlagPreset, get_preset, list_problems, problem_path
from .evaluator import (
    Measurement,
    MeasurementPolicy,
    evaluate,
    mock_evaluate,
    mock_objective_value,
)
from .optimizer import (
    EXHAUSTED,
    TuneOptions,
    TuneResult,
    best_so_far,
    lcb,
    propose,
    tune,
)
from .perfdb import EvalRecord, PerfDb, load, read_rows
from .problem import Problem, load_problem, validate_problem
from .space import (
    INACTIVE,
    Condition,
    Configuration,
    Parameter,
    ParamSpace,
    build_space,
    configuration_from_values,
    encode,
    enumerate_space,
    resolve_activity,
    sample_lhs,
    sample_random,
    size,
)
from .surrogate import Prediction, SurrogateModel, TrainingSet, fit, predict
from .templater import CodeMold, extract_tokens, instantiate

__version__ = "0.1.0"

__all__ = [
    "CodeMold",
    "Condition",
    "Configuration",
    "EXHAUSTED",
    "EvalRecord",
    "FlagPreset",
    "INACTIVE",
    "Measurement",
    "MeasurementPolicy",
    "Parameter",
    "ParamSpace",
    "PerfDb",
    "Prediction",
    "Problem",
    "SurrogateModel",
    "TrainingSet",
    "TuneOptions",
    "TuneResult",
    "best_so_far",
    "build_space",
    "configuration_from_values",
    "encode",
    "enumerate_space",
    "evaluate",
    "extract_tokens",
    "fit",
    "get_preset",
    "instantiate",
    "lcb",
    "list_problems",
    "load",
    "load_problem",
    "mock_evaluate",
    "mock_objective_value",
    "predict",
    "problem_path",
    "propose",
    "read_rows",
    "resolve_activity",
    "sample_lhs",
    "sample_random",
    "size",
    "tune",
    "validate_problem",
]
