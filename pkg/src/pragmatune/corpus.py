"""Shipped problem definitions and compiler-flag presets.

Problems live as JSON files under problems/ with their code molds under
molds/; presets are immutable named flag lists that a problem references
through its `flag_preset` field.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path


class CorpusError(Exception):
    """Base class for corpus lookup errors."""


class UnknownPreset(CorpusError):
    """get_preset was asked for an unregistered preset name."""


class UnknownProblem(CorpusError):
    """problem_path was asked for an unshipped problem name."""


@dataclass(frozen=True)
class FlagPreset:
    """A named, verbatim compiler flag list."""

    name: str
    flags: tuple[str, ...]


PRESETS = {
    "baseline_O3": FlagPreset("baseline_O3", ("-std=c99", "-O3")),
    "polly": FlagPreset(
        "polly",
        (
            "-std=c99",
            "-fno-unroll-loops",
            "-O3",
            "-mllvm",
            "-polly",
            "-mllvm",
            "-polly-process-unprofitable",
            "-mllvm",
            "-polly-use-llvm-names",
            "-ffast-math",
            "-march=native",
        ),
    ),
}
PRESETS["polly_noheuristic"] = FlagPreset(
    "polly_noheuristic",
    PRESETS["polly"].flags
    + (
        "-mllvm",
        "-polly-reschedule=0",
        "-mllvm",
        "-polly-postopts=0",
        "-mllvm",
        "-polly-pragma-ignore-depcheck",
    ),
)

PROBLEM_NAMES = (
    "syr2k",
    "3mm",
    "heat-3d",
    "lu",
    "covariance",
    "floyd-warshall",
    "mock_syr2k",
    "mock_tiny",
)


def get_preset(name: str) -> FlagPreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise UnknownPreset(f"unknown flag preset {name!r}; known: {sorted(PRESETS)}") from None


def list_problems() -> tuple[str, ...]:
    """Names of the shipped problem files, loadable via problem_path."""
    return PROBLEM_NAMES


def problem_path(name: str) -> Path:
    if name not in PROBLEM_NAMES:
        raise UnknownProblem(f"unknown problem {name!r}; known: {list(PROBLEM_NAMES)}")
    return Path(str(resources.files(__package__).joinpath("problems", f"{name}.json")))
