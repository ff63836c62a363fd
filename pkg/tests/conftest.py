"""Shared fixtures: small spaces and stand-in problems used across tests."""

from __future__ import annotations

import sys
from dataclasses import dataclass

import pytest

from pragmatune.evaluator import MeasurementPolicy
from pragmatune.space import ParamSpace, build_space
from pragmatune.templater import CodeMold


def toy_parent_child_space() -> ParamSpace:
    """Binary parent with a child active only on the parent's 'on' value.

    Distinct configurations: (on, a), (on, b), (off, INACTIVE) -> 3.
    """
    return build_space(
        {
            "params": [
                {"name": "parent", "kind": "categorical", "values": ["on", "off"], "default": "off"},
                {"name": "child", "kind": "categorical", "values": ["a", "b"], "default": "a"},
            ],
            "conditions": [{"child": "child", "parent": "parent", "allowed": ["on"]}],
            "seed": 7,
        }
    )


def mixed_space(seed: int = 11) -> ParamSpace:
    """Two categoricals (one conditioned) and two ordinals; 64 raw configs."""
    return build_space(
        {
            "params": [
                {"name": "C0", "kind": "categorical", "values": ["x", "y"], "default": "x"},
                {"name": "C1", "kind": "categorical", "values": ["p", "q"], "default": "p"},
                {"name": "O0", "kind": "ordinal", "values": ["1", "2", "4", "8"], "default": "2"},
                {"name": "O1", "kind": "ordinal", "values": ["3", "5", "7", "9"], "default": "5"},
            ],
            "conditions": [{"child": "C1", "parent": "C0", "allowed": ["x"]}],
            "seed": seed,
        }
    )


def ordinal_only_space(k: int = 11, seed: int = 3) -> ParamSpace:
    values = [str(v) for v in range(k)]
    return build_space(
        {
            "params": [
                {"name": "O0", "kind": "ordinal", "values": values, "default": values[0]},
            ],
            "seed": seed,
        }
    )


@dataclass
class StubProblem:
    """Just enough of a problem for evaluate()/tune() to run."""

    space: ParamSpace
    compile_template: str = "cp {src} {bin}"
    run_template: str = "python3 {bin}"
    flags: tuple[str, ...] = ()
    policy: MeasurementPolicy = MeasurementPolicy()
    mold: CodeMold | None = None
    name: str = "stub"


@pytest.fixture
def parent_child_space() -> ParamSpace:
    return toy_parent_child_space()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance criteria verdicts after the test summary."""
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "ACCEPTANCE_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
