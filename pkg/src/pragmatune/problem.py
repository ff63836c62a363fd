"""Problem files: one UTF-8 JSON document binding a mold to a space.

Fields: name, mold (path relative to the problem file), params, conditions,
seed, compile, run, repeats, aggregation, timeout_sec, objective_source,
optional mock_objective, optional flag_preset.  load_problem raises on the
first collected batch of violations; validate_problem returns them all as
printable diagnostics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .corpus import CorpusError, get_preset
from .evaluator import MOCK_OBJECTIVES, InvalidPolicy, MeasurementPolicy
from .space import ParamSpace, SpaceError, build_space
from .templater import CodeMold, TemplateError

KNOWN_FIELDS = {
    "name",
    "mold",
    "params",
    "conditions",
    "seed",
    "compile",
    "run",
    "repeats",
    "aggregation",
    "timeout_sec",
    "objective_source",
    "mock_objective",
    "flag_preset",
}


class ProblemError(Exception):
    """Base class for problem-file errors."""


class InvalidProblem(ProblemError):
    """The problem file fails one or more validity checks."""


@dataclass(frozen=True)
class Problem:
    """A validated, ready-to-tune problem."""

    name: str
    path: Path | None
    mold: CodeMold
    mold_path: Path | None
    space: ParamSpace
    compile_template: str
    run_template: str
    policy: MeasurementPolicy
    flag_preset: str | None
    flags: tuple[str, ...]
    mock_objective: str | None


def load_problem(path: str | Path) -> Problem:
    """Parse and fully validate one problem file."""
    problem, diagnostics = _inspect(Path(path))
    if diagnostics:
        raise InvalidProblem("; ".join(diagnostics))
    assert problem is not None
    return problem


def validate_problem(path: str | Path) -> list[str]:
    """All violations found in the file; empty means clean."""
    _, diagnostics = _inspect(Path(path))
    return diagnostics


def _inspect(path: Path) -> tuple[Problem | None, list[str]]:
    diagnostics: list[str] = []
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        return None, [f"cannot read problem file: {exc}"]
    except json.JSONDecodeError as exc:
        return None, [f"problem file is not valid JSON: {exc}"]
    if not isinstance(raw, dict):
        return None, ["problem file must be a JSON object"]

    for key in sorted(set(raw) - KNOWN_FIELDS):
        diagnostics.append(f"unknown field {key!r}")

    name = raw.get("name")
    if not isinstance(name, str) or not name:
        diagnostics.append("field 'name' must be a non-empty string")
        name = path.stem

    space = None
    try:
        space = build_space(
            {
                "params": raw.get("params"),
                "conditions": raw.get("conditions", []),
                "seed": raw.get("seed", 0),
            }
        )
    except SpaceError as exc:
        diagnostics.append(f"space definition invalid: {exc}")

    mold = None
    mold_path = None
    mold_rel = raw.get("mold")
    if not isinstance(mold_rel, str) or not mold_rel:
        diagnostics.append("field 'mold' must be a path string")
    else:
        mold_path = (path.parent / mold_rel).resolve()
        try:
            mold = CodeMold.from_text(mold_path.read_text(encoding="utf-8"))
        except OSError as exc:
            diagnostics.append(f"cannot read mold file {mold_rel!r}: {exc}")
        except TemplateError as exc:
            diagnostics.append(f"mold invalid: {exc}")
    if mold is not None and space is not None:
        for token in mold.tokens:
            if token not in space.names:
                diagnostics.append(f"unbound token #{token}: mold references no such parameter")

    compile_template = raw.get("compile")
    if not isinstance(compile_template, str) or not compile_template.strip():
        diagnostics.append("field 'compile' must be a command template string")
        compile_template = ""
    else:
        for placeholder in ("{src}", "{bin}"):
            if placeholder not in compile_template:
                diagnostics.append(f"compile template missing {placeholder}")
    run_template = raw.get("run")
    if not isinstance(run_template, str) or not run_template.strip():
        diagnostics.append("field 'run' must be a command template string")
        run_template = ""
    elif "{bin}" not in run_template:
        diagnostics.append("run template missing {bin}")

    policy = None
    try:
        policy = MeasurementPolicy(
            repeats=raw.get("repeats", MeasurementPolicy().repeats),
            aggregation=raw.get("aggregation", MeasurementPolicy().aggregation),
            timeout_sec=raw.get("timeout_sec", MeasurementPolicy().timeout_sec),
            objective_source=raw.get("objective_source", MeasurementPolicy().objective_source),
        )
    except (InvalidPolicy, TypeError) as exc:
        diagnostics.append(f"measurement policy invalid: {exc}")

    mock_objective = raw.get("mock_objective")
    if mock_objective is not None:
        if not isinstance(mock_objective, str) or mock_objective not in MOCK_OBJECTIVES:
            diagnostics.append(
                f"mock_objective must be one of {MOCK_OBJECTIVES}, got {mock_objective!r}"
            )
            mock_objective = None

    flag_preset = raw.get("flag_preset")
    flags: tuple[str, ...] = ()
    if flag_preset is not None:
        if not isinstance(flag_preset, str):
            diagnostics.append("flag_preset must be a string")
            flag_preset = None
        else:
            try:
                flags = get_preset(flag_preset).flags
            except CorpusError as exc:
                diagnostics.append(str(exc))

    if diagnostics or space is None or mold is None or policy is None:
        return None, diagnostics
    problem = Problem(
        name=name,
        path=path,
        mold=mold,
        mold_path=mold_path,
        space=space,
        compile_template=compile_template,
        run_template=run_template,
        policy=policy,
        flag_preset=flag_preset,
        flags=flags,
        mock_objective=mock_objective,
    )
    return problem, diagnostics
