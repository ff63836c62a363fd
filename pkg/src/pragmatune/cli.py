"""Command-line surface: tune, report, plot, validate, enumerate.

Exit codes: 0 success, 2 invalid problem/arguments, 3 no successful
evaluation.
"""

from __future__ import annotations

import argparse
import shutil
import sys
import time
from pathlib import Path

from . import corpus
from .evaluator import OK, evaluate, mock_evaluate
from .optimizer import InvalidOptions, TuneOptions, TuneResult, tune
from .perfdb import (
    DUPLICATE,
    NoSuccessfulEvaluation,
    PerfDb,
    PerfDbError,
    format_seconds,
    read_rows,
)
from .problem import InvalidProblem, Problem, load_problem, validate_problem
from .space import INACTIVE, SpaceError, enumerate_indices, size
from .templater import instantiate

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NO_SUCCESS = 3
DEFAULT_ENUMERATE_LIMIT = 1_000_000
MOCK_CLOCK_EPOCH = 1_000_000_000.0
INACTIVE_DISPLAY = "<inactive>"


class _CountingClock:
    """Deterministic stand-in for time.time: fixed epoch, one second per call."""

    def __init__(self, start: float = MOCK_CLOCK_EPOCH) -> None:
        self._now = start

    def __call__(self) -> float:
        self._now += 1.0
        return self._now


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load(problem_path: str) -> Problem:
    return load_problem(problem_path)


def _make_mock_evaluator(problem: Problem):
    objective_id = problem.mock_objective

    def evaluator(config, index):
        return mock_evaluate(problem.space, config, objective_id, problem.space.seed)

    return evaluator


def _make_real_evaluator(problem: Problem, out_dir: Path, clean: bool):
    def evaluator(config, index):
        workdir = out_dir / f"eval_{index:04d}"
        source = instantiate(problem.mold, config)
        measurement = evaluate(
            problem, source, config, workdir, problem.policy, eval_index=index
        )
        if clean:
            shutil.rmtree(workdir, ignore_errors=True)
        return measurement

    return evaluator


def _print_config(config) -> None:
    for name, value in config:
        print(f"{name}={INACTIVE_DISPLAY if value is INACTIVE else value}")


def _counts(records) -> tuple[int, int, int]:
    ok = sum(1 for r in records if r.status == OK)
    duplicate = sum(1 for r in records if r.status == DUPLICATE)
    failed = len(records) - ok - duplicate
    return ok, failed, duplicate


def cmd_tune(args: argparse.Namespace) -> int:
    try:
        problem = _load(args.problem)
    except InvalidProblem as exc:
        return _fail(str(exc), EXIT_INVALID)
    try:
        opts = TuneOptions(
            max_evals=args.max_evals,
            learner=args.learner.upper(),
            n_init=args.n_init,
            kappa=args.kappa,
            seed=args.seed,
        )
    except InvalidOptions as exc:
        return _fail(str(exc), EXIT_INVALID)
    if args.mock and problem.mock_objective is None:
        return _fail(
            f"problem {problem.name!r} declares no mock_objective; --mock is unavailable",
            EXIT_INVALID,
        )
    out_dir = Path(args.out_dir) if args.out_dir else Path(f"{problem.name}_results")
    try:
        db = PerfDb.fresh(problem.space, out_dir)
    except PerfDbError as exc:
        return _fail(str(exc), EXIT_INVALID)
    if args.mock:
        evaluator = _make_mock_evaluator(problem)
        clock = _CountingClock()
    else:
        evaluator = _make_real_evaluator(problem, out_dir, args.clean)
        clock = time.time
    try:
        result = tune(problem, opts, evaluator, db, clock=clock)
    except NoSuccessfulEvaluation:
        print(f"results: {db.csv_path}")
        return _fail("no successful evaluation", EXIT_NO_SUCCESS)
    _print_summary(result)
    print(f"results: {db.csv_path}")
    return EXIT_OK


def _print_summary(result: TuneResult) -> None:
    print(f"best={format_seconds(result.best.objective)}")
    print(f"at evaluation {result.best_index}")
    _print_config(result.best.config)
    ok, failed, duplicate = _counts(result.trace)
    print(
        f"proposed={result.proposed} evaluated={result.evaluated} "
        f"ok={ok} failed={failed} duplicate={duplicate}"
    )


def cmd_report(args: argparse.Namespace) -> int:
    try:
        rows = read_rows(args.results_dir)
    except PerfDbError as exc:
        return _fail(str(exc), EXIT_INVALID)
    ok_rows = [row for row in rows if row.status == OK]
    if not ok_rows:
        return _fail("no successful evaluation recorded", EXIT_NO_SUCCESS)
    best = min(ok_rows, key=lambda row: (row.objective, row.index))
    print(f"best={format_seconds(best.objective)}")
    print(f"at evaluation {best.index}")
    for name, value in best.params:
        print(f"{name}={INACTIVE_DISPLAY if value is None else value}")
    ok, failed, duplicate = _counts(rows)
    print(f"ok={ok} failed={failed} duplicate={duplicate}")
    return EXIT_OK


def cmd_plot(args: argparse.Namespace) -> int:
    from .plotting import write_plot, write_trace_csv

    try:
        rows = read_rows(args.results_dir)
    except PerfDbError as exc:
        return _fail(str(exc), EXIT_INVALID)
    if not any(row.status == OK for row in rows):
        return _fail("no successful evaluation recorded", EXIT_NO_SUCCESS)
    results_dir = Path(args.results_dir)
    out_path = Path(args.out_path) if args.out_path else results_dir / "plot.svg"
    trace_path = results_dir / "trace.csv"
    write_trace_csv(rows, trace_path)
    write_plot(rows, out_path)
    print(f"plot: {out_path}")
    print(f"trace: {trace_path}")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    diagnostics = validate_problem(args.problem)
    if diagnostics:
        for line in diagnostics:
            print(line)
        return EXIT_INVALID
    print("ok: problem file is valid")
    return EXIT_OK


def cmd_enumerate(args: argparse.Namespace) -> int:
    try:
        problem = _load(args.problem)
    except InvalidProblem as exc:
        return _fail(str(exc), EXIT_INVALID)
    print(f"size={size(problem.space)}")
    if args.distinct:
        try:
            idx = enumerate_indices(problem.space, limit=args.limit)
        except SpaceError as exc:
            return _fail(str(exc), EXIT_INVALID)
        print(f"distinct={idx.shape[0]}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pragmatune",
        description="Autotune pragma-parameterized code molds by compiling and timing them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    tune_p = sub.add_parser("tune", help="run the optimization loop on a problem file")
    tune_p.add_argument("problem", help="path to a problem JSON file")
    tune_p.add_argument(
        "--max-evals",
        "--max-vals",
        dest="max_evals",
        type=int,
        default=100,
        help="proposal budget (default: 100)",
    )
    tune_p.add_argument(
        "--learner",
        default="RF",
        help="surrogate kind: RF, ET, GBRT, or GP (default: RF)",
    )
    tune_p.add_argument("--n-init", type=int, default=None, help="initialization draws")
    tune_p.add_argument("--kappa", type=float, default=1.96, help="LCB exploration weight")
    tune_p.add_argument(
        "--mock",
        action="store_true",
        help="use the problem's mock_objective instead of compiling",
    )
    tune_p.add_argument("--seed", type=int, default=42, help="search seed (default: 42)")
    tune_p.add_argument("--out-dir", default=None, help="output directory for results files")
    tune_p.add_argument(
        "--clean", action="store_true", help="delete per-evaluation work directories"
    )
    tune_p.set_defaults(handler=cmd_tune)

    report_p = sub.add_parser("report", help="print the best recorded configuration")
    report_p.add_argument("results_dir", help="directory holding results.csv/results.json")
    report_p.set_defaults(handler=cmd_report)

    plot_p = sub.add_parser("plot", help="write an SVG trace plot and trace.csv")
    plot_p.add_argument("results_dir", help="directory holding results.csv/results.json")
    plot_p.add_argument("out_path", nargs="?", default=None, help="SVG output path")
    plot_p.set_defaults(handler=cmd_plot)

    validate_p = sub.add_parser("validate", help="check a problem file and print violations")
    validate_p.add_argument("problem", help="path to a problem JSON file")
    validate_p.set_defaults(handler=cmd_validate)

    enum_p = sub.add_parser("enumerate", help="print space size (and distinct count)")
    enum_p.add_argument("problem", help="path to a problem JSON file")
    enum_p.add_argument(
        "--distinct",
        action="store_true",
        help="also enumerate distinct activity-resolved configurations",
    )
    enum_p.add_argument(
        "--limit",
        type=int,
        default=DEFAULT_ENUMERATE_LIMIT,
        help=f"enumeration safety limit (default: {DEFAULT_ENUMERATE_LIMIT})",
    )
    enum_p.set_defaults(handler=cmd_enumerate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
