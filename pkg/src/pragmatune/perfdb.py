"""Append-only performance database persisted as results.csv + results.json.

Both files carry identical information: one row/object per proposal, in
evaluation order, including failures and duplicate proposals.  The CSV is
the bit-exact canonical form (RFC-4180, parameters in canonical space
order, INACTIVE as the empty field); the JSON mirror is rewritten
atomically on every append.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .evaluator import MEASUREMENT_STATUSES, OK
from .space import INACTIVE, Configuration, ParamSpace, SpaceError, configuration_from_values

DUPLICATE = "duplicate"
RECORD_STATUSES = MEASUREMENT_STATUSES + (DUPLICATE,)
RESERVED_COLUMNS = ("objective", "elapsed_sec", "status", "duplicate_of", "timestamp")
CSV_NAME = "results.csv"
JSON_NAME = "results.json"
OBJECTIVE_DECIMALS = 6


class PerfDbError(Exception):
    """Base class for performance-database errors."""


class IoError(PerfDbError):
    """Underlying file operation failed."""


class IndexGap(PerfDbError):
    """Appended record index is not previous max + 1."""


class SchemaMismatch(PerfDbError):
    """File columns disagree with the space's canonical parameter order."""


class ParseError(PerfDbError):
    """A results file exists but does not parse as written."""


class ConsistencyError(PerfDbError):
    """results.csv and results.json disagree."""


class NoSuccessfulEvaluation(PerfDbError):
    """find_min needs at least one ok record."""


def iso_timestamp(epoch_seconds: float) -> str:
    return datetime.fromtimestamp(epoch_seconds, timezone.utc).isoformat()


def format_seconds(value: float) -> str:
    """Up to 6 fractional digits, trailing zeros trimmed."""
    text = f"{value:.{OBJECTIVE_DECIMALS}f}"
    return text.rstrip("0").rstrip(".") or "0"


@dataclass(frozen=True)
class EvalRecord:
    """One proposal: its configuration plus measurement outcome."""

    index: int
    config: Configuration
    objective: float | None
    elapsed: float
    status: str
    duplicate_of: int | None
    timestamp: str

    def __post_init__(self) -> None:
        if self.index < 1:
            raise PerfDbError("record index must be >= 1")
        if self.status not in RECORD_STATUSES:
            raise PerfDbError(f"unknown record status {self.status!r}")
        if (self.status == OK) != (self.objective is not None):
            raise PerfDbError("objective present iff status is ok")
        if (self.status == DUPLICATE) != (self.duplicate_of is not None):
            raise PerfDbError("duplicate_of present iff status is duplicate")
        if self.objective is not None and not (
            math.isfinite(self.objective) and self.objective >= 0
        ):
            raise PerfDbError("objective must be finite and non-negative")
        if self.duplicate_of is not None and not (1 <= self.duplicate_of < self.index):
            raise PerfDbError("duplicate_of must reference an earlier record")
        if not self.timestamp:
            raise PerfDbError("timestamp must be non-empty")

    @classmethod
    def create(
        cls,
        index: int,
        config: Configuration,
        objective: float | None,
        elapsed: float,
        status: str,
        duplicate_of: int | None,
        timestamp: str,
    ) -> EvalRecord:
        """Rounds seconds to the persisted precision so memory equals disk."""
        return cls(
            index=index,
            config=config,
            objective=None if objective is None else round(objective, OBJECTIVE_DECIMALS),
            elapsed=round(elapsed, OBJECTIVE_DECIMALS),
            status=status,
            duplicate_of=duplicate_of,
            timestamp=timestamp,
        )


class PerfDb:
    """Single-writer append-only store bound to one space and one directory."""

    def __init__(self, space: ParamSpace, directory: str | Path) -> None:
        for name in space.names:
            if name in RESERVED_COLUMNS:
                raise SchemaMismatch(f"parameter name {name!r} collides with a results column")
        self.space = space
        self.directory = Path(directory)
        self.csv_path = self.directory / CSV_NAME
        self.json_path = self.directory / JSON_NAME
        self.records: list[EvalRecord] = []
        self._first_index: dict[Configuration, int] = {}
        self._json_rows: list[dict] = []

    @classmethod
    def fresh(cls, space: ParamSpace, directory: str | Path) -> PerfDb:
        """Empty db; removes any previous results files in the directory."""
        db = cls(space, directory)
        try:
            db.directory.mkdir(parents=True, exist_ok=True)
            db.csv_path.unlink(missing_ok=True)
            db.json_path.unlink(missing_ok=True)
        except OSError as exc:
            raise IoError(str(exc)) from exc
        return db

    @property
    def distinct_count(self) -> int:
        return len(self._first_index)

    def header(self) -> list[str]:
        return list(self.space.names) + list(RESERVED_COLUMNS)

    def append(self, record: EvalRecord) -> None:
        expected = self.records[-1].index + 1 if self.records else 1
        if record.index != expected:
            raise IndexGap(f"expected index {expected}, got {record.index}")
        try:
            self._write_csv_row(record)
            self._write_json(record)
        except OSError as exc:
            raise IoError(str(exc)) from exc
        self.records.append(record)
        self._first_index.setdefault(record.config, record.index)

    def contains(self, config: Configuration) -> int | None:
        """Index of the first record with this activity-resolved configuration."""
        return self._first_index.get(config)

    def find_min(self) -> tuple[EvalRecord, int]:
        """Lowest-objective ok record; ties broken by lowest index."""
        best: EvalRecord | None = None
        for record in self.records:
            if record.status != OK:
                continue
            if best is None or record.objective < best.objective:
                best = record
        if best is None:
            raise NoSuccessfulEvaluation("no record with status ok")
        return best, best.index

    # ---- persistence ----------------------------------------------------

    def _csv_cells(self, record: EvalRecord) -> list[str]:
        cells = ["" if value is INACTIVE else value for _, value in record.config]
        cells.append("" if record.objective is None else format_seconds(record.objective))
        cells.append(format_seconds(record.elapsed))
        cells.append(record.status)
        cells.append("" if record.duplicate_of is None else str(record.duplicate_of))
        cells.append(record.timestamp)
        return cells

    def _json_object(self, record: EvalRecord) -> dict:
        obj: dict = {
            name: (None if value is INACTIVE else value) for name, value in record.config
        }
        obj["objective"] = record.objective
        obj["elapsed_sec"] = record.elapsed
        obj["status"] = record.status
        obj["duplicate_of"] = record.duplicate_of
        obj["timestamp"] = record.timestamp
        return obj

    def _write_csv_row(self, record: EvalRecord) -> None:
        fresh = not self.csv_path.exists()
        with open(self.csv_path, "a", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            if fresh:
                writer.writerow(self.header())
            writer.writerow(self._csv_cells(record))
            handle.flush()

    def _write_json(self, record: EvalRecord) -> None:
        self._json_rows.append(self._json_object(record))
        tmp = self.json_path.with_name(self.json_path.name + ".tmp")
        with open(tmp, "w", encoding="utf-8") as handle:
            json.dump(self._json_rows, handle, indent=2)
            handle.write("\n")
            handle.flush()
        os.replace(tmp, self.json_path)


def load(space: ParamSpace, directory: str | Path) -> PerfDb:
    """Reconstruct a db from its results files, checking they agree."""
    db = PerfDb(space, directory)
    if not db.csv_path.exists() or not db.json_path.exists():
        raise IoError(f"results files not found in {db.directory}")
    records = _load_csv(db)
    _check_json(db, records)
    for record in records:
        db.records.append(record)
        db._first_index.setdefault(record.config, record.index)
        db._json_rows.append(db._json_object(record))
    return db


def _parse_float(text: str, column: str, line: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"line {line}: column {column} is not a number: {text!r}") from None


def _load_csv(db: PerfDb) -> list[EvalRecord]:
    with open(db.csv_path, newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    if not rows:
        raise ParseError("results.csv is empty (missing header)")
    if rows[0] != db.header():
        raise SchemaMismatch(
            f"results.csv header {rows[0]!r} does not match expected {db.header()!r}"
        )
    names = db.space.names
    records = []
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != len(names) + len(RESERVED_COLUMNS):
            raise ParseError(f"line {line_no}: expected {len(names) + 5} fields, got {len(row)}")
        values = {
            name: (INACTIVE if cell == "" else cell) for name, cell in zip(names, row)
        }
        try:
            config = configuration_from_values(db.space, values)
        except SpaceError as exc:
            raise ParseError(f"line {line_no}: {exc}") from exc
        obj_cell, elapsed_cell, status, dup_cell, timestamp = row[len(names):]
        objective = None if obj_cell == "" else _parse_float(obj_cell, "objective", line_no)
        elapsed = _parse_float(elapsed_cell, "elapsed_sec", line_no)
        if dup_cell == "":
            duplicate_of = None
        elif dup_cell.isdigit():
            duplicate_of = int(dup_cell)
        else:
            raise ParseError(f"line {line_no}: duplicate_of is not an index: {dup_cell!r}")
        try:
            records.append(
                EvalRecord(
                    index=line_no - 1,
                    config=config,
                    objective=objective,
                    elapsed=elapsed,
                    status=status,
                    duplicate_of=duplicate_of,
                    timestamp=timestamp,
                )
            )
        except PerfDbError as exc:
            raise ParseError(f"line {line_no}: {exc}") from exc
    return records


def _check_json(db: PerfDb, records: list[EvalRecord]) -> None:
    try:
        with open(db.json_path, encoding="utf-8") as handle:
            data = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ParseError(f"results.json: {exc}") from exc
    if not isinstance(data, list):
        raise ParseError("results.json must be a top-level array")
    if len(data) != len(records):
        raise ConsistencyError(
            f"results.json has {len(data)} records, results.csv has {len(records)}"
        )
    for i, (obj, record) in enumerate(zip(data, records), start=1):
        if not isinstance(obj, dict):
            raise ParseError(f"results.json record {i} is not an object")
        if obj != db._json_object(record):
            raise ConsistencyError(f"record {i} differs between results.json and results.csv")


# ---- space-free row access (report/plot work on files alone) ------------


@dataclass(frozen=True)
class RowView:
    """One results row read without a space definition."""

    index: int
    params: tuple[tuple[str, str | None], ...]
    objective: float | None
    elapsed: float
    status: str
    duplicate_of: int | None
    timestamp: str


def read_rows(directory: str | Path) -> list[RowView]:
    """Read results.csv generically; cross-check against results.json."""
    directory = Path(directory)
    csv_path = directory / CSV_NAME
    json_path = directory / JSON_NAME
    if not csv_path.exists():
        raise IoError(f"{csv_path} not found")
    with open(csv_path, newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    if not rows:
        raise ParseError("results.csv is empty (missing header)")
    header = rows[0]
    if len(header) < len(RESERVED_COLUMNS) or tuple(header[-5:]) != RESERVED_COLUMNS:
        raise SchemaMismatch(f"results.csv header must end with {RESERVED_COLUMNS}")
    names = header[:-5]
    views = []
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ParseError(f"line {line_no}: expected {len(header)} fields, got {len(row)}")
        params = tuple(
            (name, None if cell == "" else cell) for name, cell in zip(names, row)
        )
        obj_cell, elapsed_cell, status, dup_cell, timestamp = row[len(names):]
        if status not in RECORD_STATUSES:
            raise ParseError(f"line {line_no}: unknown status {status!r}")
        views.append(
            RowView(
                index=line_no - 1,
                params=params,
                objective=None if obj_cell == "" else _parse_float(obj_cell, "objective", line_no),
                elapsed=_parse_float(elapsed_cell, "elapsed_sec", line_no),
                status=status,
                duplicate_of=None if dup_cell == "" else int(dup_cell),
                timestamp=timestamp,
            )
        )
    if json_path.exists():
        try:
            with open(json_path, encoding="utf-8") as handle:
                data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ParseError(f"results.json: {exc}") from exc
        if not isinstance(data, list) or len(data) != len(views):
            raise ConsistencyError("results.json record count differs from results.csv")
        for view, obj in zip(views, data):
            expected = {name: value for name, value in view.params}
            expected.update(
                objective=view.objective,
                elapsed_sec=view.elapsed,
                status=view.status,
                duplicate_of=view.duplicate_of,
                timestamp=view.timestamp,
            )
            if obj != expected:
                raise ConsistencyError(
                    f"record {view.index} differs between results.json and results.csv"
                )
    return views
