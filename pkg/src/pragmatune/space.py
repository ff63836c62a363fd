"""Conditional mixed categorical/ordinal parameter spaces.

Defines, validates, samples, enumerates, and numerically encodes the
search domains the tuner walks over.  All public operations are pure
given (space, rng state); spaces and configurations are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping

import numpy as np

CATEGORICAL = "categorical"
ORDINAL = "ordinal"
KINDS = (CATEGORICAL, ORDINAL)


class SpaceError(Exception):
    """Base class for space definition and usage errors."""


class InvalidDefinition(SpaceError):
    """Malformed space definition (wrong shape or types)."""


class DuplicateName(SpaceError):
    """Two parameters share a name."""


class UnknownConditionTarget(SpaceError):
    """A condition references a parameter that is not declared."""


class DefaultNotInValues(SpaceError):
    """A parameter's default is not one of its values."""


class CyclicCondition(SpaceError):
    """Condition parent links form a cycle (self-loops included)."""


class DuplicateCondition(SpaceError):
    """More than one condition targets the same child parameter."""


class ValueNotInDomain(SpaceError):
    """An assignment or condition uses a value outside the parameter's values."""


class MissingParameter(SpaceError):
    """A raw assignment omits an unconditioned parameter."""


class SpaceTooLarge(SpaceError):
    """enumerate_space was asked to expand more configurations than its limit."""


class _InactiveType:
    """Singleton sentinel for parameters switched off by their condition."""

    _instance = None

    def __new__(cls) -> _InactiveType:
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INACTIVE"

    def __reduce__(self):
        return (_InactiveType, ())


INACTIVE = _InactiveType()


@dataclass(frozen=True)
class Parameter:
    """One tunable knob: a named categorical choice or ordinal sequence."""

    name: str
    kind: str
    values: tuple[str, ...]
    default: str

    def __post_init__(self) -> None:
        if not self.name or not isinstance(self.name, str):
            raise InvalidDefinition("parameter name must be a non-empty string")
        if self.kind not in KINDS:
            raise InvalidDefinition(f"parameter {self.name}: unknown kind {self.kind!r}")
        if not self.values:
            raise InvalidDefinition(f"parameter {self.name}: values must be non-empty")
        if any(not isinstance(v, str) for v in self.values):
            raise InvalidDefinition(f"parameter {self.name}: values must be strings")
        # the empty string is reserved for the INACTIVE CSV cell
        if any(v == "" for v in self.values):
            raise InvalidDefinition(f"parameter {self.name}: empty-string values are not allowed")
        if len(set(self.values)) != len(self.values):
            raise InvalidDefinition(f"parameter {self.name}: values must be distinct")
        if self.default not in self.values:
            raise DefaultNotInValues(f"parameter {self.name}: default {self.default!r} not in values")


@dataclass(frozen=True)
class Condition:
    """child is active iff the parent's assigned value is in `allowed`."""

    child: str
    parent: str
    allowed: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.child == self.parent:
            raise CyclicCondition(f"condition child {self.child!r} equals its parent")
        if not self.allowed:
            raise InvalidDefinition(f"condition on {self.child}: allowed set must be non-empty")


@dataclass(frozen=True)
class Configuration:
    """A full assignment of every space parameter to a value or INACTIVE.

    `items` follows the space's canonical parameter order, so equality and
    hashing coincide with activity-resolved configuration identity.
    """

    items: tuple[tuple[str, str | _InactiveType], ...]

    def __getitem__(self, name: str) -> str | _InactiveType:
        for key, value in self.items:
            if key == name:
                return value
        raise KeyError(name)

    def get(self, name: str, default=None):
        for key, value in self.items:
            if key == name:
                return value
        return default

    def is_active(self, name: str) -> bool:
        return self[name] is not INACTIVE

    def as_dict(self) -> dict[str, str | _InactiveType]:
        return dict(self.items)

    def __iter__(self) -> Iterator[tuple[str, str | _InactiveType]]:
        return iter(self.items)


@dataclass(frozen=True)
class ParamSpace:
    """Ordered parameters plus activation conditions; the searchable domain."""

    parameters: tuple[Parameter, ...]
    conditions: tuple[Condition, ...] = ()
    seed: int = 0

    # caches derived in __post_init__; not dataclass fields
    _by_name: dict = field(init=False, repr=False, compare=False, hash=False, default=None)

    def __post_init__(self) -> None:
        names = [p.name for p in self.parameters]
        seen: set[str] = set()
        for name in names:
            if name in seen:
                raise DuplicateName(f"duplicate parameter name {name!r}")
            seen.add(name)
        by_name = {p.name: p for p in self.parameters}
        child_cond: dict[str, Condition] = {}
        for cond in self.conditions:
            for endpoint in (cond.child, cond.parent):
                if endpoint not in by_name:
                    raise UnknownConditionTarget(f"condition references unknown parameter {endpoint!r}")
            if cond.child in child_cond:
                raise DuplicateCondition(f"parameter {cond.child!r} has more than one condition")
            child_cond[cond.child] = cond
            parent = by_name[cond.parent]
            for value in cond.allowed:
                if value not in parent.values:
                    raise ValueNotInDomain(
                        f"condition on {cond.child}: {value!r} not a value of parent {cond.parent}"
                    )
        self._check_acyclic(child_cond)
        object.__setattr__(self, "_by_name", by_name)
        object.__setattr__(self, "_child_cond", child_cond)
        object.__setattr__(self, "_pos", {name: i for i, name in enumerate(names)})
        object.__setattr__(self, "_resolution_order", self._topo_order(child_cond))
        self._build_encoding_layout()

    @staticmethod
    def _check_acyclic(child_cond: Mapping[str, Condition]) -> None:
        for start in child_cond:
            node, hops = start, 0
            while node in child_cond:
                node = child_cond[node].parent
                hops += 1
                if hops > len(child_cond):
                    raise CyclicCondition(f"condition chain through {start!r} forms a cycle")

    def _topo_order(self, child_cond: Mapping[str, Condition]) -> tuple[int, ...]:
        # parents resolved before children so cascaded deactivation is single-pass
        order: list[str] = []
        placed: set[str] = set()

        def place(name: str) -> None:
            if name in placed:
                return
            cond = child_cond.get(name)
            if cond is not None:
                place(cond.parent)
            placed.add(name)
            order.append(name)

        for p in self.parameters:
            place(p.name)
        return tuple(self._pos[name] for name in order)

    def _build_encoding_layout(self) -> None:
        slices: list[tuple[int, int]] = []
        offset = 0
        for p in self.parameters:
            width = 1 if p.kind == ORDINAL else len(p.values)
            slices.append((offset, width))
            offset += width
        object.__setattr__(self, "_feature_slices", tuple(slices))
        object.__setattr__(self, "_feature_len", offset)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.parameters)

    @property
    def feature_length(self) -> int:
        return self._feature_len

    def parameter(self, name: str) -> Parameter:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownConditionTarget(f"unknown parameter {name!r}") from None

    def condition_for(self, child: str) -> Condition | None:
        return self._child_cond.get(child)

    def has_ordinal(self) -> bool:
        return any(p.kind == ORDINAL for p in self.parameters)

    # ---- index-matrix plumbing ----------------------------------------
    # Rows are per-parameter value indices in canonical order; -1 = INACTIVE.
    # The vectorized samplers, encoder, and enumerator all share this form.

    def _resolve_indices(self, idx: np.ndarray) -> np.ndarray:
        out = idx.copy()
        for pos in self._resolution_order:
            cond = self._child_cond.get(self.parameters[pos].name)
            if cond is None:
                continue
            parent_pos = self._pos[cond.parent]
            parent_values = self._by_name[cond.parent].values
            allowed = np.array([parent_values.index(v) for v in cond.allowed])
            ok = np.isin(out[:, parent_pos], allowed)
            out[:, pos] = np.where(ok, out[:, pos], -1)
        return out

    def _config_from_indices(self, row: np.ndarray) -> Configuration:
        items = tuple(
            (p.name, INACTIVE if row[i] < 0 else p.values[row[i]])
            for i, p in enumerate(self.parameters)
        )
        return Configuration(items)

    def _indices_of(self, config: Configuration) -> np.ndarray:
        row = np.empty(len(self.parameters), dtype=np.int64)
        for i, (p, (name, value)) in enumerate(zip(self.parameters, config.items)):
            if name != p.name:
                raise ValueNotInDomain(f"configuration order mismatch at {name!r}")
            if value is INACTIVE:
                row[i] = -1
            else:
                try:
                    row[i] = p.values.index(value)
                except ValueError:
                    raise ValueNotInDomain(f"{value!r} not in domain of {p.name}") from None
        return row

    def _encode_indices(self, idx: np.ndarray) -> np.ndarray:
        n = idx.shape[0]
        X = np.zeros((n, self._feature_len), dtype=np.float64)
        for i, p in enumerate(self.parameters):
            start, width = self._feature_slices[i]
            col = idx[:, i]
            inactive = col < 0
            if p.kind == ORDINAL:
                k = len(p.values)
                coords = col / (k - 1) if k > 1 else np.zeros(n)
                X[:, start] = np.where(inactive, -1.0, coords)
            else:
                block = X[:, start : start + width]
                block[np.arange(n), np.clip(col, 0, None)] = 1.0
                block[inactive] = -1.0
        return X


def build_space(definition: Mapping) -> ParamSpace:
    """Build and validate a ParamSpace from a problem-file space section."""
    if not isinstance(definition, Mapping):
        raise InvalidDefinition("space definition must be a mapping")
    raw_params = definition.get("params")
    if not isinstance(raw_params, (list, tuple)) or not raw_params:
        raise InvalidDefinition("space definition needs a non-empty 'params' list")
    params = []
    for entry in raw_params:
        if not isinstance(entry, Mapping):
            raise InvalidDefinition("each parameter must be a mapping")
        try:
            params.append(
                Parameter(
                    name=entry["name"],
                    kind=entry["kind"],
                    values=tuple(entry["values"]),
                    default=entry["default"],
                )
            )
        except KeyError as exc:
            raise InvalidDefinition(f"parameter entry missing field {exc}") from None
    conds = []
    for entry in definition.get("conditions", ()):
        if not isinstance(entry, Mapping):
            raise InvalidDefinition("each condition must be a mapping")
        try:
            conds.append(
                Condition(
                    child=entry["child"],
                    parent=entry["parent"],
                    allowed=tuple(entry["allowed"]),
                )
            )
        except KeyError as exc:
            raise InvalidDefinition(f"condition entry missing field {exc}") from None
    seed = definition.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise InvalidDefinition("space seed must be a non-negative integer")
    return ParamSpace(parameters=tuple(params), conditions=tuple(conds), seed=seed)


def size(space: ParamSpace) -> int:
    """Full cross product of value counts, ignoring conditions."""
    return math.prod(len(p.values) for p in space.parameters)


def resolve_activity(space: ParamSpace, raw: Mapping[str, str]) -> Configuration:
    """Apply activation conditions to a raw assignment.

    Conditioned parameters whose condition fails become INACTIVE; all others
    take their raw value, or their default if absent.
    """
    for key in raw:
        if key not in space._by_name:
            raise ValueNotInDomain(f"unknown parameter {key!r} in assignment")
    values: dict[str, str | _InactiveType] = {}
    for pos in space._resolution_order:
        p = space.parameters[pos]
        cond = space.condition_for(p.name)
        if cond is not None:
            parent_value = values[cond.parent]
            if parent_value is INACTIVE or parent_value not in cond.allowed:
                values[p.name] = INACTIVE
                continue
        if p.name in raw:
            value = raw[p.name]
            if value not in p.values:
                raise ValueNotInDomain(f"{value!r} not in domain of {p.name}")
        elif cond is not None:
            value = p.default
        else:
            raise MissingParameter(f"assignment missing unconditioned parameter {p.name!r}")
        values[p.name] = value
    return Configuration(tuple((p.name, values[p.name]) for p in space.parameters))


def configuration_from_values(
    space: ParamSpace, values: Mapping[str, str | _InactiveType]
) -> Configuration:
    """Rebuild a Configuration from stored values, checking every invariant."""
    row = np.empty(len(space.parameters), dtype=np.int64)
    for i, p in enumerate(space.parameters):
        if p.name not in values:
            raise MissingParameter(f"stored configuration missing parameter {p.name!r}")
        value = values[p.name]
        if value is INACTIVE:
            row[i] = -1
        elif value in p.values:
            row[i] = p.values.index(value)
        else:
            raise ValueNotInDomain(f"{value!r} not in domain of {p.name}")
    for p in space.parameters:
        cond = space.condition_for(p.name)
        if cond is None:
            expect_active = True
        else:
            parent_value = values[cond.parent]
            expect_active = parent_value is not INACTIVE and parent_value in cond.allowed
        if (values[p.name] is INACTIVE) == expect_active:
            raise ValueNotInDomain(
                f"parameter {p.name}: activity flag inconsistent with its condition"
            )
    return space._config_from_indices(row)


def sample_random(space: ParamSpace, rng: np.random.Generator, n: int) -> list[Configuration]:
    """n configurations, each parameter uniform over its values, activity-resolved."""
    if n < 1:
        raise ValueError("n must be >= 1")
    idx = _random_index_matrix(space, rng, n)
    return [space._config_from_indices(row) for row in idx]


def sample_lhs(space: ParamSpace, rng: np.random.Generator, n: int) -> list[Configuration]:
    """Latin-hypercube-style sample: ordinal ranks stratified, categoricals uniform."""
    if n < 1:
        raise ValueError("n must be >= 1")
    idx = _lhs_index_matrix(space, rng, n)
    return [space._config_from_indices(row) for row in idx]


def encode(space: ParamSpace, config: Configuration) -> np.ndarray:
    """Fixed-length numeric vector: ordinal rank/(k-1), categorical one-hot, INACTIVE -1."""
    row = space._indices_of(config)
    return space._encode_indices(row[None, :])[0]


def enumerate_space(space: ParamSpace, limit: int) -> list[Configuration]:
    """All distinct activity-resolved configurations in lexicographic index order."""
    idx = enumerate_indices(space, limit)
    return [space._config_from_indices(row) for row in idx]


def enumerate_indices(space: ParamSpace, limit: int) -> np.ndarray:
    """Index-matrix form of enumerate_space (deduplicated, sorted)."""
    total = size(space)
    if total > limit:
        raise SpaceTooLarge(f"space has {total} raw configurations, limit is {limit}")
    grids = np.meshgrid(
        *[np.arange(len(p.values)) for p in space.parameters], indexing="ij"
    )
    raw = np.stack([g.reshape(-1) for g in grids], axis=1)
    resolved = space._resolve_indices(raw)
    return np.unique(resolved, axis=0)


def _random_index_matrix(space: ParamSpace, rng: np.random.Generator, n: int) -> np.ndarray:
    idx = np.empty((n, len(space.parameters)), dtype=np.int64)
    for i, p in enumerate(space.parameters):
        idx[:, i] = rng.integers(0, len(p.values), size=n)
    return space._resolve_indices(idx)


def _lhs_index_matrix(space: ParamSpace, rng: np.random.Generator, n: int) -> np.ndarray:
    idx = np.empty((n, len(space.parameters)), dtype=np.int64)
    for i, p in enumerate(space.parameters):
        k = len(p.values)
        if p.kind == ORDINAL:
            # every rank appears floor(n/k) times, remainder ranks chosen without
            # replacement, so no rank is used more than ceil(n/k) times
            bins = np.tile(np.arange(k), n // k)
            remainder = n - bins.size
            if remainder:
                bins = np.concatenate([bins, rng.choice(k, size=remainder, replace=False)])
            idx[:, i] = rng.permutation(bins)
        else:
            idx[:, i] = rng.integers(0, k, size=n)
    return space._resolve_indices(idx)
