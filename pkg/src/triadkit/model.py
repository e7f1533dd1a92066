"""Data objects: sorts, concepts, individuals, states and variable domains.

A data object is the triple (concept, individual, state).  States are
event-counted: every transition appends a history entry even when the new
valuation equals the old one.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .errors import (
    EnumerationTooLarge,
    InfiniteCarrier,
    PartialValuation,
    SortMismatch,
    UnknownAttribute,
)
from .values import SCALAR_KINDS, coerce_scalar, format_value, sorted_values

DEFAULT_ENUM_CAP = 10_000
ENUM_CAP_ENV = "TRIADKIT_MAX_ENUM"


def enumeration_cap() -> int:
    raw = os.environ.get(ENUM_CAP_ENV)
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_ENUM_CAP


@dataclass(frozen=True)
class Sort:
    """Either a finite carrier of constants or a builtin scalar kind."""

    name: str
    carrier: frozenset | None = None
    kind: str | None = None

    def __post_init__(self):
        if (self.carrier is None) == (self.kind is None):
            raise ValueError(f"sort {self.name}: give exactly one of carrier or kind")
        if self.carrier is not None:
            object.__setattr__(self, "carrier", frozenset(self.carrier))
            if not self.carrier:
                raise ValueError(f"sort {self.name}: finite carrier must be non-empty")
        elif self.kind not in SCALAR_KINDS:
            raise ValueError(f"sort {self.name}: unknown scalar kind {self.kind!r}")

    @property
    def finite(self) -> bool:
        return self.carrier is not None

    def coerce(self, value):
        """Return the value as stored under this sort, or raise SortMismatch."""
        if self.carrier is not None:
            if value in self.carrier:
                return value
            raise SortMismatch(f"{format_value(value)} is not in sort {self.name}")
        out = coerce_scalar(self.kind, value)
        if out is None:
            raise SortMismatch(f"{value!r} is not of kind {self.kind} (sort {self.name})")
        return out

    def accepts(self, value) -> bool:
        try:
            self.coerce(value)
        except SortMismatch:
            return False
        return True


BUILTIN_SORTS = {k: Sort(k, kind=k) for k in SCALAR_KINDS}


@dataclass(frozen=True)
class Concept:
    name: str
    attributes: tuple[tuple[str, Sort], ...] = ()
    level: int = 0

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))
        names = [a for a, _ in self.attributes]
        if len(set(names)) != len(names):
            raise ValueError(f"concept {self.name}: duplicate attribute names")
        if self.level < 0:
            raise ValueError("concept level must be non-negative")

    @property
    def attribute_names(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.attributes)

    def sort_of(self, attribute: str) -> Sort:
        for a, s in self.attributes:
            if a == attribute:
                return s
        raise UnknownAttribute(f"{self.name} has no attribute {attribute!r}")


@dataclass(frozen=True)
class Individual:
    """An expert-selected entity; ``key`` holds its identifying properties."""

    id: str
    concept: str
    key: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True, order=True)
class StateIndex:
    ordinal: int
    label: str | None = field(default=None, compare=False)


@dataclass(frozen=True)
class DataObject:
    concept: Concept
    individual: Individual
    history: tuple[tuple[StateIndex, Mapping[str, Any]], ...]

    @property
    def state(self) -> StateIndex:
        return self.history[-1][0]

    @property
    def valuation(self) -> Mapping[str, Any]:
        return self.history[-1][1]

    def valuation_at(self, ordinal: int | None) -> Mapping[str, Any]:
        """Valuation in force at ``ordinal`` (latest entry not after it)."""
        if ordinal is None:
            return self.valuation
        current = None
        for idx, val in self.history:
            if idx.ordinal > ordinal:
                break
            current = val
        if current is None:
            raise ValueError(f"{self.individual.id} has no state at or before {ordinal}")
        return current


def check_valuation(concept: Concept, valuation: Mapping[str, Any]) -> dict:
    """Validate totality and sorts; return the coerced valuation."""
    declared = concept.attribute_names
    for name in valuation:
        if name not in declared:
            raise UnknownAttribute(f"{concept.name} has no attribute {name!r}")
    missing = [a for a in declared if a not in valuation]
    if missing:
        raise PartialValuation(f"{concept.name}: missing {', '.join(missing)}")
    return {a: s.coerce(valuation[a]) for a, s in concept.attributes}


def check_key(concept: Concept, key: Mapping[str, Any]) -> dict:
    return {a: concept.sort_of(a).coerce(v) for a, v in key.items()}


def make_data_object(concept: Concept, individual: Individual,
                     initial_valuation: Mapping[str, Any],
                     label: str | None = None) -> DataObject:
    if individual.concept != concept.name:
        raise ValueError(
            f"individual {individual.id} belongs to {individual.concept}, not {concept.name}")
    check_key(concept, individual.key)
    valuation = check_valuation(concept, initial_valuation)
    return DataObject(concept, individual, ((StateIndex(0, label), valuation),))


def transition_state(obj: DataObject, new_valuation: Mapping[str, Any],
                     label: str | None = None) -> DataObject:
    valuation = check_valuation(obj.concept, new_valuation)
    entry = (StateIndex(obj.state.ordinal + 1, label), valuation)
    return DataObject(obj.concept, obj.individual, obj.history + (entry,))


def update_state(obj: DataObject, changes: Mapping[str, Any],
                 label: str | None = None) -> DataObject:
    """Transition with a partial update merged over the current valuation."""
    merged = dict(obj.valuation)
    merged.update(changes)
    return transition_state(obj, merged, label)


@dataclass(frozen=True)
class VariableDomain:
    sort: Sort
    index_set: frozenset
    members: tuple[Mapping[Any, Any], ...]


def variable_domain(sort: Sort, index_set: Iterable, cap: int | None = None) -> VariableDomain:
    """All total mappings from ``index_set`` into the sort's carrier."""
    if not sort.finite:
        raise InfiniteCarrier(f"sort {sort.name} has no finite carrier")
    cap = enumeration_cap() if cap is None else cap
    index = sorted_values(frozenset(index_set))
    carrier = sorted_values(sort.carrier)
    size = math.prod([len(carrier)] * len(index)) if index else 1
    if size > cap:
        raise EnumerationTooLarge(
            f"|{sort.name}|^{len(index)} = {size} exceeds the cap of {cap}")
    members = tuple(dict(zip(index, combo))
                    for combo in itertools.product(carrier, repeat=len(index)))
    return VariableDomain(sort, frozenset(index), members)


def serialize_data_object(obj: DataObject) -> str:
    """Canonical line-oriented text: one line per history entry, keys sorted."""
    lines = [f"object {obj.individual.id} : {obj.concept.name}"]
    if obj.individual.key:
        body = ", ".join(f"{k} = {format_value(v)}" for k, v in sorted(obj.individual.key.items()))
        lines.append(f"key {{{body}}}")
    for idx, val in obj.history:
        body = ", ".join(f"{k} = {format_value(v)}" for k, v in sorted(val.items()))
        label = f" {format_value(idx.label)}" if idx.label is not None else ""
        lines.append(f"state {idx.ordinal}{label} {{{body}}}")
    return "\n".join(lines) + "\n"
