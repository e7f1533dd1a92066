"""The schema bundle: every declaration a document can carry.

Declarations keep symbolic references (sort names, concept names, unit
names) so that dangling references are representable and can be reported
by the integrity checker instead of being impossible to construct.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any, Iterator, Mapping, Union

from .errors import UndeclaredSymbol
from .formula import Expression, Formula, SetLit, literals
from .model import BUILTIN_SORTS, Concept, DataObject, Individual, Sort, make_data_object
from .semnet import Frame, NetworkLanguage, SemanticNetwork
from .values import Const, is_number


@dataclass(frozen=True)
class ConceptDecl:
    name: str
    attributes: tuple[tuple[str, str], ...] = ()
    level: int = 0


@dataclass(frozen=True)
class IndividualDecl:
    id: str
    concept: str
    key: Mapping[str, Any] = field(default_factory=dict)
    values: Mapping[str, Any] = field(default_factory=dict)

    @property
    def individual(self) -> Individual:
        return Individual(self.id, self.concept, dict(self.key))


@dataclass(frozen=True)
class MetaPredicate:
    """A level-(j+1) predicate formed by compression over level-j entities."""

    name: str
    level: int
    var: str
    domain: Union[str, SetLit]
    body: Formula
    extension: frozenset | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Component:
    """One named cell of a metric, e.g. ``z_devel``; value optional."""

    name: str
    value: Any = None


@dataclass(frozen=True)
class Metric:
    """A metric with an explicit dependency set over assignment kinds.

    ``table`` maps a label (one value per dependency kind, in ``depends``
    order) to its component.
    """

    name: str
    depends: tuple[str, ...] = ()
    table: Mapping[tuple, Component] = field(default_factory=dict)


@dataclass(frozen=True)
class OrgUnitDecl:
    name: str
    parent: str | None = None
    vacancies: int = 0
    enrolled: int = 0


@dataclass(frozen=True)
class RoleDecl:
    name: str
    metadata: str = "read"
    writes: str = "unit"
    requires: tuple[str, ...] = ()


@dataclass(frozen=True)
class UserDecl:
    name: str
    unit: str
    role: str
    admin: bool = False
    grants: tuple[str, ...] = ()


@dataclass(frozen=True)
class Placeholder:
    """``$subject`` or ``$unit`` inside a script action."""

    name: str


@dataclass(frozen=True)
class SetAction:
    attribute: str
    value: Any


@dataclass(frozen=True)
class FrameAction:
    relation: str
    subject: Any
    object: Any


@dataclass(frozen=True)
class VacancyAction:
    unit: Any
    delta: int


@dataclass(frozen=True)
class CounterAction:
    name: str
    delta: int


@dataclass(frozen=True)
class FailAction:
    message: str


Action = Union[SetAction, FrameAction, VacancyAction, CounterAction, FailAction]


@dataclass(frozen=True)
class ScriptDecl:
    event: str
    concept: str | None = None
    unit: str | None = None
    actions: tuple[Action, ...] = ()


@dataclass(frozen=True)
class FunctionalDecl:
    name: str
    concept: str


@dataclass(frozen=True)
class ComponentDecl:
    name: str
    requires: tuple[str, ...] = ()


BUILTIN_EVENTS = ("enroll", "transfer", "dismiss", "re_enroll")

# Canonical declaration order; also the kind vocabulary of the merger.
KIND_ORDER = (
    "component", "sort", "constant", "concept", "relation", "org", "role", "event",
    "individual", "frame", "predicate", "metric", "functional", "user",
    "govern", "priority", "script", "eval",
)


@dataclass(frozen=True)
class Schema:
    sorts: Mapping[str, Sort] = field(default_factory=dict)
    constants: frozenset[str] = frozenset()
    concepts: Mapping[str, ConceptDecl] = field(default_factory=dict)
    relations: Mapping[str, int] = field(default_factory=dict)
    units: Mapping[str, OrgUnitDecl] = field(default_factory=dict)
    roles: Mapping[str, RoleDecl] = field(default_factory=dict)
    events: frozenset[str] = frozenset()
    individuals: Mapping[str, IndividualDecl] = field(default_factory=dict)
    frames: frozenset[Frame] = frozenset()
    predicates: Mapping[str, MetaPredicate] = field(default_factory=dict)
    metrics: Mapping[str, Metric] = field(default_factory=dict)
    functionals: Mapping[str, FunctionalDecl] = field(default_factory=dict)
    users: Mapping[str, UserDecl] = field(default_factory=dict)
    governs: Mapping[str, str] = field(default_factory=dict)
    priorities: Mapping[str, int] = field(default_factory=dict)
    scripts: tuple[ScriptDecl, ...] = ()
    evals: tuple[Expression, ...] = ()
    component: ComponentDecl | None = None
    positions: Mapping[tuple, tuple[int, int]] = field(
        default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        ordered = tuple(sorted(self.scripts, key=lambda s: s.event))
        if ordered != self.scripts:
            object.__setattr__(self, "scripts", ordered)

    def replace(self, **changes) -> Schema:
        return dataclasses.replace(self, **changes)

    # -- generic access used by the merger and integrity checker ------------

    def declarations(self) -> Iterator[tuple[str, Any, Any]]:
        """Yield (kind, key, declaration) for every keyed declaration."""
        if self.component is not None:
            yield "component", self.component.name, self.component
        for kind, table in self.keyed_tables().items():
            for key, decl in table.items():
                yield kind, key, decl

    def keyed_tables(self) -> dict[str, Mapping]:
        return {
            "sort": self.sorts,
            "constant": {c: c for c in self.constants},
            "concept": self.concepts,
            "relation": self.relations,
            "org": self.units,
            "role": self.roles,
            "event": {e: e for e in self.events},
            "individual": self.individuals,
            "frame": {f: f for f in self.frames},
            "predicate": self.predicates,
            "metric": self.metrics,
            "functional": self.functionals,
            "user": self.users,
            "govern": self.governs,
            "priority": self.priorities,
        }

    def position(self, kind: str, key) -> tuple[int, int] | None:
        return self.positions.get((kind, key))

    # -- resolution -------------------------------------------------------

    def sort(self, name: str) -> Sort:
        if name in self.sorts:
            return self.sorts[name]
        if name in BUILTIN_SORTS:
            return BUILTIN_SORTS[name]
        raise UndeclaredSymbol(f"sort {name!r} is not declared")

    def has_sort(self, name: str) -> bool:
        return name in self.sorts or name in BUILTIN_SORTS

    def concept(self, name: str) -> Concept:
        try:
            decl = self.concepts[name]
        except KeyError:
            raise UndeclaredSymbol(f"concept {name!r} is not declared") from None
        return Concept(decl.name, tuple((a, self.sort(s)) for a, s in decl.attributes), decl.level)

    def individual(self, ident: str) -> Individual:
        try:
            return self.individuals[ident].individual
        except KeyError:
            raise UndeclaredSymbol(f"individual {ident!r} is not declared") from None

    def individuals_of(self, concept: str) -> list[str]:
        return sorted(i for i, d in self.individuals.items() if d.concept == concept)

    def data_object(self, ident: str) -> DataObject:
        decl = self.individuals[ident]
        return make_data_object(self.concept(decl.concept), decl.individual, decl.values)

    def data_objects(self) -> dict[str, DataObject]:
        """Data objects for every individual declared with a full valuation."""
        out = {}
        for ident, decl in sorted(self.individuals.items()):
            if decl.values or not self.concepts.get(decl.concept, ConceptDecl("")).attributes:
                if decl.concept in self.concepts:
                    out[ident] = self.data_object(ident)
        return out

    def known_symbols(self) -> set[str]:
        """Every name a formula or frame may mention as a constant."""
        names = set(self.constants) | set(self.sorts) | set(BUILTIN_SORTS)
        names |= set(self.concepts) | set(self.individuals) | set(self.units)
        names |= set(self.predicates) | set(self.metrics) | set(self.roles)
        names |= set(self.users) | set(self.events) | set(self.functionals)
        for s in self.sorts.values():
            if s.carrier is not None:
                names |= {v.name for v in s.carrier if isinstance(v, Const)}
        for decl in self.concepts.values():
            names |= {a for a, _ in decl.attributes}
        return names

    def network_constants(self) -> set:
        consts = {Const(c) for c in self.constants}
        consts |= {Const(i) for i in self.individuals}
        consts |= {Const(u) for u in self.units}
        for s in self.sorts.values():
            if s.carrier is not None:
                consts |= {v for v in s.carrier if isinstance(v, Const) or is_number(v)}
        for f in self.frames:
            consts |= {f.subject, f.object}
        return {c for c in consts if not (isinstance(c, Const) and c.name in self.relations)}

    def language(self) -> NetworkLanguage:
        return NetworkLanguage(frozenset(self.relations), frozenset(self.network_constants()))

    def network(self) -> SemanticNetwork:
        return SemanticNetwork(self.language(), self.frames)

    def formula_literals(self):
        for p in self.predicates.values():
            yield p, set(literals(p.body))
