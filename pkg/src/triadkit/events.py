"""Personnel dynamics: lifecycle state machine plus event-bound scripts.

Lifecycle edges::

    candidate --enroll--> enrolled --transfer--> enrolled
    enrolled --dismiss--> dismissed --re_enroll--> enrolled

Entering a unit consumes one of its vacancies; leaving releases one.  A
dispatch applies the lifecycle step and then every matching script, in
registration order.  Either all of it takes effect or none of it does.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .access import Session, Target, WRITE, authorize
from .errors import (
    AccessDenied, IllegalTransition, ScriptActionFailure, SortMismatch, TriadError,
    UndeclaredEntity, UnknownUnit, VacancyExhausted,
)
from .model import DataObject, serialize_data_object, update_state
from .org import OrgStructure
from .schema import (
    BUILTIN_EVENTS, CounterAction, FailAction, FrameAction, Placeholder, Schema, ScriptDecl,
    SetAction, VacancyAction,
)
from .semnet import Frame, sorted_frames
from .values import Const

CANDIDATE, ENROLLED, DISMISSED = "candidate", "enrolled", "dismissed"
ENROLL, TRANSFER, DISMISS, RE_ENROLL = BUILTIN_EVENTS

# event kind -> (required lifecycle before, lifecycle after)
LIFECYCLE = {
    ENROLL: (CANDIDATE, ENROLLED),
    TRANSFER: (ENROLLED, ENROLLED),
    DISMISS: (ENROLLED, DISMISSED),
    RE_ENROLL: (DISMISSED, ENROLLED),
}
LEGAL_EDGES = frozenset((before, after) for before, after in LIFECYCLE.values())

NO_UNIT = "-"


@dataclass(frozen=True)
class Event:
    kind: str
    employee: str
    unit: str | None = None

    def __str__(self):
        return f"{self.kind} {self.employee} {self.unit or NO_UNIT}"

    @classmethod
    def parse(cls, line: str) -> Event:
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ValueError(f"expected 'KIND EMPLOYEE [UNIT]', got {line!r}")
        unit = parts[2] if len(parts) == 3 and parts[2] != NO_UNIT else None
        return cls(parts[0], parts[1], unit)


@dataclass(frozen=True)
class PersonnelState:
    lifecycle: Mapping[str, str]
    unit: Mapping[str, str | None]
    vacancies: Mapping[str, int]
    counters: Mapping[str, int] = field(default_factory=dict)
    objects: Mapping[str, DataObject] = field(default_factory=dict)
    frames: frozenset[Frame] = frozenset()

    def __post_init__(self):
        for u, v in self.vacancies.items():
            if v < 0:
                raise ValueError(f"negative vacancy count at {u}")
        for e, state in self.lifecycle.items():
            if (state == ENROLLED) != (self.unit.get(e) is not None):
                raise ValueError(f"employee {e}: enrolled iff assigned to a unit")

    def serialize(self) -> str:
        lines = []
        for e in sorted(self.lifecycle):
            lines.append(f"employee {e} {self.lifecycle[e]} {self.unit.get(e) or NO_UNIT}")
        lines.extend(f"vacancy {u} {v}" for u, v in sorted(self.vacancies.items()))
        lines.extend(f"counter {c} {v}" for c, v in sorted(self.counters.items()))
        lines.extend(f"frame {f}" for f in sorted_frames(self.frames))
        text = "".join(line + "\n" for line in lines)
        return text + "".join(serialize_data_object(self.objects[i]) for i in sorted(self.objects))


def _unit_value(obj: DataObject | None, unit: str):
    """The unit as a value of the object's ``unit`` attribute sort."""
    if obj is None or "unit" not in obj.concept.attribute_names:
        return None
    sort = obj.concept.sort_of("unit")
    for candidate in (Const(unit), unit):
        try:
            return sort.coerce(candidate)
        except SortMismatch:
            continue
    return None


def state_from_schema(schema: Schema) -> PersonnelState:
    """Employees are individuals of concepts that carry a ``unit`` attribute.

    An employee whose ``unit`` value names an org unit starts enrolled;
    the rest are candidates.
    """
    objects = schema.data_objects()
    lifecycle, units = {}, {}
    for ident, decl in sorted(schema.individuals.items()):
        cdecl = schema.concepts.get(decl.concept)
        if cdecl is None or "unit" not in dict(cdecl.attributes):
            continue
        raw = decl.values.get("unit", decl.key.get("unit"))
        name = raw.name if isinstance(raw, Const) else raw
        if isinstance(name, str) and name in schema.units:
            lifecycle[ident], units[ident] = ENROLLED, name
        else:
            lifecycle[ident], units[ident] = CANDIDATE, None
    vacancies = {u: d.vacancies for u, d in schema.units.items()}
    return PersonnelState(lifecycle, units, vacancies, {},
                          {i: o for i, o in objects.items() if i in lifecycle},
                          frozenset(schema.frames))


@dataclass(frozen=True)
class ScriptRegistry:
    """Ordered script bindings; duplicates are kept and fire repeatedly."""

    bindings: tuple[ScriptDecl, ...] = ()

    def matching(self, kind: str, concept: str | None, unit: str | None,
                 org: OrgStructure) -> list[ScriptDecl]:
        out = []
        for b in self.bindings:
            if b.event != kind:
                continue
            if b.concept is not None and b.concept != concept:
                continue
            if b.unit is not None and (unit is None or not org.is_under(unit, b.unit)):
                continue
            out.append(b)
        return out


def check_binding(schema: Schema, binding: ScriptDecl) -> None:
    if not binding.actions:
        raise UndeclaredEntity("a script binding needs at least one action")
    if binding.event not in BUILTIN_EVENTS and binding.event not in schema.events:
        raise UndeclaredEntity(f"undeclared event {binding.event}")
    if binding.concept is not None and binding.concept not in schema.concepts:
        raise UndeclaredEntity(f"undeclared concept {binding.concept}")
    if binding.unit is not None and binding.unit not in schema.units:
        raise UndeclaredEntity(f"undeclared unit {binding.unit}")
    for a in binding.actions:
        if isinstance(a, FrameAction) and a.relation not in schema.relations:
            raise UndeclaredEntity(f"undeclared relation {a.relation}")
        if isinstance(a, VacancyAction) and not isinstance(a.unit, Placeholder):
            name = a.unit.name if isinstance(a.unit, Const) else a.unit
            if name not in schema.units:
                raise UndeclaredEntity(f"undeclared unit {name}")
        if (isinstance(a, SetAction) and binding.concept is not None
                and a.attribute not in dict(schema.concepts[binding.concept].attributes)):
            raise UndeclaredEntity(f"{binding.concept} has no attribute {a.attribute}")


def register_script(registry: ScriptRegistry, binding: ScriptDecl,
                    schema: Schema) -> ScriptRegistry:
    check_binding(schema, binding)
    return ScriptRegistry(registry.bindings + (binding,))


def registry_from_schema(schema: Schema) -> ScriptRegistry:
    reg = ScriptRegistry()
    for s in schema.scripts:
        reg = register_script(reg, s, schema)
    return reg


@dataclass(frozen=True)
class DispatchResult:
    state: PersonnelState
    fired: tuple[ScriptDecl, ...]


class PersonnelEngine:
    """Dispatch over a fixed schema, org and script registry."""

    def __init__(self, schema: Schema, registry: ScriptRegistry | None = None):
        self.schema = schema
        self.org = OrgStructure.from_schema(schema)
        self.registry = registry if registry is not None else registry_from_schema(schema)
        self.events = set(BUILTIN_EVENTS) | set(schema.events)

    def initial_state(self) -> PersonnelState:
        return state_from_schema(self.schema)

    def register(self, binding: ScriptDecl) -> ScriptRegistry:
        self.registry = register_script(self.registry, binding, self.schema)
        return self.registry

    def dispatch(self, state: PersonnelState, event: Event,
                 session: Session | None = None) -> DispatchResult:
        return dispatch(self, state, event, session)


def _authorize(session: Session | None, unit: str | None):
    if session is None or unit is None:
        return
    decision = authorize(session, Target("data", unit), WRITE)
    if not decision.allowed:
        raise AccessDenied(decision.reason, f"write at {unit}")


def dispatch(engine: PersonnelEngine, state: PersonnelState, event: Event,
             session: Session | None = None) -> DispatchResult:
    """Apply one event; the input state is never modified."""
    kind, emp, target = event.kind, event.employee, event.unit
    if kind not in engine.events:
        raise UndeclaredEntity(f"undeclared event {kind}")
    if emp not in state.lifecycle:
        raise UndeclaredEntity(f"unknown employee {emp}")
    if target is not None and target not in engine.org.parent:
        raise UnknownUnit(f"unknown unit {target!r}")
    current = state.unit.get(emp)
    lifecycle = dict(state.lifecycle)
    units = dict(state.unit)
    vacancies = dict(state.vacancies)
    objects = dict(state.objects)

    # candidates are authorized against the unit they join, others against
    # the unit they are in
    _authorize(session, target if lifecycle[emp] == CANDIDATE else current)

    if kind in LIFECYCLE:
        before, after = LIFECYCLE[kind]
        if lifecycle[emp] != before:
            raise IllegalTransition(f"{kind} needs a {before} employee; {emp} is {lifecycle[emp]}")
        if kind in (ENROLL, TRANSFER, RE_ENROLL):
            if target is None:
                raise IllegalTransition(f"{kind} needs a target unit")
            if kind == TRANSFER and target == current:
                raise IllegalTransition(f"{emp} is already in {target}")
            if vacancies.get(target, 0) <= 0:
                raise VacancyExhausted(f"no vacancy in {target}")
            vacancies[target] -= 1
        if kind in (TRANSFER, DISMISS):
            vacancies[current] = vacancies.get(current, 0) + 1
        lifecycle[emp] = after
        units[emp] = target if after == ENROLLED else None
        obj = objects.get(emp)
        if obj is not None:
            changes = {}
            if after == ENROLLED:
                value = _unit_value(obj, target)
                if value is not None:
                    changes["unit"] = value
            objects[emp] = update_state(obj, changes, kind)

    event_unit = target if target is not None else current
    concept = engine.schema.individuals[emp].concept
    fired = engine.registry.matching(kind, concept, event_unit, engine.org)
    counters = dict(state.counters)
    frames = set(state.frames)
    for script in fired:
        for action in script.actions:
            _apply(action, emp, event_unit, vacancies, counters, frames, objects, script)

    new = PersonnelState(lifecycle, units, vacancies, counters, objects, frozenset(frames))
    return DispatchResult(new, tuple(fired))


def _resolve(value, emp: str, unit: str | None):
    if isinstance(value, Placeholder):
        if value.name == "subject":
            return Const(emp)
        if unit is None:
            raise ScriptActionFailure("$unit used by an event without a unit")
        return Const(unit)
    return value


def _apply(action, emp, unit, vacancies, counters, frames, objects, script):
    where = f"script on {script.event}"
    if isinstance(action, FailAction):
        raise ScriptActionFailure(f"{where}: {action.message}")
    if isinstance(action, CounterAction):
        counters[action.name] = counters.get(action.name, 0) + action.delta
    elif isinstance(action, VacancyAction):
        u = _resolve(action.unit, emp, unit)
        name = u.name if isinstance(u, Const) else u
        if name not in vacancies:
            raise ScriptActionFailure(f"{where}: unknown unit {name}")
        if vacancies[name] + action.delta < 0:
            raise ScriptActionFailure(f"{where}: vacancies at {name} would go negative")
        vacancies[name] += action.delta
    elif isinstance(action, FrameAction):
        frames.add(Frame(action.relation, _resolve(action.subject, emp, unit),
                         _resolve(action.object, emp, unit)))
    elif isinstance(action, SetAction):
        obj = objects.get(emp)
        if obj is None:
            raise ScriptActionFailure(f"{where}: {emp} has no data object")
        try:
            objects[emp] = update_state(obj, {action.attribute: _resolve(action.value, emp, unit)},
                                        script.event)
        except TriadError as e:
            raise ScriptActionFailure(f"{where}: {e}") from e


def replay(engine: PersonnelEngine, state: PersonnelState, events: Iterable[Event],
           session: Session | None = None):
    """Dispatch events in order, skipping failures.

    Yields (event, result or error) pairs; the state advances only on
    success.
    """
    for ev in events:
        try:
            result = dispatch(engine, state, ev, session)
        except TriadError as e:
            yield ev, e, state
            continue
        state = result.state
        yield ev, result, state


__all__ = [
    "CANDIDATE", "DISMISSED", "DispatchResult", "ENROLLED", "Event", "LEGAL_EDGES", "LIFECYCLE",
    "PersonnelEngine", "PersonnelState", "ScriptRegistry", "check_binding", "dispatch",
    "register_script", "registry_from_schema", "replay", "state_from_schema",
]
