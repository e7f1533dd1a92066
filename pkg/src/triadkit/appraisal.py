"""Curried appraisal functional F((v),(e),...)(s)(p) and its metrics.

Applying an assignment point restricts the employee population: ``s``
filters by labor function, ``p`` by organization unit (descendants of a
listed unit count as members).  Metrics declare which assignment kinds they
depend on; applying a kind outside that set leaves the metric's value
unchanged, which is how refining steps are told apart from inert
ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import (
    EmptyAssignment, KindValueMismatch, MissingMetric, UnknownMetric, UnknownUnit,
)
from .formula import KIND_SHORT, KINDS, LABOR_FUNCTION, ORG_UNIT
from .org import OrgStructure
from .schema import Component, Metric, Schema
from .values import Const, format_value, is_number, sort_key, sorted_values

REFINING = "REFINING"
INERT = "INERT"
TWO_LEVELS_SUFFICIENT = "two levels sufficient"
MORE_LEVELS_NEEDED = "more than two levels needed"


@dataclass(frozen=True)
class Employee:
    id: str
    labor_function: object
    unit: object


@dataclass(frozen=True)
class Assignment:
    kind: str
    values: frozenset

    def __post_init__(self):
        if self.kind not in KINDS:
            raise KindValueMismatch(f"unknown assignment kind {self.kind!r}")
        object.__setattr__(self, "values", frozenset(
            Const(v) if isinstance(v, str) else v for v in self.values))
        if not self.values:
            raise EmptyAssignment(f"assignment {KIND_SHORT[self.kind]} has no values")

    def __str__(self):
        vals = ", ".join(format_value(v) for v in sorted_values(self.values))
        return f"{KIND_SHORT[self.kind]}={{{vals}}}"


def s(*values) -> Assignment:
    return Assignment(LABOR_FUNCTION, frozenset(values))


def p(*values) -> Assignment:
    return Assignment(ORG_UNIT, frozenset(values))


def _name(v):
    return v.name if isinstance(v, Const) else v


@dataclass(frozen=True)
class Functional:
    """An employee-set valuation with the assignments applied so far."""

    population: tuple[Employee, ...]
    org: OrgStructure
    applied: tuple[Assignment, ...] = ()
    labor_functions: frozenset | None = None
    name: str = "F"

    @property
    def vacancies(self) -> Mapping[str, int]:
        return self.org.vacancies

    @property
    def enrolled(self) -> Mapping[str, int]:
        return self.org.enrolled

    def matches(self, emp: Employee, a: Assignment) -> bool:
        if a.kind == LABOR_FUNCTION:
            return emp.labor_function in a.values
        unit = _name(emp.unit)
        return any(self.org.is_under(unit, _name(u)) for u in a.values)

    @property
    def extension(self) -> frozenset[str]:
        return frozenset(e.id for e in self.population
                         if all(self.matches(e, a) for a in self.applied))

    def __call__(self, assignment: Assignment) -> Functional:
        return restrict(self, assignment)

    def __str__(self):
        return self.name + "".join(f"({a})" for a in self.applied)


def _check_values(f: Functional, a: Assignment):
    if a.kind == LABOR_FUNCTION:
        if f.labor_functions is not None:
            bad = [v for v in a.values if v not in f.labor_functions]
            if bad:
                raise KindValueMismatch(
                    f"not labor functions: {', '.join(format_value(v) for v in sorted_values(bad))}")
    else:
        bad = [v for v in a.values if _name(v) not in f.org.parent]
        if bad:
            raise KindValueMismatch(
                f"not organization units: {', '.join(format_value(v) for v in sorted_values(bad))}")


def restrict(f: Functional, a: Assignment) -> Functional:
    """Curry one assignment point into the functional."""
    _check_values(f, a)
    return Functional(f.population, f.org, f.applied + (a,), f.labor_functions, f.name)


def functional_from_schema(schema: Schema, name: str = "F") -> Functional:
    """Build the functional declared as ``functional NAME over Concept``.

    Employees are the concept's individuals whose current valuation carries
    ``labor_function`` and ``unit`` attributes.
    """
    decl = schema.functionals.get(name)
    if decl is None:
        raise UnknownMetric(f"no functional named {name!r}")
    concept = schema.concept(decl.concept)
    objects = schema.data_objects()
    population = []
    for ident in schema.individuals_of(decl.concept):
        val = objects[ident].valuation if ident in objects else schema.individuals[ident].key
        population.append(Employee(ident, val.get(LABOR_FUNCTION), val.get("unit")))
    labor = None
    if LABOR_FUNCTION in concept.attribute_names:
        labor = concept.sort_of(LABOR_FUNCTION).carrier
    return Functional(tuple(population), OrgStructure.from_schema(schema), (), labor, name)


# -- metrics ---------------------------------------------------------------------

MetricResult = Mapping[tuple, frozenset]


def evaluate_metric(m: Metric, assignments: Sequence[Assignment] = (), *,
                    broadcast: bool = False, carriers: Mapping[str, Iterable] | None = None
                    ) -> dict[tuple, frozenset]:
    """Project a metric's components onto the applied assignment values.

    The result maps a label, one value per applied kind the metric depends
    on, to the set of components still compatible with it.  With no
    dependent kind applied the single label ``()`` carries every component:
    the fully generalized value.  ``broadcast`` indexes the result by every
    applied kind instead, repeating values along kinds the metric ignores.
    """
    if not isinstance(m, Metric):
        raise UnknownMetric(f"not a metric: {m!r}")
    allowed: dict[str, frozenset] = {}
    for a in assignments:
        if carriers and a.kind in carriers:
            known = frozenset(carriers[a.kind])
            bad = a.values - known
            if bad:
                raise KindValueMismatch(
                    f"{KIND_SHORT[a.kind]} values outside the carrier: "
                    f"{', '.join(format_value(v) for v in sorted_values(bad))}")
        allowed[a.kind] = allowed[a.kind] & a.values if a.kind in allowed else a.values
    active = [k for k in m.depends if k in allowed]
    positions = [m.depends.index(k) for k in active]
    out: dict[tuple, set] = {}
    for label, comp in m.table.items():
        if any(label[i] not in allowed[k] for i, k in zip(positions, active)):
            continue
        key = tuple(label[i] for i in positions)
        out.setdefault(key, set()).add(comp)
    result = {k: frozenset(v) for k, v in out.items()}
    if not broadcast:
        return result
    kinds = [k for k in KINDS if k in allowed]
    expanded: dict[tuple, frozenset] = {}
    for combo in _product([sorted_values(allowed[k]) for k in kinds]):
        key = tuple(v for k, v in zip(kinds, combo) if k in m.depends)
        if key in result:
            expanded[combo] = result[key]
    return expanded


def _product(lists):
    if not lists:
        yield ()
        return
    for head in lists[0]:
        for rest in _product(lists[1:]):
            yield (head,) + rest


def component_names(result: MetricResult) -> frozenset[str]:
    """All component names appearing in an evaluation result."""
    return frozenset(c.name for comps in result.values() for c in comps)


def value_signature(result: MetricResult) -> frozenset[frozenset]:
    """The set of attainable generalized values, ignoring labels."""
    return frozenset(result.values())


@dataclass(frozen=True)
class AnalysisRow:
    metric: str
    steps: tuple[str, ...]


@dataclass(frozen=True)
class GeneralizationReport:
    sequence: tuple[Assignment, ...]
    rows: tuple[AnalysisRow, ...]
    verdict: str

    def row(self, metric: str) -> AnalysisRow:
        for r in self.rows:
            if r.metric == metric:
                return r
        raise UnknownMetric(metric)

    def lines(self) -> list[str]:
        head = ["metric"] + [f"step{i + 1}:{a}" for i, a in enumerate(self.sequence)]
        out = ["\t".join(head)]
        out.extend("\t".join((r.metric,) + r.steps) for r in self.rows)
        out.append(f"verdict\t{self.verdict}")
        return out


def generalization_analysis(metrics: Sequence[Metric], sequence: Sequence[Assignment],
                            carriers: Mapping[str, Iterable] | None = None
                            ) -> GeneralizationReport:
    """Mark each assignment step REFINING or INERT per metric.

    A step refines a metric when it changes the set of attainable values.
    Two conceptualization levels suffice when no metric is refined after
    the second step.
    """
    if not sequence:
        raise ValueError("assignment sequence must be non-empty")
    rows = []
    late = False
    for m in metrics:
        if not isinstance(m, Metric):
            raise UnknownMetric(f"unknown metric {m!r}")
        steps = []
        prev = value_signature(evaluate_metric(m, (), carriers=carriers))
        for k in range(1, len(sequence) + 1):
            cur = value_signature(evaluate_metric(m, sequence[:k], carriers=carriers))
            steps.append(REFINING if cur != prev else INERT)
            if cur != prev and k > 2:
                late = True
            prev = cur
        rows.append(AnalysisRow(m.name, tuple(steps)))
    verdict = MORE_LEVELS_NEEDED if late else TWO_LEVELS_SUFFICIENT
    return GeneralizationReport(tuple(sequence), tuple(rows), verdict)


def unit_population(f: Functional, unit: str) -> frozenset[str]:
    f.org.check(unit)
    return restrict(f, p(unit)).extension


def unit_appraisal(f: Functional, unit: str, metrics: Sequence[Metric],
                   weights: Mapping[str, float] | None = None):
    """Weighted linear aggregate of metric components over a unit's subtree.

    Each employee contributes, per metric, the numeric component selected by
    its own labor function and unit; the weight of a metric defaults to 1.
    """
    if unit not in f.org.parent:
        raise UnknownUnit(f"unknown unit {unit!r}")
    weights = dict(weights or {})
    names = {m.name for m in metrics}
    stray = sorted(set(weights) - names)
    if stray:
        raise MissingMetric(f"weights given for metrics not supplied: {', '.join(stray)}")
    members = unit_population(f, unit)
    by_id = {e.id: e for e in f.population}
    total = 0
    for m in metrics:
        w = weights.get(m.name, 1)
        if w == 0:
            continue
        for ident in sorted(members):
            total += w * employee_component(m, by_id[ident]).value
    return total


def employee_component(m: Metric, emp: Employee) -> Component:
    result = evaluate_metric(m, [Assignment(LABOR_FUNCTION, frozenset([emp.labor_function])),
                                 Assignment(ORG_UNIT, frozenset([_as_const(emp.unit)]))])
    comps = {c for cs in result.values() for c in cs}
    if len(comps) != 1:
        raise MissingMetric(
            f"metric {m.name} has {len(comps)} components for employee {emp.id}")
    comp = next(iter(comps))
    if not is_number(comp.value) and not isinstance(comp.value, float):
        raise MissingMetric(f"component {comp.name} of metric {m.name} has no numeric value")
    return comp


def _as_const(v):
    return Const(v) if isinstance(v, str) else v


def metric_lines(m: Metric, result: MetricResult) -> list[str]:
    lines = []
    for label in sorted(result, key=sort_key):
        label_text = "(" + ", ".join(format_value(v) for v in label) + ")"
        comps = ", ".join(sorted(c.name for c in result[label]))
        lines.append(f"{label_text}\t{{{comps}}}")
    return lines


@dataclass
class AppraisalModel:
    """Convenience bundle of a functional, its metrics and carriers."""

    functional: Functional
    metrics: dict[str, Metric] = field(default_factory=dict)

    @classmethod
    def from_schema(cls, schema: Schema, functional: str | None = None) -> AppraisalModel:
        name = functional or (sorted(schema.functionals)[0] if schema.functionals else None)
        if name is None:
            raise UnknownMetric("schema declares no functional")
        return cls(functional_from_schema(schema, name), dict(schema.metrics))

    @property
    def carriers(self) -> dict[str, frozenset]:
        out = {ORG_UNIT: frozenset(Const(u) for u in self.functional.org.parent)}
        if self.functional.labor_functions is not None:
            out[LABOR_FUNCTION] = self.functional.labor_functions
        return out

    def metric(self, name: str) -> Metric:
        try:
            return self.metrics[name]
        except KeyError:
            raise UnknownMetric(f"unknown metric {name!r}") from None

    def evaluate(self, name: str, assignments: Sequence[Assignment] = (), **kw):
        return evaluate_metric(self.metric(name), assignments, carriers=self.carriers, **kw)

    def analyse(self, names: Sequence[str], sequence: Sequence[Assignment]):
        return generalization_analysis([self.metric(n) for n in names], sequence, self.carriers)

    def appraise(self, unit: str, names: Sequence[str] | None = None,
                 weights: Mapping[str, float] | None = None):
        names = list(names) if names is not None else sorted(self.metrics)
        return unit_appraisal(self.functional, unit, [self.metric(n) for n in names], weights)
