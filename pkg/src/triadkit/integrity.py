"""Referential integrity of a schema bundle."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PartialValuation, SortMismatch
from .formula import Application, Comprehension, FrameAtom, PredAtom, Unique, literals, walk
from .metamodel import check_stratification, domain_level
from .schema import BUILTIN_EVENTS, FrameAction, Schema, SetAction
from .values import Const

DANGLING = "dangling-reference"
DUPLICATE = "duplicate-name"
ORPHAN = "org-orphan"
STRATIFICATION = "stratification"
VALUE = "invalid-value"

DEFAULT_ROLES = ("president", "department_employee")

# kinds whose names share one namespace
_NAMESPACE_KINDS = ("sort", "concept", "relation", "constant", "predicate", "metric",
                    "functional", "individual", "org")


@dataclass(frozen=True)
class Issue:
    category: str
    kind_key: tuple
    detail: str

    def __str__(self):
        return f"{self.category}: {self.detail}"


def verify_integrity(schema: Schema) -> list[Issue]:
    """All integrity problems; an empty list means the schema is integral."""
    issues: list[Issue] = []

    def add(category, kind, key, detail):
        issues.append(Issue(category, (kind, key), detail))

    # duplicates across kinds
    owners: dict[str, list[str]] = {}
    tables = schema.keyed_tables()
    for kind in _NAMESPACE_KINDS:
        for key in tables[kind]:
            owners.setdefault(key, []).append(kind)
    for name, kinds in sorted(owners.items()):
        if len(kinds) > 1:
            add(DUPLICATE, kinds[1], name, f"{name} is declared as {' and '.join(kinds)}")
    carrier_consts = {v.name for s in schema.sorts.values() if s.carrier
                      for v in s.carrier if isinstance(v, Const)}
    for rel in sorted(set(schema.relations) & carrier_consts):
        add(DUPLICATE, "relation", rel, f"relation {rel} is also a constant")

    for name, decl in sorted(schema.concepts.items()):
        for attr, sort in decl.attributes:
            if not schema.has_sort(sort):
                add(DANGLING, "concept", name, f"concept {name}.{attr} uses undeclared sort {sort}")

    for ident, decl in sorted(schema.individuals.items()):
        if decl.concept not in schema.concepts:
            add(DANGLING, "individual", ident,
                f"individual {ident} has undeclared concept {decl.concept}")
            continue
        cdecl = schema.concepts[decl.concept]
        if any(not schema.has_sort(s) for _, s in cdecl.attributes):
            continue
        concept = schema.concept(decl.concept)
        declared = set(concept.attribute_names)
        for part, mapping in (("key", decl.key), ("values", decl.values)):
            for attr, value in sorted(mapping.items()):
                if attr not in declared:
                    add(DANGLING, "individual", ident,
                        f"individual {ident} {part} names unknown attribute {attr}")
                    continue
                try:
                    concept.sort_of(attr).coerce(value)
                except SortMismatch as e:
                    add(VALUE, "individual", ident, f"individual {ident}: {e}")
        if decl.values:
            missing = sorted(declared - set(decl.values))
            if missing:
                add(VALUE, "individual", ident,
                    f"individual {ident}: {PartialValuation.__name__} (missing {', '.join(missing)})")

    declared_consts = {Const(c) for c in schema.known_symbols()}
    for frame in sorted(schema.frames, key=str):
        if frame.relation not in schema.relations:
            add(DANGLING, "frame", frame, f"frame {frame} uses undeclared relation {frame.relation}")
        for c in (frame.subject, frame.object):
            if isinstance(c, Const) and c not in declared_consts:
                add(DANGLING, "frame", frame, f"frame {frame} uses undeclared constant {c}")

    known = schema.known_symbols()
    for name, pred in sorted(schema.predicates.items()):
        if domain_level(schema, pred.domain, pred.level) is None:
            add(DANGLING, "predicate", name, f"predicate {name} ranges over unknown domain {pred.domain}")
        for ref in sorted(n.name for n in walk(pred.body) if isinstance(n, PredAtom)):
            if ref not in schema.concepts and ref not in schema.predicates:
                add(DANGLING, "predicate", name, f"predicate {name} references unknown {ref}")
        for node in walk(pred.body):
            if isinstance(node, FrameAtom) and node.relation not in schema.relations:
                add(DANGLING, "predicate", name,
                    f"predicate {name} uses undeclared relation {node.relation}")
        for v in sorted({v.name for v in literals(pred.body) if isinstance(v, Const)}):
            if v not in known:
                add(DANGLING, "predicate", name, f"predicate {name} mentions unknown symbol {v}")
    for v in check_stratification(schema):
        add(STRATIFICATION, "predicate", v.predicate, str(v))

    for u, decl in sorted(schema.units.items()):
        if decl.parent is not None and decl.parent not in schema.units:
            add(ORPHAN, "org", u, f"unit {u} sits under undeclared unit {decl.parent}")
    roots = sorted(u for u, d in schema.units.items() if d.parent is None)
    if len(roots) > 1:
        add(ORPHAN, "org", roots[1], f"several root units: {', '.join(roots)}")
    for u in sorted(schema.units):
        seen, cur = set(), u
        while cur is not None and cur in schema.units and cur not in seen:
            seen.add(cur)
            cur = schema.units[cur].parent
        if cur is not None and cur in seen and cur == u:
            add(ORPHAN, "org", u, f"unit {u} is on a cycle")

    roles = set(DEFAULT_ROLES) | set(schema.roles)
    for name, user in sorted(schema.users.items()):
        if user.unit not in schema.units:
            add(DANGLING, "user", name, f"user {name} sits at undeclared unit {user.unit}")
        if user.role not in roles:
            add(DANGLING, "user", name, f"user {name} has undeclared role {user.role}")
        for g in user.grants:
            if g not in schema.units:
                add(DANGLING, "user", name, f"user {name} is granted undeclared unit {g}")
    for name, f in sorted(schema.functionals.items()):
        if f.concept not in schema.concepts:
            add(DANGLING, "functional", name, f"functional {name} ranges over undeclared {f.concept}")

    for name, unit in sorted(schema.governs.items()):
        if unit not in schema.units:
            add(DANGLING, "govern", name, f"govern {name} names undeclared unit {unit}")
    for unit in sorted(schema.priorities):
        if unit not in schema.units:
            add(DANGLING, "priority", unit, f"priority for undeclared unit {unit}")

    events = set(BUILTIN_EVENTS) | set(schema.events)
    for i, script in enumerate(schema.scripts):
        where = f"script #{i + 1} (on {script.event})"
        key = ("script", i)
        if script.event not in events:
            issues.append(Issue(DANGLING, key, f"{where} uses undeclared event {script.event}"))
        if script.concept is not None and script.concept not in schema.concepts:
            issues.append(Issue(DANGLING, key, f"{where} filters on undeclared concept {script.concept}"))
        if script.unit is not None and script.unit not in schema.units:
            issues.append(Issue(DANGLING, key, f"{where} filters on undeclared unit {script.unit}"))
        for action in script.actions:
            if isinstance(action, FrameAction) and action.relation not in schema.relations:
                issues.append(Issue(DANGLING, key,
                                    f"{where} adds frames of undeclared relation {action.relation}"))
            if (isinstance(action, SetAction) and script.concept in schema.concepts
                    and action.attribute not in dict(schema.concepts[script.concept].attributes)):
                issues.append(Issue(DANGLING, key,
                                    f"{where} sets unknown attribute {action.attribute}"))

    for i, expr in enumerate(schema.evals):
        key = ("eval", i)
        if isinstance(expr, Application):
            if expr.target not in schema.functionals and expr.target not in schema.metrics:
                issues.append(Issue(DANGLING, key, f"eval of unknown functional or metric {expr.target}"))
        elif isinstance(expr, (Comprehension, Unique)):
            comp = expr if isinstance(expr, Comprehension) else expr.comprehension
            if isinstance(comp.domain, str) and domain_level(schema, comp.domain, 1) is None:
                issues.append(Issue(DANGLING, key, f"eval ranges over unknown domain {comp.domain}"))

    if schema.component is not None:
        for req in schema.component.requires:
            if req not in owners:
                add(DANGLING, "component", schema.component.name,
                    f"component {schema.component.name} requires missing {req}")
    return issues


def dangling_count(schema: Schema) -> int:
    return sum(1 for i in verify_integrity(schema) if i.category == DANGLING)
