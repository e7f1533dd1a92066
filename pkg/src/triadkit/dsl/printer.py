"""Canonical printer: declarations grouped by kind, sorted by name.

Scripts are grouped by event, keeping their relative order within an event
(the dispatch order).  ``eval`` statements keep declaration order, which is
their output order.
"""

from __future__ import annotations

from ..formula import KIND_SHORT, SetLit, set_text, to_text
from ..schema import (
    CounterAction, FailAction, FrameAction, Placeholder, Schema, SetAction, VacancyAction,
)
from ..semnet import sorted_frames
from ..values import format_value, quote, sort_key


def _value(v) -> str:
    if isinstance(v, Placeholder):
        return f"${v.name}"
    return format_value(v)


def _map(m) -> str:
    return "{" + ", ".join(f"{k} = {format_value(v)}" for k, v in sorted(m.items())) + "}"


def _action(a) -> str:
    if isinstance(a, SetAction):
        return f"set {a.attribute} = {_value(a.value)}"
    if isinstance(a, FrameAction):
        return f"frame {a.relation}({_value(a.subject)}, {_value(a.object)})"
    if isinstance(a, VacancyAction):
        op = "+=" if a.delta >= 0 else "-="
        return f"vacancy {_value(a.unit)} {op} {abs(a.delta)}"
    if isinstance(a, CounterAction):
        op = "+=" if a.delta >= 0 else "-="
        return f"counter {a.name} {op} {abs(a.delta)}"
    if isinstance(a, FailAction):
        return f"fail {quote(a.message)}"
    raise TypeError(f"not an action: {a!r}")


def script_text(s) -> str:
    head = f"script on {s.event}"
    if s.concept is not None:
        head += f" concept {s.concept}"
    if s.unit is not None:
        head += f" unit {s.unit}"
    body = "; ".join(_action(a) for a in s.actions)
    return f"{head} {{ {body}; }};"


def _metric(m) -> str:
    head = f"metric {m.name}"
    if m.depends:
        head += " depends on " + ", ".join(m.depends)
    if not m.table:
        return head + ";"
    entries = []
    for label in sorted(m.table, key=sort_key):
        comp = m.table[label]
        text = "(" + ", ".join(format_value(v) for v in label) + f") -> {comp.name}"
        if comp.value is not None:
            text += f" = {format_value(comp.value)}"
        entries.append(text)
    return head + " { " + ", ".join(entries) + " };"


def expression_text(expr) -> str:
    return expr.to_text()


def print_canonical(schema: Schema) -> str:
    out: list[str] = []
    if schema.component is not None:
        c = schema.component
        line = f"component {c.name}"
        if c.requires:
            line += " requires " + ", ".join(sorted(c.requires))
        out.append(line + ";")
    for name in sorted(schema.sorts):
        s = schema.sorts[name]
        if s.carrier is not None:
            out.append(f"sort {name} = {set_text(s.carrier)};")
        else:
            out.append(f"sort {name} : {s.kind};")
    if schema.constants:
        out.extend(f"constant {c};" for c in sorted(schema.constants))
    for name in sorted(schema.concepts):
        c = schema.concepts[name]
        attrs = ", ".join(f"{a}: {s}" for a, s in c.attributes)
        out.append(f"concept {name} {{ {attrs} }};" if attrs else f"concept {name} {{}};")
    out.extend(f"relation {r}/{schema.relations[r]};" for r in sorted(schema.relations))
    for name in sorted(schema.units):
        u = schema.units[name]
        line = f"org {name}"
        if u.parent is not None:
            line += f" under {u.parent}"
        if u.vacancies:
            line += f" vacancies {u.vacancies}"
        if u.enrolled:
            line += f" enrolled {u.enrolled}"
        out.append(line + ";")
    for name in sorted(schema.roles):
        r = schema.roles[name]
        line = f"role {name}"
        if r.metadata != "read":
            line += f" metadata {r.metadata}"
        if r.writes != "unit":
            line += f" writes {r.writes}"
        if r.requires:
            line += " requires " + ", ".join(sorted(r.requires))
        out.append(line + ";")
    out.extend(f"event {e};" for e in sorted(schema.events))
    for ident in sorted(schema.individuals):
        d = schema.individuals[ident]
        line = f"individual {ident} : {d.concept}"
        if d.key:
            line += f" key {_map(d.key)}"
        if d.values:
            line += f" values {_map(d.values)}"
        out.append(line + ";")
    out.extend(f"frame {f};" for f in sorted_frames(schema.frames))
    for name in sorted(schema.predicates, key=lambda n: (schema.predicates[n].level, n)):
        p = schema.predicates[name]
        dom = set_text(p.domain.items) if isinstance(p.domain, SetLit) else p.domain
        out.append(f"level {p.level} predicate {name} = "
                   f"{{ {p.var} : {dom} | {to_text(p.body)} }};")
    out.extend(_metric(schema.metrics[m]) for m in sorted(schema.metrics))
    for name in sorted(schema.functionals):
        out.append(f"functional {name} over {schema.functionals[name].concept};")
    for name in sorted(schema.users):
        u = schema.users[name]
        line = f"user {name} at {u.unit} role {u.role}"
        if u.admin:
            line += " admin"
        if u.grants:
            line += " grant " + ", ".join(sorted(u.grants))
        out.append(line + ";")
    for name in sorted(schema.governs, key=lambda n: (n != "*", n)):
        out.append(f"govern {name} by {schema.governs[name]};")
    out.extend(f"priority {u} = {schema.priorities[u]};" for u in sorted(schema.priorities))
    out.extend(script_text(s) for s in schema.scripts)
    out.extend(f"eval {expression_text(e)};" for e in schema.evals)
    return "".join(line + "\n" for line in out)


__all__ = ["print_canonical", "script_text", "expression_text", "KIND_SHORT"]
