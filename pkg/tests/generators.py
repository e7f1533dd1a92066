"""Seeded random generators shared by the property and acceptance tests."""

from __future__ import annotations

import operator
import random
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Callable

from triadkit.formula import And, Attr, Compare, Lit, Member, Not, Or, SetLit, Truth, Var
from triadkit.values import Const

# -- formulas with an independent Python oracle ---------------------------------

ATTRS = ("a", "b")
COLORS = tuple(Const(c) for c in ("red", "green", "blue", "grey"))


class Record(Mapping):
    """Hashable read-only attribute record, usable as a domain element."""

    def __init__(self, **items):
        self._items = dict(items)
        self._key = tuple(sorted(items.items(), key=lambda kv: kv[0]))

    def __getitem__(self, k):
        return self._items[k]

    def __iter__(self):
        return iter(self._items)

    def __len__(self):
        return len(self._items)

    def __hash__(self):
        return hash(self._key)

    def __eq__(self, other):
        return isinstance(other, Record) and self._key == other._key

    def __repr__(self):
        return f"Record({self._items})"


def random_entities(rng: random.Random, size: int) -> list[Record]:
    return [Record(id=i, a=rng.randint(0, 9), b=rng.randint(-5, 5), c=rng.choice(COLORS))
            for i in range(size)]


@dataclass
class GenFormula:
    ast: object
    oracle: Callable[[dict], bool]
    depth: int


def random_formula(rng: random.Random, max_depth: int) -> GenFormula:
    """A formula over entity attributes a, b (ints) and c (colour) plus a
    closure that judges the same condition with plain Python."""
    if max_depth == 0 or rng.random() < 0.3:
        return _atom(rng)
    kind = rng.choice(("and", "or", "not"))
    if kind == "not":
        inner = random_formula(rng, max_depth - 1)
        return GenFormula(Not(inner.ast), lambda e, f=inner.oracle: not f(e), inner.depth + 1)
    left = random_formula(rng, max_depth - 1)
    right = random_formula(rng, max_depth - 1)
    if kind == "and":
        ast, fn = And(left.ast, right.ast), (lambda e, l=left.oracle, r=right.oracle: l(e) and r(e))
    else:
        ast, fn = Or(left.ast, right.ast), (lambda e, l=left.oracle, r=right.oracle: l(e) or r(e))
    return GenFormula(ast, fn, max(left.depth, right.depth) + 1)


_OPS = {"=": operator.eq, "!=": operator.ne, "<": operator.lt, ">": operator.gt}


def _atom(rng: random.Random) -> GenFormula:
    choice = rng.randrange(4)
    if choice == 0:
        value = rng.random() < 0.5
        return GenFormula(Truth(value), lambda e, v=value: v, 0)
    if choice == 1:
        members = frozenset(rng.sample(COLORS, rng.randint(1, 3)))
        return GenFormula(Member(Attr(Var("x"), "c"), SetLit(members)),
                          lambda e, m=members: e["c"] in m, 0)
    attr = rng.choice(ATTRS)
    op = rng.choice(tuple(_OPS))
    k = rng.randint(-3, 9)
    return GenFormula(Compare(op, Attr(Var("x"), attr), Lit(k)),
                      lambda e, a=attr, f=_OPS[op], k=k: f(e[a], k), 0)


# -- org hierarchies -------------------------------------------------------------

def random_tree(rng: random.Random, n: int, prefix: str = "u") -> dict[str, str | None]:
    """Parent map of a random rooted tree with ``n`` nodes."""
    names = [f"{prefix}{i}" for i in range(n)]
    parent = {names[0]: None}
    for i in range(1, n):
        parent[names[i]] = names[rng.randrange(i)]
    return parent


def subtree_oracle(parent: dict[str, str | None], unit: str) -> set[str]:
    """Units whose ancestor chain passes through ``unit`` (walks upward)."""
    out = set()
    for u in parent:
        cur = u
        while cur is not None:
            if cur == unit:
                out.add(u)
                break
            cur = parent[cur]
    return out


# -- DSL documents -----------------------------------------------------------------

_WORDS = ("alpha", "beta", "gamma", "delta", "omega", "sigma", "kappa", "theta")
_TEXTS = ("Ivanov", "Петров", "a \"quoted\" name", "tab\there", "line\nbreak", "", "x y z")
_DATES = ("2001-02-03", "1999-12-31", "2024-02-29")


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") \
        .replace("\t", "\\t") + '"'


def random_document(rng: random.Random) -> str:
    """A well-formed ``.tdk`` document exercising every statement kind."""
    out: list[str] = []
    carriers: dict[str, list[str]] = {}
    consts = []
    for i in range(rng.randint(0, 3)):
        values = [f"k{i}_{w}" for w in rng.sample(_WORDS, rng.randint(1, 4))]
        carriers[f"S{i}"] = values
        out.append(f"sort S{i} = {{{', '.join(values)}}};")
    if rng.random() < 0.5:
        out.append("sort Money : decimal;")
    scalar_sorts = ["text", "integer", "decimal", "date"] + (
        ["Money"] if "sort Money : decimal;" in out else [])
    for i in range(rng.randint(0, 3)):
        consts.append(f"c{i}")
        out.append(f"constant c{i};")

    concepts: dict[str, list[tuple[str, str]]] = {}
    for i in range(rng.randint(0, 3)):
        attrs = []
        for j in range(rng.randint(0, 4)):
            sort = rng.choice(list(carriers) + scalar_sorts)
            attrs.append((f"f{j}", sort))
        concepts[f"C{i}"] = attrs
        body = ", ".join(f"{a}: {s}" for a, s in attrs)
        out.append(f"concept C{i} {{ {body} }};")

    relations = [f"r{i}" for i in range(rng.randint(0, 3))]
    out.extend(f"relation {r}/2;" for r in relations)

    units = []
    n_units = rng.randint(0, 5)
    for i in range(n_units):
        parent = f" under u{rng.randrange(i)}" if i else ""
        vac = f" vacancies {rng.randint(1, 4)}" if rng.random() < 0.5 else ""
        enr = f" enrolled {rng.randint(1, 4)}" if rng.random() < 0.3 else ""
        units.append(f"u{i}")
        out.append(f"org u{i}{parent}{vac}{enr};")

    roles = []
    for i in range(rng.randint(0, 2)):
        parts = [f"role R{i}"]
        if rng.random() < 0.5:
            parts.append("metadata none")
        if rng.random() < 0.5:
            parts.append("writes subtree")
        if rng.random() < 0.5:
            parts.append("requires " + ", ".join(sorted(rng.sample(["f0", "f1", "name"], 2))))
        roles.append(f"R{i}")
        out.append(" ".join(parts) + ";")

    events = [f"ev{i}" for i in range(rng.randint(0, 2))]
    out.extend(f"event {e};" for e in events)

    individuals = []
    for i in range(rng.randint(0, 4)):
        if not concepts:
            break
        cname = rng.choice(list(concepts))
        attrs = concepts[cname]
        vals = {a: _value_for(rng, s, carriers) for a, s in attrs}
        key = {a: vals[a] for a in rng.sample([a for a, _ in attrs], min(len(attrs), 1))}
        line = f"individual i{i} : {cname}"
        if key:
            line += " key {" + ", ".join(f"{a} = {v}" for a, v in key.items()) + "}"
        if attrs and rng.random() < 0.7:
            line += " values {" + ", ".join(f"{a} = {v}" for a, v in vals.items()) + "}"
        individuals.append(f"i{i}")
        out.append(line + ";")

    frame_consts = consts + individuals + units + [v for vs in carriers.values() for v in vs]
    for _ in range(rng.randint(0, 4)):
        if not relations or not frame_consts:
            break
        a = rng.choice(frame_consts + [str(rng.randint(0, 99))])
        b = rng.choice(frame_consts + [str(rng.randint(0, 99))])
        out.append(f"frame {rng.choice(relations)}({a}, {b});")

    level1 = []
    if concepts:
        for i in range(rng.randint(0, 3)):
            body = rng.choice([
                f"x.arity > {rng.randint(0, 3)}",
                f"x.name in {{{', '.join(rng.sample(list(concepts), 1))}}}",
                f"not (x.level = 0) or x.arity = {rng.randint(0, 2)}",
                "true",
            ])
            level1.append(f"P{i}")
            out.append(f"level 1 predicate P{i} = {{ x : concepts | {body} }};")
    for i in range(rng.randint(0, 2) if level1 else 0):
        refs = rng.sample(level1, min(2, len(level1)))
        body = " or ".join(f"x.name = {r}" for r in refs)
        out.append(f"level 2 predicate Q{i} = {{ y : predicates | {body} }};".replace("x.", "y."))

    kinds = ["labor_function", "org_unit"]
    for i in range(rng.randint(0, 2)):
        deps = rng.sample(kinds, rng.randint(0, 2))
        line = f"metric m{i}"
        if deps:
            line += " depends on " + ", ".join(deps)
        entries = []
        for j in range(rng.randint(0, 3)):
            label = ", ".join(f"v{j}_{d[0]}" for d in deps)
            value = rng.choice(["", f" = {rng.randint(-9, 99)}", f" = {rng.randint(0, 9)}.5"])
            entries.append(f"({label}) -> m{i}_comp{j}{value}")
        if entries and deps:
            line += " { " + ", ".join(entries) + " }"
        elif not deps and rng.random() < 0.5:
            line += f" {{ () -> m{i}_only = 1 }}"
        out.append(line + ";")

    if concepts and rng.random() < 0.5:
        out.append(f"functional F over {rng.choice(list(concepts))};")

    if units:
        all_roles = roles + ["president", "department_employee"]
        for i in range(rng.randint(0, 3)):
            line = f"user user{i} at {rng.choice(units)} role {rng.choice(all_roles)}"
            if rng.random() < 0.3:
                line += " admin"
            if rng.random() < 0.3:
                line += " grant " + ", ".join(sorted(rng.sample(units, 1)))
            out.append(line + ";")
        if rng.random() < 0.5:
            out.append(f"govern * by {rng.choice(units)};")
        if concepts and rng.random() < 0.5:
            out.append(f"govern {rng.choice(list(concepts))} by {rng.choice(units)};")
        if rng.random() < 0.4:
            out.append(f"priority {rng.choice(units)} = {rng.randint(0, 5)};")

    all_events = ["enroll", "transfer", "dismiss", "re_enroll"] + events
    for _ in range(rng.randint(0, 3)):
        actions = []
        for _ in range(rng.randint(1, 3)):
            pick = rng.randrange(4)
            if pick == 0:
                actions.append(f"counter n{rng.randint(0, 2)} {rng.choice(['+=', '-='])} "
                               f"{rng.randint(0, 3)}")
            elif pick == 1 and relations:
                actions.append(f"frame {rng.choice(relations)}($subject, $unit)")
            elif pick == 2:
                actions.append(f"fail {_q(rng.choice(_TEXTS))}")
            else:
                target = rng.choice(units) if units else "$unit"
                actions.append(f"vacancy {target} += {rng.randint(0, 2)}")
        head = f"script on {rng.choice(all_events)}"
        if concepts and rng.random() < 0.3:
            head += f" concept {rng.choice(list(concepts))}"
        if units and rng.random() < 0.3:
            head += f" unit {rng.choice(units)}"
        out.append(head + " { " + "; ".join(actions) + "; };")

    if rng.random() < 0.3 and relations and frame_consts:
        out.append(f"eval holds {rng.choice(relations)}({rng.choice(frame_consts)}, "
                   f"{rng.choice(frame_consts)});")
    if concepts and rng.random() < 0.3:
        out.append(f"eval {{ x : {rng.choice(list(concepts))} | true }};")
    rng.shuffle(out)
    return "\n".join(out) + "\n"


def _value_for(rng: random.Random, sort: str, carriers: dict[str, list[str]]) -> str:
    if sort in carriers:
        return rng.choice(carriers[sort])
    if sort == "text":
        return _q(rng.choice(_TEXTS))
    if sort == "integer":
        return str(rng.randint(-50, 50))
    if sort in ("decimal", "Money"):
        return f"{rng.randint(-20, 20)}.{rng.randint(0, 99):02d}"
    return _q(rng.choice(_DATES))


# -- component schemas for merging ------------------------------------------------

MERGE_BASE = """\
org corp;
org east under corp;
org west under corp;
org east_sales under east;
org west_dev under west;
sort Grade = {junior, senior};
concept Person { name: text, grade: Grade };
concept Site { city: text };
relation located_in/2;
govern * by east;
individual alice : Person key {name = "Alice"} values {name = "Alice", grade = junior};
"""

UNITS = ("corp", "east", "west", "east_sales", "west_dev")


BASE_REDEFINITIONS = (
    "concept Site { city: text, zip: integer };",
    "sort Grade = {junior, senior, lead};",
    "relation located_in/2;",
    "concept Person { name: text, grade: text };",
)


def random_component(rng: random.Random, tag: str,
                     redefinitions: tuple[str, ...] = BASE_REDEFINITIONS) -> str:
    """A component whose own names all carry ``tag``; it may also redefine
    one base declaration drawn from ``redefinitions`` (settled by priority
    or rejected)."""
    out = [f"component comp_{tag} requires Person;"]
    unit = rng.choice(UNITS)
    out.append(f"govern * by {unit};")
    n_sorts = rng.randint(0, 2)
    for i in range(n_sorts):
        vals = ", ".join(f"{tag}_v{i}_{j}" for j in range(rng.randint(1, 3)))
        out.append(f"sort {tag}_S{i} = {{{vals}}};")
    sorts = [f"{tag}_S{i}" for i in range(n_sorts)] + ["text", "integer", "Grade"]
    concepts = []
    for i in range(rng.randint(0, 3)):
        attrs = ", ".join(f"g{j}: {rng.choice(sorts)}" for j in range(rng.randint(0, 3)))
        concepts.append(f"{tag}_C{i}")
        out.append(f"concept {tag}_C{i} {{ {attrs} }};")
    for i in range(rng.randint(0, 2)):
        out.append(f"relation {tag}_r{i}/2;")
    if rng.random() < 0.5:
        out.append(f"org {tag}_unit under {rng.choice(UNITS)} vacancies {rng.randint(0, 3)};")
    if rng.random() < 0.5:
        out.append(f"event {tag}_ev;")
        out.append(f"script on {tag}_ev {{ counter {tag}_n += 1; }};")
    if concepts and rng.random() < 0.5:
        out.append(f"level 1 predicate {tag}_P = {{ x : concepts | x.name = {concepts[0]} }};")
    if rng.random() < 0.5:
        out.append(f"metric {tag}_m depends on labor_function "
                   f"{{ (development) -> {tag}_m_dev = {rng.randint(1, 9)} }};")
    if redefinitions and rng.random() < 0.5:
        out.append(rng.choice(redefinitions))
    rng.shuffle(out)
    return "\n".join(out) + "\n"
