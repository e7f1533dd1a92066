"""Formula syntax trees and the query expressions built on them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

from .values import format_value, sorted_values


# -- terms -----------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lit:
    value: object


@dataclass(frozen=True)
class Attr:
    base: "Term"
    name: str


Term = Union[Var, Lit, Attr]


@dataclass(frozen=True)
class SetLit:
    items: frozenset

    def __post_init__(self):
        object.__setattr__(self, "items", frozenset(self.items))


# -- formulas ----------------------------------------------------------------

COMPARISONS = ("=", "!=", "<", ">")


@dataclass(frozen=True)
class Truth:
    value: bool


@dataclass(frozen=True)
class Compare:
    op: str
    left: Term
    right: Term

    def __post_init__(self):
        if self.op not in COMPARISONS:
            raise ValueError(f"unknown comparison {self.op!r}")


@dataclass(frozen=True)
class Member:
    element: Term
    collection: Union[SetLit, Term]


@dataclass(frozen=True)
class FrameAtom:
    relation: str
    subject: Term
    object: Term


@dataclass(frozen=True)
class PredAtom:
    """``P(t)``: membership of t in a concept or meta-predicate."""

    name: str
    arg: Term


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class PyAtom:
    """Library-only atom wrapping a Python predicate over the bound value.

    It has no surface syntax and cannot be printed.
    """

    label: str
    fn: Callable = field(compare=False)
    var: str = "x"


Formula = Union[Truth, Compare, Member, FrameAtom, PredAtom, Not, And, Or, PyAtom]


def conj(*parts):
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(*parts):
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


# -- analysis -----------------------------------------------------------------

def _term_vars(t) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Attr):
        return _term_vars(t.base)
    return set()


def free_vars(phi) -> set[str]:
    if isinstance(phi, Truth):
        return set()
    if isinstance(phi, Compare):
        return _term_vars(phi.left) | _term_vars(phi.right)
    if isinstance(phi, Member):
        coll = set() if isinstance(phi.collection, SetLit) else _term_vars(phi.collection)
        return _term_vars(phi.element) | coll
    if isinstance(phi, FrameAtom):
        return _term_vars(phi.subject) | _term_vars(phi.object)
    if isinstance(phi, PredAtom):
        return _term_vars(phi.arg)
    if isinstance(phi, Not):
        return free_vars(phi.arg)
    if isinstance(phi, (And, Or)):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, PyAtom):
        return {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def walk(phi):
    """Yield every formula node, pre-order."""
    yield phi
    if isinstance(phi, Not):
        yield from walk(phi.arg)
    elif isinstance(phi, (And, Or)):
        yield from walk(phi.left)
        yield from walk(phi.right)


def _term_literals(t):
    if isinstance(t, Lit):
        yield t.value
    elif isinstance(t, Attr):
        yield from _term_literals(t.base)


def literals(phi):
    """Constant values mentioned anywhere in the formula."""
    for node in walk(phi):
        if isinstance(node, Compare):
            yield from _term_literals(node.left)
            yield from _term_literals(node.right)
        elif isinstance(node, Member):
            yield from _term_literals(node.element)
            if isinstance(node.collection, SetLit):
                yield from node.collection.items
            else:
                yield from _term_literals(node.collection)
        elif isinstance(node, FrameAtom):
            yield from _term_literals(node.subject)
            yield from _term_literals(node.object)
        elif isinstance(node, PredAtom):
            yield from _term_literals(node.arg)


def predicate_refs(phi) -> set[str]:
    return {n.name for n in walk(phi) if isinstance(n, PredAtom)}


def relation_refs(phi) -> set[str]:
    return {n.relation for n in walk(phi) if isinstance(n, FrameAtom)}


def depth(phi) -> int:
    if isinstance(phi, Not):
        return 1 + depth(phi.arg)
    if isinstance(phi, (And, Or)):
        return 1 + max(depth(phi.left), depth(phi.right))
    return 0


# -- text -----------------------------------------------------------------

def term_text(t) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Lit):
        return format_value(t.value)
    if isinstance(t, Attr):
        return f"{term_text(t.base)}.{t.name}"
    raise TypeError(f"not a term: {t!r}")


def set_text(items) -> str:
    return "{" + ", ".join(format_value(v) for v in sorted_values(items)) + "}"


def to_text(phi) -> str:
    if isinstance(phi, Truth):
        return "true" if phi.value else "false"
    if isinstance(phi, Compare):
        return f"{term_text(phi.left)} {phi.op} {term_text(phi.right)}"
    if isinstance(phi, Member):
        coll = set_text(phi.collection.items) if isinstance(phi.collection, SetLit) \
            else term_text(phi.collection)
        return f"{term_text(phi.element)} in {coll}"
    if isinstance(phi, FrameAtom):
        return f"{phi.relation}({term_text(phi.subject)}, {term_text(phi.object)})"
    if isinstance(phi, PredAtom):
        return f"{phi.name}({term_text(phi.arg)})"
    if isinstance(phi, Not):
        return f"not {to_text(phi.arg)}"
    if isinstance(phi, And):
        return f"({to_text(phi.left)} and {to_text(phi.right)})"
    if isinstance(phi, Or):
        return f"({to_text(phi.left)} or {to_text(phi.right)})"
    if isinstance(phi, PyAtom):
        raise ValueError(f"python atom {phi.label!r} has no text form")
    raise TypeError(f"not a formula: {phi!r}")


# -- query expressions ----------------------------------------------------------

@dataclass(frozen=True)
class Comprehension:
    """``{ var : domain | body }``; ``domain`` is a name or a SetLit."""

    var: str
    domain: Union[str, SetLit]
    body: Formula

    def to_text(self) -> str:
        dom = self.domain if isinstance(self.domain, str) else set_text(self.domain.items)
        return f"{{ {self.var} : {dom} | {to_text(self.body)} }}"


@dataclass(frozen=True)
class Unique:
    comprehension: Comprehension

    def to_text(self) -> str:
        return f"unique {self.comprehension.to_text()}"


@dataclass(frozen=True)
class Application:
    """``NAME(s={..})(p={..})``: a functional or metric under assignment points."""

    target: str
    steps: tuple[tuple[str, frozenset], ...] = ()

    def to_text(self) -> str:
        parts = [self.target]
        for kind, values in self.steps:
            short = KIND_SHORT[kind]
            parts.append(f"({short}={set_text(values)})")
        return "".join(parts)


@dataclass(frozen=True)
class HoldsQuery:
    relation: str
    subject: object
    object: object

    def to_text(self) -> str:
        return f"holds {self.relation}({format_value(self.subject)}, {format_value(self.object)})"


Expression = Union[Comprehension, Unique, Application, HoldsQuery]

LABOR_FUNCTION = "labor_function"
ORG_UNIT = "org_unit"
KINDS = (LABOR_FUNCTION, ORG_UNIT)
KIND_SHORT = {LABOR_FUNCTION: "s", ORG_UNIT: "p"}
KIND_ALIASES = {"s": LABOR_FUNCTION, "p": ORG_UNIT,
                LABOR_FUNCTION: LABOR_FUNCTION, ORG_UNIT: ORG_UNIT}
