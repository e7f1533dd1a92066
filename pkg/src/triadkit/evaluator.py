"""Evaluation calculus: application, individuation and comprehension.

Formulas are two-valued and judged at a single state index.  A
:class:`Universe` supplies whatever a formula may ask about: attribute
values of individuals (at a state), frames of the semantic network,
concept membership and meta-predicate extensions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .errors import (
    FormulaError, NoSatisfier, NotUnique, OutsideDomain, SortMismatch, UnboundSymbol,
)
from .formula import (
    And, Attr, Compare, Comprehension, FrameAtom, Lit, Member, Not, Or, PredAtom, PyAtom,
    SetLit, Truth, Var, free_vars,
)
from .model import DataObject
from .semnet import Frame, SemanticNetwork, holds
from .values import Const, is_number, sorted_values


# -- finite mappings ----------------------------------------------------------

@dataclass(frozen=True)
class MappingValue:
    domain: frozenset
    codomain: frozenset
    graph: Mapping[Any, Any]

    def __post_init__(self):
        object.__setattr__(self, "domain", frozenset(self.domain))
        object.__setattr__(self, "codomain", frozenset(self.codomain))
        if set(self.graph) != set(self.domain):
            raise ValueError("mapping graph must be total on its domain")
        if any(v not in self.codomain for v in self.graph.values()):
            raise ValueError("mapping image leaves the codomain")

    def __call__(self, x):
        return apply(self, x)


def apply(f: MappingValue, x):
    """Evaluate ``<f, x>`` to ``f(x)``."""
    if x not in f.domain:
        raise OutsideDomain(f"{x!r} is outside the mapping's domain")
    return f.graph[x]


def mapping_space(domain: Iterable, codomain: Iterable):
    """Enumerate B^A: every total mapping from ``domain`` into ``codomain``."""
    a = sorted_values(frozenset(domain))
    b = sorted_values(frozenset(codomain))
    for images in itertools.product(b, repeat=len(a)):
        yield MappingValue(frozenset(a), frozenset(b), dict(zip(a, images)))


# -- universe ------------------------------------------------------------------

class Universe:
    """What formulas are judged against.

    Entities are constants naming individuals, concepts or meta-predicates.
    Plain mappings are also accepted as entities: their keys act as
    attributes, which is convenient for ad-hoc evaluation.
    """

    def __init__(self, schema=None, objects: Mapping[str, DataObject] | None = None,
                 network: SemanticNetwork | None = None):
        self.schema = schema
        if objects is None:
            objects = schema.data_objects() if schema is not None else {}
        self.objects = dict(objects)
        if network is None and schema is not None:
            network = schema.network()
        self.network = network
        self._extensions: dict[str, frozenset] = {}
        self._computing: set[str] = set()

    # attributes ---------------------------------------------------------

    def attribute(self, entity, name: str, state: int | None = None):
        if isinstance(entity, Mapping):
            if name in entity:
                return entity[name]
            raise UnboundSymbol(f"no attribute {name!r}")
        if not isinstance(entity, Const):
            raise UnboundSymbol(f"{entity!r} has no attributes")
        key = entity.name
        if key in self.objects:
            valuation = self.objects[key].valuation_at(state)
            if name in valuation:
                return valuation[name]
            if name == "concept":
                return Const(self.objects[key].concept.name)
        schema = self.schema
        if schema is not None:
            if key in schema.individuals:
                decl = schema.individuals[key]
                if name in decl.key:
                    return decl.key[name]
                if name == "concept":
                    return Const(decl.concept)
            elif key in schema.concepts:
                return self._concept_attribute(schema.concepts[key], name)
            elif key in schema.predicates:
                pred = schema.predicates[key]
                if name == "name":
                    return Const(pred.name)
                if name == "level":
                    return pred.level
        raise UnboundSymbol(f"{key} has no attribute {name!r}")

    @staticmethod
    def _concept_attribute(decl, name):
        if name == "name":
            return Const(decl.name)
        if name == "level":
            return decl.level
        if name == "arity":
            return len(decl.attributes)
        if name == "attributes":
            return frozenset(Const(a) for a, _ in decl.attributes)
        if name == "sorts":
            return frozenset(Const(s) for _, s in decl.attributes)
        raise UnboundSymbol(f"concept {decl.name} has no meta-attribute {name!r}")

    # membership ---------------------------------------------------------

    def member(self, name: str, entity, state: int | None = None) -> bool:
        schema = self.schema
        if schema is not None and name in schema.concepts:
            if not isinstance(entity, Const):
                return False
            if entity.name in self.objects:
                return self.objects[entity.name].concept.name == name
            decl = schema.individuals.get(entity.name)
            return decl is not None and decl.concept == name
        if schema is not None and name in schema.predicates:
            return entity in self.extension(name, state)
        raise UnboundSymbol(f"{name!r} is neither a concept nor a predicate")

    def extension(self, name: str, state: int | None = None) -> frozenset:
        pred = self.schema.predicates[name]
        cache_key = (name, state)
        if cache_key in self._extensions:
            return self._extensions[cache_key]
        if name in self._computing:
            raise FormulaError(f"predicate {name} depends on itself")
        self._computing.add(name)
        try:
            dom = self.domain(pred.domain, pred.level)
            ext = comprehend(dom, pred.body, EvalContext(state, universe=self), var=pred.var)
        finally:
            self._computing.discard(name)
        self._extensions[cache_key] = ext
        return ext

    def invalidate(self, min_level: int = 1):
        """Drop cached extensions of predicates at ``min_level`` and above."""
        schema = self.schema
        for key in list(self._extensions):
            pred = schema.predicates.get(key[0]) if schema is not None else None
            if pred is None or pred.level >= min_level:
                del self._extensions[key]

    # domains ----------------------------------------------------------

    def domain(self, dom, level: int | None = None) -> frozenset:
        """Resolve a domain name (or literal set) to a finite value set.

        ``level`` is the level of the predicate being formed; it gives the
        keyword ``predicates`` its meaning (predicates one level below).
        """
        if isinstance(dom, SetLit):
            return dom.items
        if isinstance(dom, (frozenset, set)):
            return frozenset(dom)
        schema = self.schema
        if schema is None:
            raise UnboundSymbol(f"cannot resolve domain {dom!r} without a schema")
        if dom == "concepts":
            return frozenset(Const(c) for c in schema.concepts)
        if dom == "individuals":
            return frozenset(Const(i) for i in schema.individuals)
        if dom == "units":
            return frozenset(Const(u) for u in schema.units)
        if dom == "predicates":
            target = (level or 1) - 1
            return frozenset(Const(p.name) for p in schema.predicates.values()
                             if p.level == target)
        if dom in schema.concepts:
            return frozenset(Const(i) for i in schema.individuals_of(dom))
        if dom in schema.predicates:
            return self.extension(dom)
        if dom in schema.sorts and schema.sorts[dom].carrier is not None:
            return schema.sorts[dom].carrier
        raise UnboundSymbol(f"unknown domain {dom!r}")


@dataclass
class EvalContext:
    state: int | None = None
    bindings: dict = field(default_factory=dict)
    universe: Universe | None = None

    def bind(self, var: str, value) -> EvalContext:
        b = dict(self.bindings)
        b[var] = value
        return EvalContext(self.state, b, self.universe)


# -- formula truth ------------------------------------------------------------

def _term(t, ctx: EvalContext):
    if isinstance(t, Var):
        if t.name not in ctx.bindings:
            raise UnboundSymbol(f"variable {t.name} is unbound")
        return ctx.bindings[t.name]
    if isinstance(t, Lit):
        return t.value
    if isinstance(t, Attr):
        base = _term(t.base, ctx)
        universe = ctx.universe or _EMPTY
        return universe.attribute(base, t.name, ctx.state)
    raise TypeError(f"not a term: {t!r}")


def _ordered(a, b) -> bool:
    if is_number(a) and is_number(b):
        return True
    return type(a) is type(b) and not isinstance(a, (Const, frozenset))


def _truth(phi, ctx: EvalContext, net: SemanticNetwork | None) -> bool:
    if isinstance(phi, Truth):
        return phi.value
    if isinstance(phi, Not):
        return not _truth(phi.arg, ctx, net)
    if isinstance(phi, And):
        return _truth(phi.left, ctx, net) and _truth(phi.right, ctx, net)
    if isinstance(phi, Or):
        return _truth(phi.left, ctx, net) or _truth(phi.right, ctx, net)
    if isinstance(phi, Compare):
        a, b = _term(phi.left, ctx), _term(phi.right, ctx)
        if phi.op == "=":
            return a == b
        if phi.op == "!=":
            return a != b
        if not _ordered(a, b):
            raise SortMismatch(f"cannot order {a!r} and {b!r}")
        return a < b if phi.op == "<" else a > b
    if isinstance(phi, Member):
        elem = _term(phi.element, ctx)
        if isinstance(phi.collection, SetLit):
            return elem in phi.collection.items
        coll = _term(phi.collection, ctx)
        if not isinstance(coll, (frozenset, set)):
            raise SortMismatch(f"{coll!r} is not a set")
        return elem in coll
    if isinstance(phi, FrameAtom):
        if net is None:
            raise UnboundSymbol(f"no semantic network to judge {phi.relation}")
        return holds(net, Frame(phi.relation, _term(phi.subject, ctx), _term(phi.object, ctx)))
    if isinstance(phi, PredAtom):
        universe = ctx.universe or _EMPTY
        return universe.member(phi.name, _term(phi.arg, ctx), ctx.state)
    if isinstance(phi, PyAtom):
        return bool(phi.fn(_term(Var(phi.var), ctx)))
    raise TypeError(f"not a formula: {phi!r}")


_EMPTY = Universe()


def _network(net, ctx):
    if net is not None:
        return net
    return ctx.universe.network if ctx.universe is not None else None


def _bound_variable(phi, ctx: EvalContext, var: str | None) -> str | None:
    free = free_vars(phi) - set(ctx.bindings)
    if var is not None:
        free.discard(var)
        if free:
            raise UnboundSymbol(f"unbound variables {sorted(free)}")
        return var
    if len(free) > 1:
        raise FormulaError(f"formula has {len(free)} free variables {sorted(free)}")
    return next(iter(free), None)


def evaluate_formula(phi, x=None, net: SemanticNetwork | None = None,
                     ctx: EvalContext | None = None, var: str | None = None) -> bool:
    """Truth of ``phi`` with its free variable bound to ``x``."""
    ctx = ctx or EvalContext()
    name = _bound_variable(phi, ctx, var)
    if name is not None:
        ctx = ctx.bind(name, x)
    return _truth(phi, ctx, _network(net, ctx))


def comprehend(domain: Iterable, phi, ctx: EvalContext | None = None,
               net: SemanticNetwork | None = None, var: str | None = None) -> frozenset:
    """``{x : D | phi}``."""
    ctx = ctx or EvalContext()
    name = _bound_variable(phi, ctx, var)
    network = _network(net, ctx)
    out = set()
    for d in frozenset(domain):
        inner = ctx.bind(name, d) if name is not None else ctx
        if _truth(phi, inner, network):
            out.add(d)
    return frozenset(out)


def individuate(domain: Iterable, phi, ctx: EvalContext | None = None,
                net: SemanticNetwork | None = None, var: str | None = None):
    """The unique element of D satisfying phi."""
    matches = comprehend(domain, phi, ctx, net, var)
    if not matches:
        raise NoSatisfier("no element satisfies the formula")
    if len(matches) > 1:
        raise NotUnique(len(matches), sorted_values(matches))
    return next(iter(matches))


def evaluate_comprehension(comp: Comprehension, universe: Universe,
                           state: int | None = None) -> frozenset:
    dom = universe.domain(comp.domain)
    return comprehend(dom, comp.body, EvalContext(state, universe=universe), var=comp.var)
