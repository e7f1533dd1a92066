"""Stratified metadata levels.

Level 0 holds data concepts and their individuals.  A level-(j+1)
predicate is formed by compression over level-j entities and may only
mention entities of level j or below; same-level references are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import AccessDenied, LevelViolation, NameCollision, UnboundSymbol
from .evaluator import EvalContext, Universe, comprehend
from .formula import SetLit, predicate_refs
from .schema import MetaPredicate, Schema

DEFAULT_MAX_LEVEL = 8
LEVEL0_DOMAINS = ("concepts", "individuals", "units")


def reference_level(schema: Schema, name: str) -> int | None:
    """Level of a name used in a predicate atom (None when unknown)."""
    if name in schema.concepts:
        return schema.concepts[name].level
    if name in schema.predicates:
        return schema.predicates[name].level
    return None


def domain_level(schema: Schema, domain, pred_level: int) -> int | None:
    """Level of the entities a domain ranges over (None when unresolvable)."""
    if isinstance(domain, (SetLit, frozenset, set)):
        return 0
    if domain in LEVEL0_DOMAINS:
        return 0
    if domain == "predicates":
        return pred_level - 1
    if domain in schema.concepts:
        return schema.concepts[domain].level
    if domain in schema.predicates:
        return schema.predicates[domain].level - 1
    if domain in schema.sorts:
        return 0
    return None


@dataclass(frozen=True)
class StratificationViolation:
    predicate: str
    level: int
    referenced: str
    referenced_level: int
    reason: str

    def __str__(self):
        return (f"level-{self.level} predicate {self.predicate} {self.reason} "
                f"{self.referenced} (level {self.referenced_level})")


def check_stratification(schema: Schema) -> list[StratificationViolation]:
    """Every predicate whose body or domain breaks the level discipline."""
    report = []
    for name in sorted(schema.predicates):
        pred = schema.predicates[name]
        dl = domain_level(schema, pred.domain, pred.level)
        if dl is not None and dl != pred.level - 1:
            dom = pred.domain if isinstance(pred.domain, str) else "{...}"
            report.append(StratificationViolation(
                name, pred.level, dom, dl, "ranges over a domain not one level below:"))
        for ref in sorted(predicate_refs(pred.body)):
            rl = reference_level(schema, ref)
            if rl is not None and rl >= pred.level:
                report.append(StratificationViolation(
                    name, pred.level, ref, rl, "references same-or-higher level"))
    return report


class StratifiedSchema:
    """Level view over a schema, with bounded depth."""

    def __init__(self, schema: Schema, max_level: int = DEFAULT_MAX_LEVEL):
        self.schema = schema
        self.bound = max_level

    @property
    def levels(self) -> dict[int, dict[str, list[str]]]:
        out: dict[int, dict[str, list[str]]] = {0: {"concepts": sorted(self.schema.concepts),
                                                    "predicates": []}}
        for p in sorted(self.schema.predicates.values(), key=lambda p: (p.level, p.name)):
            out.setdefault(p.level, {"concepts": [], "predicates": []})["predicates"].append(p.name)
        return out

    @property
    def max_level(self) -> int:
        return max(self.levels)

    def with_predicate(self, pred: MetaPredicate) -> StratifiedSchema:
        preds = dict(self.schema.predicates)
        preds[pred.name] = pred
        return StratifiedSchema(self.schema.replace(predicates=preds), self.bound)


def lift_level(strat: StratifiedSchema, j: int, phi, name: str, domain=None,
               var: str = "x", universe: Universe | None = None) -> MetaPredicate:
    """Form the level-(j+1) predicate ``name = {x : domain | phi}``.

    The domain defaults to all concepts for j = 0 and to the level-j
    predicates above that.
    """
    schema = strat.schema
    if name in schema.predicates or name in schema.concepts:
        raise NameCollision(f"{name} is already declared")
    if j < 0 or j + 1 > strat.bound:
        raise LevelViolation(f"level {j + 1} is outside 1..{strat.bound}")
    if domain is None:
        domain = "concepts" if j == 0 else "predicates"
    dl = domain_level(schema, domain, j + 1)
    if dl is None:
        raise UnboundSymbol(f"unknown domain {domain!r}")
    if dl != j:
        raise LevelViolation(f"domain {domain!r} ranges over level {dl}, not {j}")
    for ref in predicate_refs(phi):
        rl = reference_level(schema, ref)
        if rl is None:
            raise UnboundSymbol(f"{ref!r} is neither a concept nor a predicate")
        if rl > j:
            raise LevelViolation(f"{ref} is at level {rl}; lifting from level {j}")
    world = universe or Universe(schema)
    entities = world.domain(domain, j + 1)
    ext = comprehend(entities, phi, EvalContext(universe=world), var=var)
    return MetaPredicate(name, j + 1, var, domain, phi, ext)


# -- uniform data/metadata manipulation ---------------------------------------

class Workspace:
    """A schema plus live data objects, manipulated through one vocabulary.

    ``read`` returns the extension of a concept (data) or a meta-predicate
    (metadata); ``write`` updates a data object's state or installs a
    meta-predicate.  Access decisions come from the caller's session.
    """

    def __init__(self, schema: Schema, policy=None, max_level: int = DEFAULT_MAX_LEVEL):
        self.schema = schema
        self.policy = policy
        self.max_level = max_level
        self.universe = Universe(schema)

    @property
    def objects(self):
        return self.universe.objects

    def _unit_of(self, ident: str):
        obj = self.universe.objects.get(ident)
        val = obj.valuation if obj is not None else self.schema.individuals[ident].values
        unit = val.get("unit")
        name = getattr(unit, "name", unit)
        if name in self.schema.units:
            return name
        roots = [u for u, d in self.schema.units.items() if d.parent is None]
        return roots[0] if roots else None

    def manipulate(self, session, target: str, operation: str, payload: dict):
        if target not in ("data", "metadata") or operation not in ("read", "write"):
            raise ValueError(f"unsupported {operation} on {target}")
        return getattr(self, f"_{operation}_{target}")(session, payload)

    def read(self, session, name: str, state: int | None = None) -> frozenset:
        target = "metadata" if name in self.schema.predicates else "data"
        return self.manipulate(session, target, "read", {"name": name, "state": state})

    def _authorize(self, session, kind: str, unit, op: str):
        if session is None:
            return
        from .access import Target, authorize

        decision = authorize(session, Target(kind, unit), op)
        if not decision.allowed:
            raise AccessDenied(decision.reason, f"{op} {kind} at {unit}")

    def _read_data(self, session, payload):
        name = payload["name"]
        if name not in self.schema.concepts:
            raise UnboundSymbol(f"unknown concept {name!r}")
        ids = self.universe.domain(name)
        if session is None:
            return ids
        from .access import Target, authorize

        self._authorize(session, "data", None, "read")
        return frozenset(i for i in ids
                         if authorize(session, Target("data", self._unit_of(i.name)), "read"))

    def _read_metadata(self, session, payload):
        name = payload["name"]
        if name not in self.schema.predicates:
            raise UnboundSymbol(f"unknown predicate {name!r}")
        self._authorize(session, "metadata", None, "read")
        return self.universe.extension(name, payload.get("state"))

    def _write_data(self, session, payload):
        from .model import make_data_object, update_state

        ident = payload["individual"]
        values = payload["values"]
        if ident not in self.schema.individuals:
            raise UnboundSymbol(f"unknown individual {ident!r}")
        self._authorize(session, "data", self._unit_of(ident), "write")
        if session is not None:
            missing = sorted(set(session.profile.required) - set(values))
            if missing:
                from .errors import MandatoryFieldMissing

                raise MandatoryFieldMissing(f"required by profile: {', '.join(missing)}")
        obj = self.universe.objects.get(ident)
        if obj is None:
            decl = self.schema.individuals[ident]
            obj = make_data_object(self.schema.concept(decl.concept), decl.individual, values,
                                   payload.get("label"))
        else:
            obj = update_state(obj, values, payload.get("label"))
        self.universe.objects[ident] = obj
        self.universe.invalidate(1)
        return obj

    def _write_metadata(self, session, payload):
        pred: MetaPredicate = payload["predicate"]
        self._authorize(session, "metadata", None, "write")
        replacing = pred.name in self.schema.predicates
        candidate = dict(self.schema.predicates)
        candidate[pred.name] = MetaPredicate(pred.name, pred.level, pred.var, pred.domain, pred.body)
        trial = self.schema.replace(predicates=candidate)
        if pred.level > self.max_level:
            raise LevelViolation(f"level {pred.level} exceeds the bound {self.max_level}")
        bad = [v for v in check_stratification(trial) if v.predicate == pred.name]
        if bad:
            raise LevelViolation(str(bad[0]))
        if not replacing and pred.name in self.schema.concepts:
            raise NameCollision(f"{pred.name} is a concept")
        self.schema = trial
        self.universe.schema = trial
        self.universe.invalidate(pred.level)
        return self.universe.extension(pred.name)


def uniform_manipulate(workspace: Workspace, session, target: str, operation: str,
                       payload: dict):
    return workspace.manipulate(session, target, operation, payload)


def levels_of(schema: Schema) -> Iterable[int]:
    return sorted({0} | {p.level for p in schema.predicates.values()})
