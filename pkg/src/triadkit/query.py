"""Evaluate query expressions (``eval`` statements) against a schema."""

from __future__ import annotations

from .appraisal import AppraisalModel, Assignment, evaluate_metric, metric_lines
from .errors import UnboundSymbol
from .evaluator import EvalContext, Universe, evaluate_comprehension, individuate
from .formula import Application, Comprehension, HoldsQuery, Unique
from .schema import Schema
from .semnet import Frame, holds
from .values import format_value, sorted_values


def evaluate_expression(schema: Schema, expr, universe: Universe | None = None):
    """Result of a query: a frozenset, a single entity, a metric mapping or a bool."""
    if isinstance(expr, HoldsQuery):
        return holds(schema.network(), Frame(expr.relation, expr.subject, expr.object))
    if isinstance(expr, (Comprehension, Unique)):
        world = universe or Universe(schema)
        if isinstance(expr, Comprehension):
            return evaluate_comprehension(expr, world)
        comp = expr.comprehension
        return individuate(world.domain(comp.domain), comp.body,
                           EvalContext(universe=world), var=comp.var)
    if isinstance(expr, Application):
        steps = [Assignment(kind, values) for kind, values in expr.steps]
        if expr.target in schema.metrics:
            if schema.functionals:
                return AppraisalModel.from_schema(schema).evaluate(expr.target, steps)
            return evaluate_metric(schema.metrics[expr.target], steps)
        if expr.target in schema.functionals:
            f = AppraisalModel.from_schema(schema, expr.target).functional
            for a in steps:
                f = f(a)
            return f.extension
        raise UnboundSymbol(f"{expr.target} is neither a functional nor a metric")
    raise TypeError(f"not a query expression: {expr!r}")


def result_lines(schema: Schema, expr, result) -> list[str]:
    """Deterministic text rendering, one item per line."""
    if isinstance(result, bool):
        return ["true" if result else "false"]
    if isinstance(expr, Application) and expr.target in schema.metrics:
        return metric_lines(schema.metrics[expr.target], result)
    if isinstance(expr, Application):
        return sorted(result)
    if isinstance(result, (frozenset, set)):
        return [format_value(v) for v in sorted_values(result)]
    return [format_value(result)]
