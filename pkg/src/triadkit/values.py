"""Scalar values: interned constants, numbers, text, dates."""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation

SCALAR_KINDS = ("text", "integer", "decimal", "date")


@dataclass(frozen=True, order=True)
class Const:
    """An interned identifier constant, compared by name."""

    name: str

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f"Const({self.name!r})"


def is_number(v) -> bool:
    return isinstance(v, (int, Decimal)) and not isinstance(v, bool)


def sort_key(v):
    """Total order over heterogeneous values, used for canonical output."""
    if isinstance(v, Const):
        return (0, v.name)
    if is_number(v):
        return (1, Decimal(v))
    if isinstance(v, str):
        return (2, v)
    if isinstance(v, _dt.date):
        return (3, v.isoformat())
    if isinstance(v, tuple):
        return (4, tuple(sort_key(x) for x in v))
    if isinstance(v, frozenset):
        return (5, tuple(sorted(sort_key(x) for x in v)))
    return (9, repr(v))


def sorted_values(values):
    return sorted(values, key=sort_key)


def quote(s: str) -> str:
    out = s.replace("\\", "\\\\").replace('"', '\\"')
    out = out.replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r")
    return f'"{out}"'


def format_value(v) -> str:
    """Render a value in its DSL literal form."""
    if isinstance(v, Const):
        return v.name
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Decimal):
        text = format(v, "f")
        return text if "." in text else text + ".0"
    if isinstance(v, str):
        return quote(v)
    if isinstance(v, _dt.date):
        return quote(v.isoformat())
    if isinstance(v, frozenset):
        return "{" + ", ".join(format_value(x) for x in sorted_values(v)) + "}"
    raise TypeError(f"not a DSL value: {v!r}")


def coerce_scalar(kind: str, v):
    """Coerce ``v`` to the scalar ``kind``; return None when it does not fit."""
    if kind == "text":
        return v if isinstance(v, str) else None
    if kind == "integer":
        return v if isinstance(v, int) and not isinstance(v, bool) else None
    if kind == "decimal":
        if is_number(v):
            return Decimal(v)
        return None
    if kind == "date":
        if isinstance(v, _dt.date):
            return v
        if isinstance(v, str):
            try:
                return _dt.date.fromisoformat(v)
            except ValueError:
                return None
        return None
    raise ValueError(f"unknown scalar kind {kind!r}")


def parse_number(text: str):
    if "." in text:
        try:
            return Decimal(text)
        except InvalidOperation:  # pragma: no cover - lexer guarantees digits
            raise ValueError(text) from None
    return int(text)
