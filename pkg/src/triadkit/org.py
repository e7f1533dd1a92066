"""Organization hierarchy: corporation, companies, departments."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import UnknownUnit


@dataclass(frozen=True)
class OrgStructure:
    parent: Mapping[str, str | None]
    vacancies: Mapping[str, int] = field(default_factory=dict)
    enrolled: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        roots = [u for u, p in self.parent.items() if p is None]
        if self.parent and len(roots) != 1:
            raise ValueError(f"expected a single root unit, found {sorted(roots)}")
        for u, p in self.parent.items():
            if p is not None and p not in self.parent:
                raise UnknownUnit(f"{u} sits under undeclared unit {p}")
        for u in self.parent:  # acyclic: every chain reaches the root
            seen = set()
            while u is not None:
                if u in seen:
                    raise ValueError(f"cycle through unit {u}")
                seen.add(u)
                u = self.parent[u]
        kids: dict[str, list[str]] = {u: [] for u in self.parent}
        for u, p in sorted(self.parent.items()):
            if p is not None:
                kids[p].append(u)
        object.__setattr__(self, "_children", kids)
        if any(v < 0 for v in self.vacancies.values()) or any(
                e < 0 for e in self.enrolled.values()):
            raise ValueError("unit counters must be non-negative")

    @classmethod
    def from_schema(cls, schema) -> OrgStructure:
        return cls({u: d.parent for u, d in schema.units.items()},
                   {u: d.vacancies for u, d in schema.units.items()},
                   {u: d.enrolled for u, d in schema.units.items()})

    @property
    def units(self) -> list[str]:
        return sorted(self.parent)

    @property
    def root(self) -> str | None:
        for u, p in self.parent.items():
            if p is None:
                return u
        return None

    def check(self, unit: str) -> str:
        if unit not in self.parent:
            raise UnknownUnit(f"unknown unit {unit!r}")
        return unit

    def children(self, unit: str) -> list[str]:
        return list(self._children.get(unit, ()))

    def ancestors(self, unit: str) -> list[str]:
        """Chain from ``unit`` up to the root, inclusive."""
        self.check(unit)
        chain = []
        while unit is not None:
            chain.append(unit)
            unit = self.parent[unit]
        return chain

    def depth(self, unit: str) -> int:
        return len(self.ancestors(unit)) - 1

    def subtree(self, unit: str) -> frozenset[str]:
        self.check(unit)
        out, stack = set(), [unit]
        while stack:
            u = stack.pop()
            out.add(u)
            stack.extend(self.children(u))
        return frozenset(out)

    def is_under(self, unit: str, ancestor: str) -> bool:
        """True when ``unit`` is ``ancestor`` or one of its descendants."""
        if unit not in self.parent:
            return False
        return ancestor in self.ancestors(unit)

    def leaves(self) -> list[str]:
        parents = {p for p in self.parent.values() if p is not None}
        return sorted(u for u in self.parent if u not in parents)
