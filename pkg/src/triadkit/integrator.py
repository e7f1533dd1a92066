"""Merging component schemas into a base schema, plus versioned history.

Merge works declaration by declaration.  New names are added, identical
declarations are left alone, and a name declared differently on both
sides is settled by semantic priority: each side names the org unit that
governs it (``govern NAME by UNIT;`` or ``govern * by UNIT;``) and the
unit closer to the root wins, unless ``priority UNIT = N;`` overrides its
rank.  Ties go to the lexicographically smaller unit name.  If any conflict
cannot be settled, or the merged result is not integral, the base schema
is returned unchanged together with the report.
"""

from __future__ import annotations

import os
import tempfile
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Mapping

from .dsl import loads, print_canonical
from .errors import IllFormedComponent, TriadError, UnknownVersion
from .integrity import Issue, verify_integrity
from .metamodel import check_stratification
from .schema import Schema

NAME_COLLISION = "NameCollision"
ATTRIBUTE_MISMATCH = "AttributeMismatch"
SORT_REDEFINITION = "SortRedefinition"
LEVEL_VIOLATION = "LevelViolation"
DANGLING_DEPENDENCY = "DanglingDependency"

BASE, COMPONENT, REJECTED = "base", "component", "REJECTED"

# keyed declaration kinds settled one name at a time; the remaining kinds
# (constants, events, frames) are plain sets and merge as unions
_KEYED = ("sort", "concept", "relation", "org", "role", "individual", "predicate",
          "metric", "functional", "user")
_FIELD = {"sort": "sorts", "concept": "concepts", "relation": "relations", "org": "units",
          "role": "roles", "individual": "individuals", "predicate": "predicates",
          "metric": "metrics", "functional": "functionals", "user": "users"}
_NAMESPACE = ("sort", "concept", "relation", "constant", "predicate", "metric",
              "functional", "individual", "org")


@dataclass(frozen=True)
class SemanticPriority:
    """Rank of org units for conflict resolution (lower rank wins)."""

    parent: Mapping[str, str | None]
    overrides: Mapping[str, int] = field(default_factory=dict)

    @classmethod
    def from_schemas(cls, base: Schema, comp: Schema | None = None,
                     overrides: Mapping[str, int] | None = None) -> SemanticPriority:
        parent = {u: d.parent for u, d in base.units.items()}
        ranks: dict[str, int] = {}
        if comp is not None:
            for u, d in comp.units.items():
                parent.setdefault(u, d.parent)
            ranks.update(comp.priorities)
        ranks.update(base.priorities)
        ranks.update(overrides or {})
        return cls(parent, ranks)

    def depth(self, unit: str) -> int | None:
        if unit not in self.parent:
            return None
        seen, d = {unit}, 0
        cur = self.parent[unit]
        while cur is not None:
            if cur in seen or cur not in self.parent:
                return None
            seen.add(cur)
            d += 1
            cur = self.parent[cur]
        return d

    def rank(self, unit: str | None) -> int | None:
        if unit is None:
            return None
        if unit in self.overrides:
            return self.overrides[unit]
        return self.depth(unit)

    def resolve(self, base_unit: str | None, comp_unit: str | None) -> tuple[str, str]:
        """Winning side and a description of the rule that decided it."""
        if base_unit is None or comp_unit is None:
            return REJECTED, "no governing unit on " + ("both sides" if base_unit == comp_unit
                                                         else "one side")
        if base_unit == comp_unit:
            return REJECTED, f"both sides governed by {base_unit}"
        rb, rc = self.rank(base_unit), self.rank(comp_unit)
        if rb is None or rc is None:
            missing = base_unit if rb is None else comp_unit
            return REJECTED, f"unit {missing} has no rank"
        if rb != rc:
            side = BASE if rb < rc else COMPONENT
            return side, f"rank {base_unit}={rb} vs {comp_unit}={rc}"
        side = BASE if base_unit < comp_unit else COMPONENT
        return side, f"rank tie {rb}, name order {min(base_unit, comp_unit)}"


@dataclass(frozen=True)
class ConflictEntry:
    kind: str
    decl_kind: str
    key: Any
    base: Any
    component: Any
    resolution: str
    rule: str

    def __str__(self):
        return f"{self.kind}\t{self.decl_kind} {self.key}\t{self.resolution}\t{self.rule}"


@dataclass(frozen=True)
class ConflictReport:
    entries: tuple[ConflictEntry, ...] = ()
    added: tuple[tuple[str, Any], ...] = ()

    @property
    def rejected(self) -> tuple[ConflictEntry, ...]:
        return tuple(e for e in self.entries if e.resolution == REJECTED)

    @property
    def accepted(self) -> bool:
        return not self.rejected

    @property
    def no_op(self) -> bool:
        """True when the merge changed nothing: every entry kept the base side."""
        return not self.added and all(e.resolution == BASE for e in self.entries)

    def lines(self) -> list[str]:
        out = [f"added\t{kind} {key}" for kind, key in self.added]
        out.extend(str(e) for e in self.entries)
        return out


def governing_unit(schema: Schema, name) -> str | None:
    if isinstance(name, str) and name in schema.governs:
        return schema.governs[name]
    return schema.governs.get("*")


def _classify(kind: str, base_decl, comp_decl) -> str:
    if kind == "sort":
        return SORT_REDEFINITION
    if kind == "concept":
        return ATTRIBUTE_MISMATCH
    if kind == "predicate" and base_decl.level != comp_decl.level:
        return LEVEL_VIOLATION
    return NAME_COLLISION


def check_component(comp: Schema) -> None:
    """Raise IllFormedComponent unless the component is internally sound."""
    bad = check_stratification(comp)
    if bad:
        raise IllFormedComponent(f"component is not stratified: {bad[0]}")
    if comp.evals:
        raise IllFormedComponent("a component carries declarations only, not eval queries")


def merge_component(base: Schema, comp: Schema, prio: SemanticPriority | None = None
                    ) -> tuple[Schema, ConflictReport]:
    """Merge ``comp`` into ``base``; all-or-nothing."""
    check_component(comp)
    prio = prio or SemanticPriority.from_schemas(base, comp)
    tables = {k: dict(getattr(base, _FIELD[k])) for k in _KEYED}
    governs = dict(base.governs)
    entries: list[ConflictEntry] = []
    added: list[tuple[str, Any]] = []

    base_owner = {}
    base_tables = base.keyed_tables()
    for kind in _NAMESPACE:
        for key in base_tables[kind]:
            base_owner.setdefault(key, kind)

    def note_governor(name, unit):
        # record who governs a declaration taken from the component so that
        # later merges see the same owner
        if unit is not None and governing_unit(base.replace(governs=governs), name) != unit:
            governs[name] = unit

    for kind in _KEYED:
        comp_table = getattr(comp, _FIELD[kind])
        for key in sorted(comp_table):
            decl = comp_table[key]
            owner = base_owner.get(key)
            if kind in _NAMESPACE and owner is not None and owner != kind:
                entries.append(ConflictEntry(
                    NAME_COLLISION, kind, key, owner, kind, REJECTED,
                    f"{key} is a {owner} in the base"))
                continue
            if key not in tables[kind]:
                tables[kind][key] = decl
                added.append((kind, key))
                note_governor(key, governing_unit(comp, key))
                continue
            current = tables[kind][key]
            if current == decl:
                continue
            bu, cu = governing_unit(base, key), governing_unit(comp, key)
            side, rule = prio.resolve(bu, cu)
            entries.append(ConflictEntry(_classify(kind, current, decl), kind, key,
                                         current, decl, side, rule))
            if side == COMPONENT:
                tables[kind][key] = decl
                note_governor(key, cu)

    constants = base.constants | comp.constants
    events = base.events | comp.events
    frames = base.frames | comp.frames
    for kind, before, after in (("constant", base.constants, constants),
                                ("event", base.events, events),
                                ("frame", base.frames, frames)):
        added.extend((kind, k) for k in sorted(after - before, key=str))

    priorities = dict(base.priorities)
    for unit, rank in sorted(comp.priorities.items()):
        if unit not in priorities:
            priorities[unit] = rank
            added.append(("priority", unit))
        elif priorities[unit] != rank:
            entries.append(ConflictEntry(NAME_COLLISION, "priority", unit, priorities[unit],
                                         rank, BASE, "base priority table is authoritative"))

    scripts = _multiset_max(base.scripts, comp.scripts)
    if len(scripts) > len(base.scripts):
        added.extend(("script", s.event) for s in scripts[len(base.scripts):])

    merged = base.replace(
        **{_FIELD[k]: tables[k] for k in _KEYED},
        constants=constants, events=events, frames=frames, governs=governs,
        priorities=priorities, scripts=scripts, positions={},
    )

    if comp.component is not None:
        known = set()
        for kind, table in merged.keyed_tables().items():
            known |= {k for k in table if isinstance(k, str)}
        for req in sorted(comp.component.requires):
            if req not in known:
                entries.append(ConflictEntry(DANGLING_DEPENDENCY, "component",
                                             comp.component.name, None, req, REJECTED,
                                             f"requires {req}, absent from the base"))

    if not any(e.resolution == REJECTED for e in entries):
        before = {str(i) for i in verify_integrity(base)}
        for issue in verify_integrity(merged):
            if str(issue) not in before:
                entries.append(_issue_entry(issue))

    report = ConflictReport(tuple(entries), tuple(added))
    if not report.accepted:
        return base, report
    return merged, report


def _issue_entry(issue: Issue) -> ConflictEntry:
    kind = LEVEL_VIOLATION if issue.category == "stratification" else DANGLING_DEPENDENCY
    if issue.category == "duplicate-name":
        kind = NAME_COLLISION
    return ConflictEntry(kind, issue.kind_key[0], issue.kind_key[1], None, None, REJECTED,
                         f"merged schema fails integrity: {issue.detail}")


def _multiset_max(base: tuple, comp: tuple) -> tuple:
    """Base scripts, then component copies beyond the base's multiplicity."""
    have = Counter(base)
    want = Counter(comp)
    extra = []
    for s in comp:
        if want[s] > have[s]:
            extra.append(s)
            have[s] += 1
    return base + tuple(extra)


# -- history -------------------------------------------------------------------

MANIFEST = "MANIFEST"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass(frozen=True)
class HistoryEntry:
    version: int
    parent: int | None
    operation: str
    text: str
    timestamp: str

    def manifest_line(self) -> str:
        parent = "-" if self.parent is None else str(self.parent)
        return f"{self.version}\t{parent}\t{self.operation}\t{self.timestamp}"


class SchemaHistory:
    """Append-only list of canonical schema texts."""

    def __init__(self, entries=(), clock: Callable[[], str] = _now):
        self._entries: list[HistoryEntry] = list(entries)
        self.clock = clock

    @property
    def entries(self) -> tuple[HistoryEntry, ...]:
        return tuple(self._entries)

    @property
    def current(self) -> int | None:
        return self._entries[-1].version if self._entries else None

    def __len__(self):
        return len(self._entries)

    def entry(self, version: int) -> HistoryEntry:
        for e in self._entries:
            if e.version == version:
                return e
        raise UnknownVersion(f"no version {version}")

    def text(self, version: int | None = None) -> str:
        if version is None:
            if self.current is None:
                raise UnknownVersion("history is empty")
            version = self.current
        return self.entry(version).text

    def schema(self, version: int | None = None) -> Schema:
        return loads(self.text(version))

    def commit(self, schema: Schema | str, operation: str) -> int:
        text = schema if isinstance(schema, str) else print_canonical(schema)
        version = (self.current or 0) + 1
        self._entries.append(HistoryEntry(version, self.current, operation, text, self.clock()))
        return version

    # -- directory layout: 0001.tdk ... plus a tab-separated manifest ----------

    @staticmethod
    def _file(directory: Path, version: int) -> Path:
        return directory / f"{version:04d}.tdk"

    def save(self, directory) -> None:
        """Write new versions and the manifest; stored versions are never rewritten."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for e in self._entries:
            path = self._file(directory, e.version)
            if path.exists():
                if path.read_text(encoding="utf-8") != e.text:
                    raise TriadError(f"stored version {e.version} differs from history")
                continue
            _atomic_write(path, e.text)
        _atomic_write(directory / MANIFEST,
                      "".join(e.manifest_line() + "\n" for e in self._entries))

    @classmethod
    def load(cls, directory, clock: Callable[[], str] = _now) -> SchemaHistory:
        directory = Path(directory)
        manifest = directory / MANIFEST
        if not manifest.exists():
            return cls(clock=clock)
        entries = []
        for line in manifest.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            version, parent, operation, stamp = line.split("\t")
            v = int(version)
            text = cls._file(directory, v).read_text(encoding="utf-8")
            entries.append(HistoryEntry(v, None if parent == "-" else int(parent),
                                        operation, text, stamp))
        return cls(entries, clock)


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def rollback(history: SchemaHistory, version: int) -> Schema:
    """Re-commit an earlier version's text as the newest version."""
    text = history.entry(version).text
    schema = loads(text)
    history.commit(text, f"rollback-to-{version}")
    return schema


def merge_into_history(history: SchemaHistory, comp: Schema, name: str | None = None,
                       prio: SemanticPriority | None = None) -> tuple[Schema, ConflictReport]:
    """Merge into the current version and commit the result if accepted."""
    base = history.schema()
    merged, report = merge_component(base, comp, prio)
    if report.accepted and not report.no_op:
        label = name or (comp.component.name if comp.component else "component")
        history.commit(merged, f"merge-{label}")
    return merged, report


__all__ = [
    "ATTRIBUTE_MISMATCH", "BASE", "COMPONENT", "ConflictEntry", "ConflictReport",
    "DANGLING_DEPENDENCY", "HistoryEntry", "LEVEL_VIOLATION", "NAME_COLLISION", "REJECTED",
    "SORT_REDEFINITION", "SchemaHistory", "SemanticPriority", "check_component",
    "governing_unit", "merge_component", "merge_into_history", "rollback", "verify_integrity",
]
