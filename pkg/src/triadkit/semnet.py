"""Semantic networks over a language of dyadic relations and constants.

Atomic formulas are frames ``r(a, b)``.  Integer literals are self-declaring
constants, so thresholds such as ``manages_count_over(e1, 50)`` need no
separate declaration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import ArityViolation, IndividualMismatch, UndeclaredSymbol
from .model import DataObject
from .values import Const, format_value, sort_key


def _as_const(v):
    if isinstance(v, str):
        return Const(v)
    return v


@dataclass(frozen=True)
class NetworkLanguage:
    relations: frozenset[str] = frozenset()
    constants: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "relations", frozenset(self.relations))
        object.__setattr__(self, "constants", frozenset(_as_const(c) for c in self.constants))
        clash = {c.name for c in self.constants if isinstance(c, Const)} & self.relations
        if clash:
            raise ValueError(f"relation and constant names overlap: {sorted(clash)}")

    def declares_constant(self, c) -> bool:
        if isinstance(c, int) and not isinstance(c, bool):
            return True
        return c in self.constants

    def extend(self, relations: Iterable[str] = (), constants: Iterable = ()) -> NetworkLanguage:
        return NetworkLanguage(self.relations | set(relations),
                               self.constants | {_as_const(c) for c in constants})


@dataclass(frozen=True)
class Frame:
    relation: str
    subject: object
    object: object

    def __post_init__(self):
        object.__setattr__(self, "subject", _as_const(self.subject))
        object.__setattr__(self, "object", _as_const(self.object))

    def __lt__(self, other):  # mixed constant types need the value order
        return _frame_key(self) < _frame_key(other)

    def __str__(self):
        return f"{self.relation}({format_value(self.subject)}, {format_value(self.object)})"


def _frame_key(f: Frame):
    return (f.relation, sort_key(f.subject), sort_key(f.object))


def sorted_frames(frames: Iterable[Frame]) -> list[Frame]:
    return sorted(frames, key=_frame_key)


@dataclass(frozen=True)
class SemanticNetwork:
    language: NetworkLanguage
    frames: frozenset[Frame] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "frames", frozenset(self.frames))
        for f in self.frames:
            check_frame(self.language, f)

    def __len__(self):
        return len(self.frames)

    def to_text(self) -> str:
        return "".join(f"frame {f};\n" for f in sorted_frames(self.frames))


def check_frame(language: NetworkLanguage, frame: Frame) -> None:
    if frame.relation not in language.relations:
        raise UndeclaredSymbol(f"relation {frame.relation!r} is not declared")
    for c in (frame.subject, frame.object):
        if not language.declares_constant(c):
            raise UndeclaredSymbol(f"constant {format_value(c)} is not declared")


def add_frame(net: SemanticNetwork, relation: str, *args) -> SemanticNetwork:
    if len(args) != 2:
        raise ArityViolation(f"{relation} takes 2 arguments, got {len(args)}")
    frame = Frame(relation, *args)
    check_frame(net.language, frame)
    if frame in net.frames:
        return net
    return SemanticNetwork(net.language, net.frames | {frame})


def holds(net: SemanticNetwork, frame: Frame) -> bool:
    check_frame(net.language, frame)
    return frame in net.frames


def candidate_frames(language: NetworkLanguage) -> list[Frame]:
    """Every well-formed frame over the language's enumerable constants."""
    consts = sorted(language.constants, key=sort_key)
    return [Frame(r, a, b) for r in sorted(language.relations) for a in consts for b in consts]


def situation_from_transition(before: DataObject, after: DataObject,
                              context: Iterable[Frame] = (),
                              attribute: str = "position",
                              language: NetworkLanguage | None = None) -> SemanticNetwork:
    """Encode an attribute change as ``had_<attr>``/``has_<attr>`` frames plus context.

    When ``language`` is given every symbol must already be declared in it;
    otherwise a minimal language covering the frames is built.
    """
    if before.individual.id != after.individual.id:
        raise IndividualMismatch(
            f"{before.individual.id} and {after.individual.id} are different individuals")
    who = Const(before.individual.id)
    frames = {
        Frame(f"had_{attribute}", who, before.valuation[attribute]),
        Frame(f"has_{attribute}", who, after.valuation[attribute]),
        *context,
    }
    if language is None:
        language = NetworkLanguage(
            {f.relation for f in frames},
            {c for f in frames for c in (f.subject, f.object)},
        )
    return SemanticNetwork(language, frozenset(frames))
