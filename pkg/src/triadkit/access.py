"""Session-scoped access profiles derived from org positions.

A profile is a snapshot taken when the session opens: later changes to the
hierarchy do not reach sessions that are already open.  Decisions are pure
functions of the profile, the target and the operation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping

from .errors import AlreadyClosed, UnknownRole, UnknownUnit
from .org import OrgStructure
from .schema import RoleDecl, Schema, UserDecl

READ, WRITE = "read", "write"
OPEN, CLOSED = "open", "closed"

SESSION_CLOSED = "SessionClosed"
OUT_OF_SCOPE = "OutOfScope"
METADATA_FORBIDDEN = "MetadataForbidden"

NO_RIGHTS, READ_ONLY, READ_WRITE = "none", "read", "read-write"

DEFAULT_ROLES: dict[str, RoleDecl] = {
    "president": RoleDecl("president", "read", "subtree"),
    "department_employee": RoleDecl("department_employee", "read", "unit"),
}


@dataclass(frozen=True)
class OrgPosition:
    user: str
    unit: str
    role: str
    admin: bool = False
    grants: tuple[str, ...] = ()

    @classmethod
    def from_decl(cls, decl: UserDecl) -> OrgPosition:
        return cls(decl.name, decl.unit, decl.role, decl.admin, decl.grants)


@dataclass(frozen=True)
class AccessProfile:
    session: str
    read_scope: frozenset[str]
    write_scope: frozenset[str]
    metadata: str
    required: frozenset[str] = frozenset()

    @property
    def scope(self) -> frozenset[str]:
        return self.read_scope


@dataclass
class Session:
    id: str
    position: OrgPosition
    profile: AccessProfile
    state: str = OPEN

    @property
    def is_open(self) -> bool:
        return self.state == OPEN


@dataclass(frozen=True)
class Target:
    """What is accessed: ``data`` or ``metadata``, at an org unit.

    A unit of None means the access is not tied to a unit (for instance a
    listing that is filtered per item afterwards); only the session state
    and the metadata rights are checked then.
    """

    kind: str
    unit: str | None = None

    def __post_init__(self):
        if self.kind not in ("data", "metadata"):
            raise ValueError(f"target kind must be data or metadata, not {self.kind!r}")


@dataclass(frozen=True)
class Decision:
    allowed: bool
    reason: str | None = None

    def __bool__(self):
        return self.allowed

    def __str__(self):
        return "allow" if self.allowed else f"deny({self.reason})"


ALLOW = Decision(True)


def authorize(session: Session, target: Target, op: str) -> Decision:
    if op not in (READ, WRITE):
        raise ValueError(f"operation must be read or write, not {op!r}")
    if not session.is_open:
        return Decision(False, SESSION_CLOSED)
    prof = session.profile
    if target.kind == "metadata":
        if prof.metadata == NO_RIGHTS or (op == WRITE and prof.metadata != READ_WRITE):
            return Decision(False, METADATA_FORBIDDEN)
    if target.unit is not None:
        scope = prof.read_scope if op == READ else prof.write_scope
        if target.unit not in scope:
            return Decision(False, OUT_OF_SCOPE)
    return ALLOW


def close_session(session: Session) -> Session:
    if not session.is_open:
        raise AlreadyClosed(f"session {session.id} is already closed")
    session.state = CLOSED
    return session


@dataclass
class AccessPolicy:
    """Session registry over an org structure and a set of roles."""

    org: OrgStructure
    roles: Mapping[str, RoleDecl] = field(default_factory=lambda: dict(DEFAULT_ROLES))
    sessions: dict[str, Session] = field(default_factory=dict)
    _ids: itertools.count = field(default_factory=lambda: itertools.count(1), repr=False)

    @classmethod
    def from_schema(cls, schema: Schema) -> AccessPolicy:
        roles = dict(DEFAULT_ROLES)
        roles.update(schema.roles)
        return cls(OrgStructure.from_schema(schema), roles)

    def profile_for(self, position: OrgPosition, session_id: str) -> AccessProfile:
        if position.unit not in self.org.parent:
            raise UnknownUnit(f"unknown unit {position.unit!r}")
        role = self.roles.get(position.role)
        if role is None:
            raise UnknownRole(f"unknown role {position.role!r}")
        read = set(self.org.subtree(position.unit))
        for g in position.grants:
            if g not in self.org.parent:
                raise UnknownUnit(f"unknown granted unit {g!r}")
            read |= self.org.subtree(g)
        if role.writes == "subtree":
            write = self.org.subtree(position.unit)
        else:
            write = frozenset([position.unit])
        if position.admin:
            metadata = READ_WRITE
        else:
            metadata = NO_RIGHTS if role.metadata == "none" else READ_ONLY
        return AccessProfile(session_id, frozenset(read), frozenset(write), metadata,
                             frozenset(role.requires))

    def open_session(self, position: OrgPosition) -> tuple[Session, AccessProfile]:
        sid = f"s{next(self._ids)}"
        profile = self.profile_for(position, sid)
        session = Session(sid, position, profile)
        self.sessions[sid] = session
        return session, profile

    def close_session(self, session: Session | str) -> Session:
        if isinstance(session, str):
            session = self.sessions[session]
        return close_session(session)


def open_session(policy: AccessPolicy, position: OrgPosition) -> tuple[Session, AccessProfile]:
    return policy.open_session(position)
