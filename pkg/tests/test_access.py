from __future__ import annotations

import random

import pytest

from generators import random_tree, subtree_oracle
from triadkit.access import (
    METADATA_FORBIDDEN, OUT_OF_SCOPE, READ_ONLY, READ_WRITE, SESSION_CLOSED, AccessPolicy,
    OrgPosition, Target, authorize, close_session,
)
from triadkit.errors import AlreadyClosed, UnknownRole, UnknownUnit
from triadkit.org import OrgStructure
from triadkit.schema import OrgUnitDecl


@pytest.fixture
def policy(hr_schema):
    return AccessPolicy.from_schema(hr_schema)


def _open(policy, hr_schema, user):
    return policy.open_session(OrgPosition.from_decl(hr_schema.users[user]))


def test_president_sees_everything(policy, hr_schema):
    session, profile = _open(policy, hr_schema, "boss")
    assert profile.scope == frozenset(hr_schema.units)
    assert profile.metadata == READ_WRITE  # boss is also an admin
    plain, prof2 = policy.open_session(OrgPosition("p", "corporation", "president"))
    assert prof2.metadata == READ_ONLY
    assert authorize(plain, Target("metadata"), "read").allowed


def test_department_employee_scope(policy, hr_schema):
    session, profile = _open(policy, hr_schema, "bob")
    assert profile.scope == {"programming"}
    assert profile.write_scope == {"programming"}
    assert profile.required == {"name"}
    assert authorize(session, Target("data", "programming"), "read").allowed
    d = authorize(session, Target("data", "recruiting"), "read")
    assert (d.allowed, d.reason, str(d)) == (False, OUT_OF_SCOPE, "deny(OutOfScope)")
    d = authorize(session, Target("metadata", "programming"), "write")
    assert (d.reason, str(d)) == (METADATA_FORBIDDEN, "deny(MetadataForbidden)")


def test_grants_extend_read_scope_only(policy, hr_schema):
    session, profile = _open(policy, hr_schema, "carol")
    assert profile.read_scope == {"recruiting", "information_systems"}
    assert authorize(session, Target("data", "information_systems"), "read").allowed
    assert not authorize(session, Target("data", "information_systems"), "write").allowed


def test_admin_gets_metadata_write(policy):
    session, profile = policy.open_session(
        OrgPosition("root", "programming", "department_employee", admin=True))
    assert profile.metadata == READ_WRITE
    assert authorize(session, Target("metadata", "programming"), "write").allowed


def test_close_semantics(policy, hr_schema):
    s1, _ = _open(policy, hr_schema, "bob")
    s2, _ = _open(policy, hr_schema, "alice")
    assert (s1.id, s2.id) == ("s1", "s2")
    policy.close_session(s1)
    d = authorize(s1, Target("data", "programming"), "read")
    assert (d.allowed, d.reason) == (False, SESSION_CLOSED)
    assert authorize(s2, Target("data", "programming"), "read").allowed
    with pytest.raises(AlreadyClosed):
        close_session(s1)
    with pytest.raises(AlreadyClosed):
        policy.close_session("s1")


def test_open_errors(policy):
    with pytest.raises(UnknownUnit):
        policy.open_session(OrgPosition("x", "mars", "president"))
    with pytest.raises(UnknownRole):
        policy.open_session(OrgPosition("x", "programming", "janitor"))
    with pytest.raises(ValueError):
        Target("database")


def test_profile_is_a_snapshot(hr_schema):
    policy = AccessPolicy.from_schema(hr_schema)
    session, _ = policy.open_session(OrgPosition("a", "it_company", "company_head"))
    units = dict(hr_schema.units)
    units["new_lab"] = OrgUnitDecl("new_lab", "it_company")
    later = AccessPolicy.from_schema(hr_schema.replace(units=units))
    assert "new_lab" not in session.profile.scope
    assert not authorize(session, Target("data", "new_lab"), "read").allowed
    fresh, _ = later.open_session(OrgPosition("a", "it_company", "company_head"))
    assert "new_lab" in fresh.profile.scope


def test_scope_containment_on_random_hierarchies():
    rng = random.Random(100)
    for _ in range(10):
        parent = random_tree(rng, 100)
        policy = AccessPolicy(OrgStructure(parent))
        profiles = {u: policy.open_session(OrgPosition(u, u, "department_employee"))[1]
                    for u in parent}
        for manager, prof in profiles.items():
            assert prof.scope == subtree_oracle(parent, manager)
            for sub in prof.scope:
                assert profiles[sub].scope <= prof.scope


def test_decisions_are_pure(policy, hr_schema):
    session, _ = _open(policy, hr_schema, "alice")
    target = Target("data", "programming")
    first = [authorize(session, target, op) for op in ("read", "write")]
    _open(policy, hr_schema, "bob")  # other sessions do not matter
    assert [authorize(session, target, op) for op in ("read", "write")] == first
