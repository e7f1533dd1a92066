from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triadkit.errors import ArityViolation, IndividualMismatch, UndeclaredSymbol
from triadkit.model import Concept, Individual, Sort, make_data_object, transition_state
from triadkit.semnet import (
    Frame, NetworkLanguage, SemanticNetwork, add_frame, candidate_frames, holds,
    situation_from_transition,
)
from triadkit.values import Const

LANG = NetworkLanguage(
    {"had_position", "has_position", "manages_count_over"},
    {"e1", "General_Director", "Department_Director"},
)


def test_add_frame_and_holds():
    net = add_frame(SemanticNetwork(LANG), "has_position", "e1", "Department_Director")
    assert len(net) == 1
    assert holds(net, Frame("has_position", "e1", "Department_Director"))
    assert not holds(net, Frame("had_position", "e1", "Department_Director"))


def test_add_frame_twice_is_unchanged():
    net = add_frame(SemanticNetwork(LANG), "has_position", "e1", "Department_Director")
    assert add_frame(net, "has_position", "e1", "Department_Director") == net


def test_undeclared_symbols_and_arity():
    net = SemanticNetwork(LANG)
    with pytest.raises(UndeclaredSymbol):
        add_frame(net, "has_position", "e1", "UndeclaredDept")
    with pytest.raises(UndeclaredSymbol):
        add_frame(net, "manages", "e1", "General_Director")
    with pytest.raises(ArityViolation):
        add_frame(net, "has_position", "e1")
    with pytest.raises(UndeclaredSymbol):
        holds(net, Frame("nope", "e1", "e1"))


def test_integer_thresholds_are_self_declaring():
    net = add_frame(SemanticNetwork(LANG), "manages_count_over", "e1", 50)
    assert holds(net, Frame("manages_count_over", "e1", 50))
    assert not holds(net, Frame("manages_count_over", "e1", 51))


def test_namespaces_are_disjoint():
    with pytest.raises(ValueError):
        NetworkLanguage({"r"}, {"r"})


def test_empty_network_holds_nothing():
    net = SemanticNetwork(LANG)
    assert not any(holds(net, f) for f in candidate_frames(LANG))


def test_random_network_matches_membership_oracle():
    rng = random.Random(3)
    for _ in range(20):
        lang = NetworkLanguage({f"r{i}" for i in range(rng.randint(1, 4))},
                               {f"c{i}" for i in range(rng.randint(1, 8))})
        frames = candidate_frames(lang)
        chosen = set(rng.sample(frames, min(5, len(frames))))
        net = SemanticNetwork(lang)
        for f in chosen:
            net = add_frame(net, f.relation, f.subject, f.object)
        # every frame over |R| x |C|^2
        universe = [Frame(r, a, b) for r in lang.relations
                    for a, b in itertools.product(lang.constants, repeat=2)]
        assert len(universe) == len(frames)
        for f in universe:
            assert holds(net, f) == (f in chosen)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["r0", "r1"]), st.sampled_from("abc"),
                          st.sampled_from("abc")), max_size=8))
def test_add_frame_idempotent_and_commutative(triples):
    lang = NetworkLanguage({"r0", "r1"}, set("abc"))
    forward = SemanticNetwork(lang)
    for t in triples:
        forward = add_frame(forward, *t)
    backward = SemanticNetwork(lang)
    for t in reversed(triples + triples):
        backward = add_frame(backward, *t)
    assert forward.frames == backward.frames


POSITION = Sort("Position", frozenset({Const("General_Director"), Const("Department_Director")}))
EMPLOYEE = Concept("Employee", (("position", POSITION),))


def _obj(ind="e1", pos="General_Director"):
    return make_data_object(EMPLOYEE, Individual(ind, "Employee"), {"position": Const(pos)})


def test_situation_from_transition():
    before = _obj()
    after = transition_state(before, {"position": Const("Department_Director")})
    net = situation_from_transition(before, after, [Frame("manages_count_over", "e1", 50)],
                                    language=LANG)
    assert net.frames == {
        Frame("had_position", "e1", "General_Director"),
        Frame("has_position", "e1", "Department_Director"),
        Frame("manages_count_over", "e1", 50),
    }


def test_situation_with_unchanged_valuation_keeps_both_frames():
    before = _obj()
    after = transition_state(before, before.valuation)
    net = situation_from_transition(before, after)
    assert net.frames == {Frame("had_position", "e1", "General_Director"),
                          Frame("has_position", "e1", "General_Director")}


def test_situation_needs_one_individual():
    with pytest.raises(IndividualMismatch):
        situation_from_transition(_obj("e1"), _obj("e2"))


def test_network_text_form():
    net = add_frame(SemanticNetwork(LANG), "manages_count_over", "e1", 50)
    assert net.to_text() == "frame manages_count_over(e1, 50);\n"
