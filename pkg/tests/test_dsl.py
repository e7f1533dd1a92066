from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import random_document
from triadkit.dsl import SourceDocument, load, loads, parse_document, print_canonical
from triadkit.errors import ParseError
from triadkit.semnet import Frame

PROMOTION = """\
sort Position = {General_Director, Department_Director};
concept Employee { name: text, position: Position };
relation had_position/2;
relation has_position/2;
relation manages_count_over/2;
individual e1 : Employee key {name = "Ivanov"} values {name = "Ivanov", position = General_Director};
frame had_position(e1, General_Director);
frame has_position(e1, Department_Director);
frame manages_count_over(e1, 50);
"""


def test_promotion_situation_parses_to_three_frames():
    schema = loads(PROMOTION)
    net = schema.network()
    assert net.frames == {
        Frame("had_position", "e1", "General_Director"),
        Frame("has_position", "e1", "Department_Director"),
        Frame("manages_count_over", "e1", 50),
    }


def test_empty_document():
    result = parse_document("")
    assert result.ok
    assert result.diagnostics == []
    assert print_canonical(result.schema) == ""


def test_missing_sort_is_one_positioned_error():
    result = parse_document("concept Employee { name: ; }")
    assert not result.ok
    assert result.schema is None
    assert len(result.diagnostics) == 1
    d = result.diagnostics[0]
    assert (d.line, d.column, d.severity) == (1, 26, "error")


def test_recovery_reports_every_broken_statement():
    text = "concept A { x: ; };\nconcept B { y: text };\nsort S = {a,};\nrelation r/3;\n"
    result = parse_document(text)
    assert result.schema is None
    assert [d.line for d in result.diagnostics] == [1, 3, 4]


def test_unresolved_symbol_is_a_diagnostic():
    result = parse_document("concept A { x: Missing };")
    assert not result.ok
    assert "Missing" in result.diagnostics[0].message


def test_comments_and_origin():
    result = parse_document(SourceDocument("# nothing\nsort S = {a};\nsort S = {b};\n", "x.tdk"))
    assert not result.ok
    assert result.diagnostics[0].origin == "x.tdk"
    assert result.diagnostics[0].line == 3


def test_canonical_text_ignores_declaration_order():
    lines = PROMOTION.strip().splitlines()
    shuffled = lines[:]
    random.Random(1).shuffle(shuffled)
    assert print_canonical(loads("\n".join(shuffled))) == print_canonical(loads(PROMOTION))


def test_canonical_text_is_a_fixed_point(samples):
    for path in sorted(samples.glob("*.tdk")):
        schema = load(path, resolve=False)
        text = print_canonical(schema)
        assert text.endswith("\n") and "\r" not in text
        again = loads(text, resolve=False)
        assert again == schema
        assert print_canonical(again) == text


def test_multibyte_text_passes_through():
    schema = loads('concept P { name: text };\nindividual a : P values {name = "Иванов"};\n')
    text = print_canonical(schema)
    assert "Иванов" in text
    assert loads(text) == schema


def test_load_raises_parse_error_with_diagnostics():
    with pytest.raises(ParseError):
        loads("sort ;")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_generated_documents_round_trip(seed):
    doc = random_document(random.Random(seed))
    first = parse_document(doc)
    assert first.ok
    text = print_canonical(first.schema)
    assert parse_document(text).schema == first.schema


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="sortcnep{}();:=,|#xyz_1 \n\"", max_size=80))
def test_arbitrary_text_never_crashes_and_positions_are_in_bounds(text):
    result = parse_document(text)
    assert result.ok == (result.schema is not None)
    lines = text.split("\n")
    for d in result.diagnostics:
        assert 1 <= d.line <= len(lines)
        assert 1 <= d.column <= len(lines[d.line - 1]) + 1
    # deterministic
    again = parse_document(text)
    assert again.diagnostics == result.diagnostics
    assert again.schema == result.schema
