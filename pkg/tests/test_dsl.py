from __future__ import annotations

import random

from portalis.dsl import (
    ast_equal,
    load,
    load_text,
    parse,
    parse_bytes,
    print_schema,
)
from portalis.dsl.ast import ConceptDecl
from portalis.predicate import Kind
from support import random_utf8_text


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def test_empty_file_is_empty_schema():
    result = parse("")
    assert result.ok
    assert result.ast.declarations == ()
    assert print_schema(result.ast) == ""


def test_comment_only_file_is_empty_schema():
    result = parse("# nothing here\n   # still nothing\n")
    assert result.ok
    assert result.ast.declarations == ()


def test_concept_declaration_shape():
    result = parse("concept Visitor (status: text)")
    assert result.ok
    (decl,) = result.ast.declarations
    assert isinstance(decl, ConceptDecl)
    assert decl.name == "Visitor"
    assert decl.fields == (("status", Kind.TEXT),)


def test_dangling_group_points_at_opener():
    result = parse("concept Visitor (status:")
    assert not result.ok
    errors = [d for d in result.diagnostics if d.severity == "error"]
    assert len(errors) == 1
    # the '(' sits at 1-based column 17 of the line
    assert (errors[0].line, errors[0].col) == (1, 17)
    assert "never closed" in errors[0].message


def test_error_positions_inside_text():
    text = "concept A (x: text)\nconcept B (y: oops)\n"
    result = parse(text)
    assert not result.ok
    diagnostic = result.diagnostics[0]
    assert diagnostic.line == 2
    lines = text.splitlines()
    assert 1 <= diagnostic.col <= len(lines[diagnostic.line - 1]) + 1


def test_failed_parse_never_returns_ast():
    result = parse("concept ( broken")
    assert result.ast is None
    assert any(d.severity == "error" for d in result.diagnostics)


def test_diagnostic_format():
    result = parse("concept Visitor (status:")
    line = result.diagnostics[0].format("demo.pds")
    assert line.startswith("demo.pds:1:")
    assert ": error: " in line


def test_multiple_errors_reported_with_recovery():
    text = "concept A (x: junk)\nrelation ok\nconcept B (y: junk)\n"
    result = parse(text)
    errors = [d for d in result.diagnostics if d.severity == "error"]
    assert len(errors) == 2


def test_non_utf8_bytes_single_encoding_error():
    result = parse_bytes(b"concept A (x: text)\xff\xfe")
    assert not result.ok
    assert len(result.diagnostics) == 1
    assert "EncodingError" in result.diagnostics[0].message


# ---------------------------------------------------------------------------
# printing / round trips
# ---------------------------------------------------------------------------

def test_round_trip_over_corpus(schemas_dir):
    files = sorted(schemas_dir.glob("*.pds"))
    assert len(files) >= 20
    for path in files:
        first = parse(path.read_text(encoding="utf-8"))
        assert first.ok, path.name
        printed = print_schema(first.ast)
        second = parse(printed)
        assert second.ok, path.name
        assert ast_equal(first.ast, second.ast), path.name
        # canonical text is a fixed point
        assert print_schema(second.ast) == printed, path.name


def test_spans_do_not_affect_printing():
    text = "concept A (x: text)"
    shifted = "\n\n   # pushed down\n" + text
    first = parse(text)
    second = parse(shifted)
    assert first.ast.declarations[0].span != second.ast.declarations[0].span
    assert print_schema(first.ast) == print_schema(second.ast)
    assert ast_equal(first.ast, second.ast)


def test_parse_totality_fuzz_sample():
    rng = random.Random(0xFA)
    for _ in range(1500):
        result = parse(random_utf8_text(rng))
        assert result.ast is not None or any(
            d.severity == "error" for d in result.diagnostics)


# ---------------------------------------------------------------------------
# loading
# ---------------------------------------------------------------------------

def test_demo_load_counts(demo_path):
    result = load_text(demo_path.read_text(encoding="utf-8"))
    assert result.ok
    summary = result.engine.summary()
    assert summary["sources"] == 4
    assert summary["personas"] == 3
    assert summary["metrics"] == ["l", "n", "q", "r", "z"]


def test_undeclared_concept_is_single_error_and_no_engine(demo_engine):
    before = demo_engine.hashes()
    result = load_text("individual x : Ghost { a = 1 }")
    assert not result.ok
    assert len(result.diagnostics) == 1
    assert "undeclared concept" in result.diagnostics[0].message
    # a failed load leaves any existing engine untouched
    assert demo_engine.hashes() == before


def test_metric_missing_prefix_names_chain():
    text = """
metric z order (s, p) {
  [] -> { base },
  [s = higraph, p = registered] -> { leaf }
}
"""
    result = load_text(text)
    assert not result.ok
    message = result.diagnostics[0].message
    assert "missing prefix" in message
    assert "higraph" in message


def test_load_is_all_or_nothing():
    text = """
concept Good (x: integer)
individual ok : Good { x = 1 }
individual bad : Missing { y = 2 }
"""
    result = load_text(text)
    assert result.engine is None
    assert len(result.diagnostics) == 1


def test_semantic_checks_catch_kind_mismatch():
    result = load_text(
        "concept C (x: integer)\nindividual i : C { x = \"nope\" }")
    assert not result.ok
    assert "integer" in result.diagnostics[0].message


def test_semantic_checks_catch_partial_state():
    result = load_text("concept C (x: integer, y: text)\n"
                       "individual i : C { x = 1 }")
    assert not result.ok
    assert "misses fields" in result.diagnostics[0].message


def test_client_script_transition_rejected():
    text = """
concept C (x: integer)
individual i : C { x = 0 }
script bump on bump-now {
  transition i { x = 1 }
}
"""
    result = load_text(text)
    assert not result.ok
    assert "warehouse-update hooks" in result.diagnostics[0].message


def test_hook_script_set_rejected():
    text = """
concept C (x: integer)
individual i : C { x = 0 }
page board requires ordinary { item v = field i.x }
script paint on repaint hook {
  set board.panel.note = "hi"
}
"""
    result = load_text(text)
    assert not result.ok
    assert "hooks have none" in result.diagnostics[0].message


def test_duplicate_source_kind_rejected():
    text = """
source a kind docs { item d1 { name = "x", email = "y", department = "z" } }
source b kind docs { item d2 { name = "x", email = "y", department = "z" } }
"""
    result = load_text(text)
    assert not result.ok
    assert "one adapter" in result.diagnostics[0].message


def test_profile_alphabet_enforced():
    result = load_text(
        'profile p1 { rank = ordinary, s = plaintext, p = registered }')
    assert not result.ok
    assert "alphabet" in result.diagnostics[0].message


def test_page_forward_reference_to_script_targets():
    # scripts may set state on pages declared later in the file
    text = """
script note on noted {
  set board.panel.note = "hi"
}
page board requires ordinary { item motto = "x" }
"""
    result = load_text(text)
    assert result.ok


def test_unknown_portal_key_rejected():
    result = load_text('page p requires ordinary { item v = portal bogus }')
    assert not result.ok
    assert "portal item key" in result.diagnostics[0].message
