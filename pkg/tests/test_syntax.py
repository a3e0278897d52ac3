import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import terms
from schemakern import library as L
from schemakern.calculus import seq
from schemakern.sexpr import read_all
from schemakern.syntax import ParseFailure, parse, parse_strict, print_document, read_sequent
from schemakern.terms import Atom, numeral, render

FIXTURE_NAMES = sorted(L.documents())


def test_sequent_form():
    s = read_sequent(read_all("(seq (ant (P 0)) (suc (P 0)))")[0])
    p0 = Atom("P", (numeral(0),))
    assert s == seq([p0], [p0])


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_fixture_roundtrip_is_byte_identical(name):
    text = L.fixture_text(name)
    assert print_document(parse_strict(text)) == text


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_fixture_files_match_builders(name):
    assert L.render_fixture(name) == L.fixture_text(name)


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_parse_print_parse_is_structural_identity(name):
    doc = parse_strict(L.fixture_text(name))
    assert parse_strict(print_document(doc)) == doc


def test_zero_commute_fixture_has_two_proofs_and_no_diagnostics():
    doc, diags = parse(L.fixture_text("zero_comm"))
    assert diags == []
    assert len(doc.components) == 2


def test_whitespace_is_canonicalized():
    text = L.fixture_text("assoc")
    messy = text.replace("\n  ", "\n\t  ").replace(" (", "   (")
    doc = parse_strict(messy)
    assert print_document(doc) == text


def test_unbalanced_parenthesis_has_a_span():
    _, diags = parse("(proof a (rule ax (seq (ant (P 0)) (suc (P 0))))")
    assert [d.code for d in diags] == ["Syntax"]
    assert diags[0].span[:2] == (1, 1)


def test_duplicate_names():
    line = "(proof a (rule ax (seq (ant (P 0)) (suc (P 0)))))"
    _, diags = parse(line + "\n" + line)
    assert [d.code for d in diags] == ["Duplicate"]
    assert diags[0].span[0] == 2


def test_unknown_rule_points_at_the_name():
    text = "(proof a (rule zz (seq (ant) (suc))))"
    _, diags = parse(text)
    line, col, _, end = diags[0].span
    assert text[col - 1:end - 1] == "zz"


def test_parse_strict_raises():
    with pytest.raises(ParseFailure):
        parse_strict("(frob)")


@given(terms(), st.integers(0, 40))
def test_numeral_sugar(t, k):
    text = render(numeral(k))
    assert text == (str(k) if k <= 20 else "(s " * k + "0" + ")" * k)
    doc = parse_strict(f"(axiom t (seq (ant) (suc (= {text} {render(t)}))))")
    assert print_document(doc) == f"(axiom t (seq (ant) (suc (= {text} {render(t)}))))\n"


def test_diagnostic_text_format():
    _, diags = parse("(frob)")
    assert diags[0].text("x.psk").startswith("x.psk:1:1: error: Syntax:")
