import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import PARAMS, X, Y, F, T, terms
from schemakern.terms import (
    App,
    Atom,
    CaptureError,
    Exists,
    ForAll,
    Kind,
    NotANumeral,
    Param,
    alpha_eq,
    canonical,
    eq,
    free_symbols,
    is_numeral,
    numeral,
    parameters_of,
    render,
    replace_at,
    subterm_at,
    substitute,
    value_of,
)

alpha = Param("alpha", Kind.PASSIVE)
n = Param("n", Kind.ACTIVE)


@given(st.integers(0, 60))
def test_numeral_value_roundtrip(k):
    assert value_of(numeral(k)) == k
    assert is_numeral(numeral(k))


def test_value_of_rejects_open_terms():
    with pytest.raises(NotANumeral):
        value_of(App("s", (alpha,)))
    with pytest.raises(ValueError):
        numeral(-1)


def test_render_uses_decimal_sugar_up_to_twenty():
    assert render(numeral(20)) == "20"
    assert render(numeral(21)).startswith("(s (s ")
    assert render(App("^a", (alpha, numeral(2)))) == "(^a p:alpha 2)"


@given(terms())
def test_read_render_roundtrip(t):
    assert T(render(t)) == t


def test_parameter_prefixes():
    assert T("n:n") == n
    assert T("p:alpha") == alpha
    assert T("i:k").kind is Kind.INTERNAL
    assert parameters_of(T("(^a n:n (s p:alpha))"), Kind.ACTIVE) == {n}
    assert parameters_of(T("(^a n:n (s p:alpha))")) == {n, alpha}


def test_substitution_is_simultaneous():
    beta = Param("beta", Kind.PASSIVE)
    t = substitute(T("(^a p:alpha p:beta)"), {alpha: beta, beta: alpha})
    assert t == T("(^a p:beta p:alpha)")


def test_substitution_refuses_capture():
    f = ForAll(X, eq(X, Y))
    with pytest.raises(CaptureError):
        substitute(f, {Y: X})


def test_bound_variables_are_not_substituted():
    f = ForAll(X, eq(X, Y))
    assert substitute(f, {X: numeral(1)}) == f
    assert free_symbols(f) == {Y}


def test_alpha_equivalence():
    assert alpha_eq(Exists(X, Atom("P", (X,))), Exists(Y, Atom("P", (Y,))))
    assert not alpha_eq(Exists(X, Atom("P", (X, Y))), Exists(Y, Atom("P", (Y, Y))))
    assert canonical(ForAll(X, eq(X, X))) == canonical(ForAll(Y, eq(Y, Y)))


@given(terms(), st.sampled_from(PARAMS))
def test_substitution_removes_the_parameter(t, p):
    out = substitute(t, {p: numeral(3)})
    assert p not in parameters_of(out)


@given(terms())
def test_replace_at_inverts_subterm_at(t):
    path = ()
    cur = t
    while isinstance(cur, App) and cur.args:
        path += (len(cur.args) - 1,)
        cur = cur.args[-1]
    assert subterm_at(t, path) == cur
    assert replace_at(t, path, cur) == t


def test_formula_reader():
    f = F("(forall v:x (imp (P v:x) (exists v:y (= v:x v:y))))")
    assert isinstance(f, ForAll)
    assert render(f) == "(forall v:x (imp (P v:x) (exists v:y (= v:x v:y))))"
