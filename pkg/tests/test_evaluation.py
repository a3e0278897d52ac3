from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from schemakern import library as L
from schemakern.calculus import seq
from schemakern.evaluation import (
    EmptySchema,
    EvaluationError,
    StuckLink,
    instance,
    link_rules,
    unfold,
    verify_unfolded,
)
from schemakern.rewrite import E_PA, FuelExhausted, normalize
from schemakern.schema import PSchema
from schemakern.terms import App, eq, numeral

ALPHA, BETA, GAMMA = L.alpha, L.beta, L.gamma
small = st.integers(0, 4)


def sound(psi, sigma):
    rep = unfold(psi, sigma)
    ver = verify_unfolded(rep, psi)
    assert ver.valid, ver.violations
    assert not any(nd.rule == "link" for _, nd in rep.proof.nodes())
    return rep


@given(small)
def test_zero_commute(a):
    rep = sound(L.zero_comm(), {ALPHA: numeral(a)})
    assert rep.instance == seq((), [eq(L.a(numeral(a), numeral(0)), L.a(numeral(0), numeral(a)))])


@given(small, small, small)
def test_associativity(a, b, c):
    sound(L.assoc(), {ALPHA: numeral(a), BETA: numeral(b), GAMMA: numeral(c)})


@given(small, small)
def test_commutativity(a, b):
    sound(L.comm(), {ALPHA: numeral(a), BETA: numeral(b)})


def test_unfolded_end_sequent_normalizes_to_the_instance():
    rep = sound(L.assoc(), {ALPHA: numeral(1), BETA: numeral(0), GAMMA: numeral(0)})
    got = [normalize(f, E_PA) for f in rep.proof.conclusion.suc]
    want = [normalize(f, E_PA) for f in instance(L.assoc(), rep.sigma).suc]
    assert got == want


def test_link_rules_read_components_as_equations():
    rules = [str(r.lhs) for r in link_rules(L.assoc())]
    assert rules == ["(chi 0)", "(chi p:alpha)", "(phi 0 i:k)", "(phi (s n:n) i:k)"]


def test_memoization_counts_each_call_once():
    rep = unfold(L.comm(), {ALPHA: numeral(3), BETA: numeral(3)})
    assert rep.steps == 24
    assert rep.size == 201


def test_fuel_is_counted_in_link_expansions():
    with pytest.raises(FuelExhausted):
        unfold(L.comm(), {ALPHA: numeral(3), BETA: numeral(3)}, fuel=3)


@pytest.mark.parametrize("seed", [0, 1, 2, 99])
def test_resolution_order_does_not_matter(seed):
    sigma = {ALPHA: numeral(2), BETA: numeral(3)}
    assert unfold(L.comm(), sigma, seed=seed).proof == unfold(L.comm(), sigma).proof


def test_missing_and_non_ground_substitutions():
    with pytest.raises(EvaluationError) as e:
        unfold(L.comm(), {ALPHA: numeral(1)})
    assert e.value.code == "MissingSubstitution"
    with pytest.raises(EvaluationError) as e:
        unfold(L.comm(), {ALPHA: numeral(1), BETA: L.gamma})
    assert e.value.code == "NotGround"


def test_substitutions_may_be_closed_arithmetic_terms():
    rep = sound(L.zero_comm(), {ALPHA: App("^a", (numeral(1), numeral(2)))})
    assert rep.sigma == {ALPHA: numeral(3)}


def test_computational_sub_schema_becomes_an_axiom():
    rep = unfold(L.lemma(), {})
    assert rep.computational == (("lem",),)
    assert len(rep.theory_axioms) == 1
    assert verify_unfolded(rep, L.lemma()).valid


def test_forcing_expansion_of_an_eigenvariable_link_is_stuck():
    with pytest.raises(StuckLink):
        unfold(L.lemma(), {}, expand_computational=True)


def test_invalid_schema_is_refused():
    psi = L.zero_comm()
    bad = replace(psi, components=(psi.components[0],))
    with pytest.raises(EvaluationError) as e:
        unfold(bad, {ALPHA: numeral(1)})
    assert e.value.code == "InvalidSchema"
    with pytest.raises(EmptySchema):
        unfold(PSchema(()), {})


def test_verification_detects_a_wrong_instance():
    rep = unfold(L.zero_comm(), {ALPHA: numeral(2)})
    rep.instance = seq((), [eq(numeral(0), numeral(1))])
    ver = verify_unfolded(rep, L.zero_comm())
    assert not ver.valid
    assert "EndSequentMismatch" in {v.code for v in ver.violations}


@pytest.mark.parametrize("name", ["iterate", "padded"])
def test_existential_fixtures_unfold(name):
    psi = L.SCHEMATA[name]()
    for a in range(4):
        sound(psi, {ALPHA: numeral(a)})
