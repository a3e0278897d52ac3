from dataclasses import replace

import pytest

from schemakern import build as B
from schemakern import library as L
from schemakern.calculus import seq
from schemakern.schema import (
    PSchema,
    ShiftError,
    closure,
    cross_links,
    find_cycle,
    is_strict,
    sub_schemata,
    unshift,
    validate_schema,
)
from schemakern.terms import App, eq, numeral

n = L.n


def codes(psi):
    return set(validate_schema(psi).codes)


def swap(psi: PSchema, symbol: str, **kw) -> PSchema:
    comps = tuple(replace(c, **kw) if c.symbol == symbol else c for c in psi.components)
    return replace(psi, components=comps)


@pytest.mark.parametrize("name", sorted(L.SCHEMATA))
def test_bundled_schemata_validate(name):
    rep = validate_schema(L.SCHEMATA[name]())
    assert rep.valid, rep.violations


@pytest.mark.parametrize("name,strict", [("zero_comm", True), ("assoc", True), ("comm", True),
                                         ("iterate", True), ("padded", True), ("lemma", False)])
def test_strictness(name, strict):
    psi = L.SCHEMATA[name]()
    assert is_strict(psi) is strict
    assert validate_schema(psi).strict is strict


def test_summary_lines():
    assert validate_schema(L.assoc()).summary() == "valid, complete P-schema, 2 components"
    assert validate_schema(L.comm()).summary() == "valid, complete P-schema, 5 components"
    assert validate_schema(L.lemma()).summary() == "valid, general P-schema, 2 components"


def test_unshift():
    assert unshift(App("^a", (App("s", (n,)), numeral(0))), n) == App("^a", (n, numeral(0)))
    with pytest.raises(ShiftError):
        unshift(App("^a", (n, n)), n)


def test_empty_schema():
    rep = validate_schema(PSchema(()))
    assert not rep.valid and rep.codes == ["EmptySchema"]


def test_duplicate_symbol():
    psi = L.assoc()
    dup = replace(psi, components=psi.components + (psi.components[1],))
    assert "SymbolClash" in codes(dup)


def test_missing_order_edge():
    assert "OrderViolation" in codes(replace(L.assoc(), order=()))


def test_cyclic_order():
    psi = L.assoc()
    assert "CyclicLinks" in codes(replace(psi, order=psi.order + (("phi", "chi"),)))


def test_mutual_links_are_cyclic():
    psi = L.assoc()
    chi = psi["chi"]
    bad = swap(psi, "phi", base=B.link("chi", chi.es(), L.alpha))
    assert {"CyclicLinks", "OrderViolation"} <= codes(bad)


def test_step_with_wrong_conclusion():
    psi = L.zero_comm()
    bad = swap(psi, "chi", step=B.refl(numeral(0)))
    assert "MissingInductivePair" in codes(bad)


def test_self_link_must_decrease():
    psi = L.zero_comm()
    chi = psi["chi"]
    loop = B.link("chi", chi.step_instance(), App("s", (n,)))
    bad = swap(psi, "chi", step=loop)
    assert not validate_schema(bad).valid


def test_graph_helpers():
    edges = [("a", "b"), ("b", "c")]
    assert closure(edges, ["a", "b", "c"])["a"] == {"b", "c"}
    assert find_cycle(edges, ["a", "b", "c"]) is None
    assert find_cycle(edges + [("c", "a")], ["a", "b", "c"]) is not None
    assert ("zc", "chi") in cross_links(L.zero_comm())


def test_sub_schemata_of_lemma():
    rep = sub_schemata(L.lemma())
    accepted = {s.members: s.computational for s in rep.accepted}
    assert accepted == {("main", "lem"): False, ("lem",): True}


def test_subset_tied_to_end_sequent_is_rejected():
    rep = sub_schemata(L.assoc())
    phi = next(s for s in rep.candidates if s.members == ("phi",))
    assert not phi.ok and any(r.startswith("(2)") for r in phi.reasons)


def test_component_end_sequents():
    chi = L.zero_comm()["chi"]
    assert chi.es() == seq((), [eq(L.a(n, numeral(0)), L.a(numeral(0), n))])
    phi = L.assoc()["phi"]
    assert phi.ints == (L.k,) and phi.active == n
