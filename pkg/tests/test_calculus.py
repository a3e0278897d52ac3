from dataclasses import replace

import pytest

from conftest import F, T, X
from schemakern import build as B
from schemakern import library as L
from schemakern.calculus import Proof, Sequent, check_derivation, check_inference, seq
from schemakern.rewrite import E_PA, EMPTY
from schemakern.terms import And, App, Atom, Exists, ForAll, Implies, Kind, Not, Or, Param, eq, numeral
from schemakern.translate import generalize

P, Q = F("(P 0)"), F("(Q 0)")
alpha = Param("alpha", Kind.PASSIVE)
PRA = dict(allow_ind=True, allow_mvind=False, pra=True, pa_axioms=E_PA)


def codes(p: Proof, theory=E_PA, **kw):
    kw.setdefault("allow_links", False)
    return [(v.code, v.path) for v in check_derivation(p, theory, **kw).violations]


def first(p: Proof, rule: str, k: int = 0) -> tuple:
    return [path for path, nd in p.nodes() if nd.rule == rule][k]


def mutate(p: Proof, where: tuple, **kw) -> Proof:
    return p.replace_at(where, replace(p.at(where), **kw))


# -- well-formed inferences ---------------------------------------------------


def test_propositional_rules():
    andr = B.binary("andr", B.ax(P), B.ax(Q), And(P, Q), "suc", ((), (P,)), ((), (Q,)))
    assert andr.conclusion == seq([P, Q], [And(P, Q)])
    andl = B.unary("andl", andr, add=((And(P, Q),), ()), remove=((P, Q), ()))
    assert check_derivation(andl).valid
    orr = B.unary("orr", B.ax(P), add=((), (Or(P, Q),)), remove=((), (P,)))
    assert check_derivation(orr).valid
    impr = B.unary("impr", B.ax(P), add=((), (Implies(P, P),)), remove=((P,), (P,)))
    assert impr.conclusion == seq((), [Implies(P, P)])
    assert check_derivation(impr).valid
    notr = B.unary("notr", B.ax(P), add=((), (Not(P),)), remove=((P,), ()))
    notl = B.unary("notl", notr, add=((Not(Not(P)),), ()), remove=((), (Not(P),)))
    assert check_derivation(notl).valid
    orl = B.binary("orl", B.ax(P), B.ax(Q), Or(P, Q), "ant", ((P,), ()), ((Q,), ()))
    assert check_derivation(orl).valid
    impl = B.binary("impl", B.ax(P), B.ax(Q), Implies(P, Q), "ant", ((), (P,)), ((Q,), ()))
    assert check_derivation(impl).valid


def test_quantifier_rules():
    px = Atom("P", (X,))
    a = App("c")
    ex = B.exr(B.ax(Atom("P", (a,))), Exists(X, px), a)
    assert check_derivation(ex).valid
    y = T("v:y")
    lower = B.unary("exl", B.ax(Atom("P", (y,))), add=((Exists(X, px),), ()), remove=((Atom("P", (y,)),), ()),
                    term=y)
    assert check_derivation(lower).valid is False  # y still free on the right
    alll = B.unary("alll", B.ax(Atom("P", (a,))), add=((ForAll(X, px),), ()), remove=((Atom("P", (a,)),), ()),
                   term=a)
    assert check_derivation(alll).valid


def test_structural_rules():
    w = B.weaken(B.ax(P), ant=[Q], suc=[Q])
    assert check_derivation(w).valid
    c = B.contract(B.weaken(B.ax(P), suc=[P]), P, "suc")
    assert c.conclusion == seq([P], [P])
    assert check_derivation(c).valid


def test_equational_schemes():
    t, u = T("(^a 1 p:alpha)"), T("(s p:alpha)")
    assert check_derivation(B.refl(t)).valid
    succ = B.scheme("succ", [eq(t, u)], eq(App("s", (t,)), App("s", (u,))))
    assert check_derivation(succ).valid
    bad = B.scheme("succ", [eq(t, u)], eq(App("s", (t,)), u))
    assert ("BadSchemeInstance", ()) in codes(bad)


def test_e_rule_needs_the_theory():
    p = B.rewrite(B.refl(T("(^a 2 0)")), "suc", 0, eq(numeral(2), T("(^a 2 0)")), E_PA)
    assert check_derivation(p, E_PA).valid
    assert not check_derivation(p, EMPTY).valid


def test_check_inference_on_single_nodes():
    assert check_inference(B.ax(P)) is None
    v = check_inference(B.scheme("refl", (), eq(numeral(0), numeral(1))))
    assert v.code == "BadSchemeInstance"


def test_fixture_proofs_are_valid():
    mv = L.comm_mvlkie()
    rep = check_derivation(mv, E_PA, allow_links=False)
    assert rep.valid and rep.activity == "{n}-active" and rep.kind == "proof"
    assert check_derivation(L.comm_pra(), E_PA, allow_links=False, **PRA).valid
    assert check_derivation(generalize(mv), E_PA, allow_links=False).valid


def test_pra_profile_rejects_mvlkie_features():
    got = {c for c, _ in codes(L.comm_mvlkie(), **PRA)}
    assert {"InductionNotAllowed", "NotEFree", "NotPassiveOnly"} <= got


def test_multiple_active_parameters():
    n, m = Param("n", Kind.ACTIVE), Param("m", Kind.ACTIVE)
    p = B.ax(Atom("R", (n, m)))
    assert "MultipleActiveParams" in {c for c, _ in codes(p)}


def test_eigenvariable_condition():
    pa = Atom("P", (alpha,))
    p = B.allr(B.weaken(B.ax(pa), suc=[pa]), ForAll(Param("x", Kind.PASSIVE),
                                                   Atom("P", (Param("x", Kind.PASSIVE),))), alpha)
    assert ("EigenvariableCaptured", ()) in codes(p)


# -- mutations ----------------------------------------------------------------


def _mv():
    return L.comm_mvlkie()


def _eq_leaf_wrong(p):
    where = first(p, "eq")
    return mutate(p, where, conclusion=seq((), [eq(numeral(1), numeral(2))])), where


def _ax_wrong(p):
    where = first(p, "ax")
    c = p.at(where).conclusion
    return mutate(p, where, conclusion=Sequent(c.ant, (eq(numeral(0), numeral(1)),))), where


def _cut_formula(p):
    where = first(p, "cut")
    return mutate(p, where, formula=eq(numeral(7), numeral(7))), where


def _e_path(p):
    where = first(p, "e")
    return mutate(p, where, path=(1, 1, 1)), where


def _rename(p, rule, new):
    where = first(p, rule, 2 if rule == "cut" else 0)
    return mutate(p, where, rule=new), where


def _drop_premise(p):
    where = first(p, "cut", 2)
    return mutate(p, where, premises=p.at(where).premises[:1]), where


def _pa_wrong(p):
    where = first(p, "pa")
    return mutate(p, where, conclusion=seq((), [eq(T("(^a 0 0)"), numeral(1))])), where


def _ind_active(p):
    where = first(p, "ind")
    return mutate(p, where, ivar=Param("n", Kind.ACTIVE)), where


def _exr_witness(p):
    where = first(p, "exr")
    return mutate(p, where, term=App("zz")), where


def _impr_context(p):
    where = first(p, "impr")
    c = p.at(where).conclusion
    return mutate(p, where, conclusion=Sequent((eq(numeral(0), numeral(0)),), c.suc)), where


def _wr_formula(p):
    where = first(p, "wr")
    return mutate(p, where, formula=eq(numeral(0), numeral(0))), where


MUTATIONS = [
    ("eq leaf with a non-instance", _mv, _eq_leaf_wrong, "BadSchemeInstance", {}),
    ("axiom with different sides", _mv, _ax_wrong, "BadAxiom", {}),
    ("cut on an absent formula", _mv, _cut_formula, "PrincipalMismatch", {}),
    ("rewrite at a wrong position", _mv, _e_path, "NotJoinable", {}),
    ("unknown rule name", _mv, lambda p: _rename(p, "cut", "frob"), "UnknownRule", {}),
    ("binary rule with one premise", _mv, _drop_premise, "BadArity", {}),
    ("non-instance of an arithmetic axiom", L.comm_pra, _pa_wrong, "BadAxiom", PRA),
    ("induction over an active parameter", L.comm_pra, _ind_active, "BadInduction", PRA),
    ("existential with the wrong witness", lambda: L.padded()["pad"].step, _exr_witness, "ContextMismatch",
     {"allow_links": True, "theory": L.PAD}),
    ("implication with a changed context", lambda: generalize(_mv()), _impr_context, "ContextMismatch", {}),
    ("weakening names another formula", lambda: L.padded()["pad"].step, _wr_formula, "PrincipalMismatch",
     {"allow_links": True, "theory": L.PAD}),
    ("mvIND relabelled as IND", _mv, lambda p: _rename(p, "mvind", "ind"), "InductionNotAllowed", {}),
]


@pytest.mark.parametrize("name,source,corrupt,code,opts", MUTATIONS, ids=[m[0] for m in MUTATIONS])
def test_mutation_is_rejected(name, source, corrupt, code, opts):
    opts = dict(opts)
    theory = opts.pop("theory", E_PA)
    original = source()
    assert codes(original, theory, **opts) == []
    bad, where = corrupt(original)
    found = codes(bad, theory, **opts)
    assert (code, where) in found, found


def test_mutation_table_is_large_enough():
    assert len(MUTATIONS) >= 10


def test_rewriting_under_a_quantifier_is_allowed():
    f, g = F("(forall v:x (P (^a 1 1) v:x))"), F("(forall v:x (P 2 v:x))")
    p = B.rewrite(B.ax(f), "suc", 0, g, E_PA)
    assert p.conclusion == seq([f], [g])
    assert check_derivation(p, E_PA).valid
