"""Reference schemata and proofs, built programmatically.

The ``.psk`` files under ``fixtures/`` are printed from these builders;
the test-suite checks that the two agree.
"""

from __future__ import annotations

from importlib import resources

from . import build as B
from .calculus import Proof, Sequent, node, seq
from .rewrite import E_PA, EqTheory, IT, RewriteRule
from .schema import Component, PSchema
from .syntax import PskDocument, parse_strict, print_document
from .terms import (
    ZERO,
    App,
    Atom,
    Exists,
    ForAll,
    Kind,
    Param,
    Var,
    eq,
    numeral,
    substitute,
    succ,
)

n = Param("n", Kind.ACTIVE)
m = Param("m", Kind.INTERNAL)
k = Param("k", Kind.INTERNAL)
alpha = Param("alpha", Kind.PASSIVE)
beta = Param("beta", Kind.PASSIVE)
gamma = Param("gamma", Kind.PASSIVE)
delta = Param("delta", Kind.PASSIVE)
x = Var("x")
ONE = numeral(1)


def a(s, t) -> App:
    return App("^a", (s, t))


def lk(target: str, sequent: Sequent, arg, iargs=()) -> Proof:
    return B.link(target, sequent, arg, iargs)


# -- zero commutes: a(n,0) = a(0,n) ---------------------------------------------


def zero_comm_parts(theory: EqTheory = E_PA) -> tuple[Proof, Proof]:
    def es(t):
        return eq(a(t, ZERO), a(ZERO, t))

    base = B.rewrite(B.refl(ZERO), "suc", 0, es(ZERO), theory)
    hyp = es(n)
    lifted = B.scheme("succ", [hyp], eq(succ(a(n, ZERO)), succ(a(ZERO, n))))
    nu1 = B.rewrite(lifted, "suc", 0, es(succ(n)), theory)
    step = B.cut(lk("chi", seq((), [hyp]), n), nu1)
    return base, step


def zero_comm() -> PSchema:
    """Zero commutes with every number, with a closing driver over a passive."""
    base, step = zero_comm_parts()
    chi = Component("chi", base, step, active=n)
    goal = lambda t: seq((), [eq(a(t, ZERO), a(ZERO, t))])  # noqa: E731
    top = Component("zc", lk("chi", goal(ZERO), ZERO), lk("chi", goal(alpha), alpha), active=alpha)
    return PSchema((top, chi), (("zc", "chi"),), frozenset({alpha}), E_PA)


# -- associativity with a passive third argument -----------------------------------


def assoc_parts(sym: str, third, theory: EqTheory = E_PA) -> tuple[Proof, Proof]:
    def es(t):
        return eq(a(t, a(k, third)), a(a(t, k), third))

    base = B.rewrite(B.refl(a(k, third)), "suc", 0, es(ZERO), theory)
    hyp = es(n)
    lifted = B.scheme("succ", [hyp], eq(succ(hyp.args[0]), succ(hyp.args[1])))
    nu1 = B.rewrite(lifted, "suc", 0, es(succ(n)), theory)
    return base, B.cut(lk(sym, seq((), [hyp]), n, (k,)), nu1)


def assoc() -> PSchema:
    """Associativity of addition: a recursive component and its driver."""
    base, step = assoc_parts("phi", gamma)
    phi = Component("phi", base, step, active=n, ints=(k,))

    def goal(t):
        return seq((), [eq(a(t, a(beta, gamma)), a(a(t, beta), gamma))])

    top = Component("chi", lk("phi", goal(ZERO), ZERO, (beta,)), lk("phi", goal(alpha), alpha, (beta,)),
                    active=alpha)
    return PSchema((top, phi), (("chi", "phi"),), frozenset({alpha, beta, gamma}), E_PA)


# -- commutativity -----------------------------------------------------------------


def _one_comm_parts(theory: EqTheory = E_PA) -> tuple[Proof, Proof]:
    def es(t):
        return eq(a(t, ONE), a(ONE, t))

    base = B.rewrite(B.refl(ONE), "suc", 0, es(ZERO), theory)
    hyp = es(n)
    lifted = B.cut(lk("psi", seq((), [hyp]), n),
                   B.scheme("succ", [hyp], eq(succ(a(n, ONE)), succ(a(ONE, n)))))
    return base, B.rewrite(lifted, "suc", 0, es(succ(n)), theory)


def _assoc_internal_parts(theory: EqTheory = E_PA) -> tuple[Proof, Proof]:
    def es(t):
        return eq(a(t, a(m, k)), a(a(t, m), k))

    base = B.rewrite(B.refl(a(m, k)), "suc", 0, es(ZERO), theory)
    hyp = es(n)
    lifted = B.scheme("succ", [hyp], eq(succ(hyp.args[0]), succ(hyp.args[1])))
    nu1 = B.rewrite(lifted, "suc", 0, es(succ(n)), theory)
    return base, B.cut(lk("phi", seq((), [hyp]), n, (m, k)), nu1)


def comm_step(ih: Proof, one_comm: Proof, assoc_inst: Proof, theory: EqTheory = E_PA) -> Proof:
    """From a(alpha,n)=a(n,alpha) and two lemmas derive a(alpha,n')=a(n',alpha).

    ``ih``, ``one_comm`` and ``assoc_inst`` conclude, respectively, the
    induction hypothesis, a(alpha,1)=a(1,alpha) and
    a(alpha,a(1,n))=a(a(alpha,1),n), possibly with extra antecedents.
    """
    h = eq(a(alpha, n), a(n, alpha))
    e3 = B.scheme("succ", [h], eq(succ(a(alpha, n)), succ(a(n, alpha))))
    left = B.rewrite(B.cut(ih, e3), "suc", len(ih.conclusion.suc) - 1,
                     eq(a(a(ONE, alpha), n), a(succ(n), alpha)), theory)
    swap = eq(a(alpha, ONE), a(ONE, alpha))
    mid_eq = eq(a(a(alpha, ONE), n), a(a(ONE, alpha), n))
    e1 = B.scheme("func", [swap], mid_eq)
    mid = B.cut(one_comm, e1)
    target = eq(a(a(alpha, ONE), n), a(succ(n), alpha))
    e2 = B.scheme("pred", [eq(a(a(ONE, alpha), n), a(succ(n), alpha)), mid_eq], target)
    joined = B.cut(mid, B.cut(left, e2))
    start = eq(a(alpha, a(ONE, n)), a(a(alpha, ONE), n))
    e4 = B.scheme("pred", [start, target], eq(a(alpha, a(ONE, n)), a(succ(n), alpha)))
    out = B.cut(assoc_inst, B.cut(joined, e4))
    return B.rewrite(out, "suc", len(out.conclusion.suc) - 1, eq(a(alpha, succ(n)), a(succ(n), alpha)), theory)


def comm() -> PSchema:
    """Commutativity of addition from four mutually linked components."""
    chi_base, chi_step = zero_comm_parts()
    psi_base, psi_step = _one_comm_parts()
    phi_base, phi_step = _assoc_internal_parts()

    def es_xi(t):
        return seq((), [eq(a(alpha, t), a(t, alpha))])

    xi_base = lk("chi", es_xi(ZERO), alpha)
    ih = lk("xi", es_xi(n), n)
    one = lk("psi", seq((), [eq(a(alpha, ONE), a(ONE, alpha))]), alpha)
    asc = lk("phi", seq((), [eq(a(alpha, a(ONE, n)), a(a(alpha, ONE), n))]), alpha, (ONE, n))
    xi_step = comm_step(ih, one, asc)

    def es_top(t):
        return seq((), [eq(a(alpha, t), a(t, alpha))])

    top = Component("comm", lk("xi", es_top(ZERO), ZERO), lk("xi", es_top(beta), beta), active=beta)
    comps = (
        top,
        Component("xi", xi_base, xi_step, active=n),
        Component("phi", phi_base, phi_step, active=n, ints=(m, k)),
        Component("psi", psi_base, psi_step, active=n),
        Component("chi", chi_base, chi_step, active=n),
    )
    order = (("comm", "xi"), ("xi", "phi"), ("xi", "psi"), ("psi", "chi"))
    return PSchema(comps, order, frozenset({alpha, beta}), E_PA)


# -- the same argument with multi-variable induction ---------------------------------


def _mvind(premise: Proof, formula, ivar: Param, target, inst=(), ctx=Sequent()) -> Proof:
    s = {ivar: ZERO, **dict(inst)}
    lo = substitute(formula, s)
    hi = substitute(formula, {**s, ivar: target})
    concl = Sequent((lo,) + ctx.ant, ctx.suc + (hi,))
    return node("mvind", concl, premise, formula=formula, term=target, ivar=ivar, inst=tuple(inst))


def comm_mvlkie(theory: EqTheory = E_PA) -> Proof:
    """An mvIND proof of a(alpha,0)=a(0,alpha) |- a(alpha,beta)=a(beta,alpha)."""
    # a(alpha,1) = a(1,alpha), by induction on the first argument
    f1 = eq(a(n, ONE), a(ONE, n))
    p1 = B.rewrite(B.scheme("succ", [f1], eq(succ(a(n, ONE)), succ(a(ONE, n)))),
                   "suc", 0, eq(a(succ(n), ONE), a(ONE, succ(n))), theory)
    ind1 = _mvind(p1, f1, n, alpha)
    base1 = B.rewrite(B.refl(ONE), "suc", 0, eq(a(ZERO, ONE), a(ONE, ZERO)), theory)
    one = B.cut(base1, ind1)

    # a(alpha, a(1,n)) = a(a(alpha,1), n), by induction with internals m, k
    f2 = eq(a(n, a(m, k)), a(a(n, m), k))
    p2 = B.rewrite(B.scheme("succ", [f2], eq(succ(f2.args[0]), succ(f2.args[1]))),
                   "suc", 0, substitute(f2, {n: succ(n)}), theory)
    ind2 = _mvind(p2, f2, n, alpha, inst=((m, ONE), (k, n)))
    base2 = B.rewrite(B.refl(a(ONE, n)), "suc", 0, eq(a(ZERO, a(ONE, n)), a(a(ZERO, ONE), n)), theory)
    asc = B.cut(base2, ind2)

    h = eq(a(alpha, n), a(n, alpha))
    premise = comm_step(B.ax(h), one, asc, theory)
    return _mvind(premise, h, n, beta)


# -- a computational sub-schema ----------------------------------------------------


def lemma() -> PSchema:
    """A closing component that uses a recursive lemma at an eigenvariable."""
    base, step = _right_zero_parts()
    lem = Component("lem", base, step, active=n)
    body = eq(a(delta, ZERO), delta)
    use = B.allr(lk("lem", seq((), [body]), delta), ForAll(delta, body), delta)
    top = Component("main", use, use, active=None)
    return PSchema((top, lem), (("main", "lem"),), frozenset({delta}), E_PA)


def _right_zero_parts(theory: EqTheory = E_PA) -> tuple[Proof, Proof]:
    def es(t):
        return eq(a(t, ZERO), t)

    base = B.rewrite(B.refl(ZERO), "suc", 0, es(ZERO), theory)
    hyp = es(n)
    lifted = B.cut(lk("lem", seq((), [hyp]), n), B.scheme("succ", [hyp], eq(succ(a(n, ZERO)), succ(n))))
    return base, B.rewrite(lifted, "suc", 0, es(succ(n)), theory)


# -- existential end-sequents ---------------------------------------------------------


def iterate() -> PSchema:
    """|- exists x. x = it(alpha), witnessed by f applied to the previous iterate."""
    def it(t):
        return App("^it", (t,))

    def goal(t):
        return Exists(x, eq(x, it(t)))

    a_ = App("a", ())
    base = B.exr(B.rewrite(B.refl(a_), "suc", 0, eq(a_, it(ZERO)), IT), goal(ZERO), a_)
    w = App("f", (it(n),))
    step = B.exr(B.rewrite(B.refl(w), "suc", 0, eq(w, it(succ(n))), IT), goal(succ(n)), w)
    it_c = Component("it", base, step, active=n)
    top = Component("itmain", lk("it", seq((), [goal(ZERO)]), ZERO), lk("it", seq((), [goal(alpha)]), alpha),
                    active=alpha)
    return PSchema((top, it_c), (("itmain", "it"),), frozenset({alpha}), IT)


PAD = EqTheory("PAD", (
    RewriteRule(Atom("^r", (ZERO, Var("y"))), eq(Var("y"), App("a", ()))),
    RewriteRule(Atom("^r", (succ(Param("p", Kind.PASSIVE)), Var("y"))), Atom("^r", (Param("p", Kind.PASSIVE), Var("y")))),
))


def padded() -> PSchema:
    """|- exists x. r(alpha, x), with two extra witnesses at every step."""
    def r(t, u):
        return Atom("^r", (t, u))

    def goal(t):
        return Exists(x, r(t, x))

    a_ = App("a", ())
    base = B.exr(B.rewrite(B.refl(a_), "suc", 0, r(ZERO, a_), PAD), goal(ZERO), a_)
    p = B.rewrite(lk("pad", seq((), [goal(n)]), n), "suc", 0, goal(succ(n)), PAD)
    for f in ("b", "c"):
        w = App(f, (n,))
        p = B.contract(B.exr(B.weaken(p, suc=[r(succ(n), w)]), goal(succ(n)), w), goal(succ(n)), "suc")
    pad = Component("pad", base, p, active=n)
    top = Component("padmain", lk("pad", seq((), [goal(ZERO)]), ZERO), lk("pad", seq((), [goal(alpha)]), alpha),
                    active=alpha)
    return PSchema((top, pad), (("padmain", "pad"),), frozenset({alpha}), PAD)


# -- documents -------------------------------------------------------------------------

SCHEMATA = {
    "zero_comm": zero_comm,
    "assoc": assoc,
    "comm": comm,
    "lemma": lemma,
    "iterate": iterate,
    "padded": padded,
}


def _theory_parts(th: EqTheory) -> tuple[list, list]:
    if th.name in ("E_PA", "IT"):
        return [th.name], []
    return [], list(th.rules)


def schema_document(psi: PSchema) -> PskDocument:
    uses, rules = _theory_parts(psi.theory)
    passive = tuple(sorted(psi.passive, key=str)) if psi.passive is not None else None
    pa = psi.pa_axioms.name if psi.pa_axioms is not None else None
    return PskDocument(uses=uses, rules=rules, components=list(psi.components),
                       order=list(psi.order), passive=passive, pa=pa)


def proof_document(name: str, p: Proof, theory: EqTheory = E_PA, pa: str | None = None) -> PskDocument:
    uses, rules = _theory_parts(theory)
    return PskDocument(uses=uses, rules=rules, proofs={name: p}, pa=pa)


def documents() -> dict[str, PskDocument]:
    """Every shipped fixture, keyed by file stem."""
    out = {name: schema_document(fn()) for name, fn in SCHEMATA.items()}
    out["comm_mvlkie"] = proof_document("comm", comm_mvlkie())
    out["comm_pra"] = proof_document("comm", comm_pra(), pa="E_PA")
    return out


def comm_pra() -> Proof:
    """The induction proof with the E rule eliminated and parameters made passive."""
    from .translate import eliminate_e_rule, to_pra

    return to_pra(eliminate_e_rule(comm_mvlkie()).proof)


def fixture_text(name: str) -> str:
    return resources.files("schemakern").joinpath("fixtures", f"{name}.psk").read_text()


def load(name: str) -> PskDocument:
    return parse_strict(fixture_text(name))


def render_fixture(name: str) -> str:
    return print_document(documents()[name])
