"""Passes between P-schemata, multi-variable induction proofs and PRA-style proofs."""

from __future__ import annotations

from dataclasses import dataclass, replace

from . import build as B
from .calculus import Proof, Sequent, check_inference, map_nodes, node
from .rewrite import E_PA, EMPTY, EqTheory, root_step
from .schema import Component, PSchema, sub_schemata, validate_schema
from .terms import (
    And,
    Atom,
    ForAll,
    Implies,
    Kind,
    Not,
    Or,
    Param,
    ZERO,
    free_symbols,
    is_defined,
    parameters_of,
    render,
    substitute,
    succ,
    value_of,
)


class TranslationError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


# -- packing a sequent's induction part into one formula ------------------------------


def _conj(fs):
    return fs[0] if len(fs) == 1 else And(fs[0], _conj(fs[1:]))


def _disj(fs):
    return fs[0] if len(fs) == 1 else Or(fs[0], _disj(fs[1:]))


def pack_formula(ant: tuple, suc: tuple):
    if not ant:
        return _disj(suc)
    if not suc:
        return Not(_conj(ant))
    return Implies(_conj(ant), _disj(suc))


def _fold_left(p: Proof, fs: tuple) -> Proof:
    """A1, ..., Ak in the antecedent become their right-nested conjunction."""
    for i in range(len(fs) - 2, -1, -1):
        rest = _conj(fs[i + 1:])
        f = And(fs[i], rest)
        p = B.unary("andl", p, add=((f,), ()), remove=((fs[i], rest), ()), formula=f)
    return p


def _fold_right(p: Proof, fs: tuple) -> Proof:
    for i in range(len(fs) - 2, -1, -1):
        rest = _disj(fs[i + 1:])
        f = Or(fs[i], rest)
        p = B.unary("orr", p, add=((), (f,)), remove=((), (fs[i], rest)), formula=f)
    return p


def pack(p: Proof, ant: tuple, suc: tuple) -> Proof:
    """From ``ant, G |- D, suc`` derive ``G |- D, pack_formula(ant, suc)``."""
    f = pack_formula(ant, suc)
    if suc:
        p = _fold_right(p, suc)
    if not ant:
        return p
    p = _fold_left(p, ant)
    if not suc:
        return B.unary("notr", p, add=((), (f,)), remove=((f.body,), ()), formula=f)
    return B.unary("impr", p, add=((), (f,)), remove=((f.left,), (f.right,)), formula=f)


def _conj_intro(fs: tuple) -> Proof:
    if len(fs) == 1:
        return B.ax(fs[0])
    f = _conj(fs)
    return B.binary("andr", B.ax(fs[0]), _conj_intro(fs[1:]), f, "suc", ((), (fs[0],)), ((), (f.right,)))


def _disj_elim(fs: tuple) -> Proof:
    if len(fs) == 1:
        return B.ax(fs[0])
    f = _disj(fs)
    return B.binary("orl", B.ax(fs[0]), _disj_elim(fs[1:]), f, "ant", ((fs[0],), ()), ((f.right,), ()))


def unpack(ant: tuple, suc: tuple) -> Proof:
    """``pack_formula(ant, suc), ant |- suc``."""
    f = pack_formula(ant, suc)
    if not ant:
        return _disj_elim(suc)
    if not suc:
        return B.unary("notl", _conj_intro(ant), add=((f,), ()), remove=((), (f.body,)), formula=f)
    return B.binary("impl", _conj_intro(ant), _disj_elim(suc), f, "ant", ((), (f.left,)), ((f.right,), ()))


# -- schema to multi-variable induction ------------------------------------------


@dataclass(frozen=True)
class _Induction:
    formula: object
    side: Sequent          # context not mentioning the induction parameters
    dep: Sequent           # the part packed into ``formula``
    packed: bool
    premise: Proof         # formula(n), side |- side, formula(s(n))
    base: Proof            # side |- side, formula(0)


def _depends(f, bound: set) -> bool:
    return bool(free_symbols(f) & bound)


def _split(es: Sequent, bound: set) -> tuple[Sequent, Sequent]:
    dep = Sequent(tuple(f for f in es.ant if _depends(f, bound)), tuple(f for f in es.suc if _depends(f, bound)))
    side = Sequent(tuple(f for f in es.ant if not _depends(f, bound)),
                   tuple(f for f in es.suc if not _depends(f, bound)))
    return dep, side


def _contract_side(p: Proof, side: Sequent) -> Proof:
    for f in side.ant:
        p = B.contract(p, f, "ant")
    for f in side.suc:
        p = B.contract(p, f, "suc")
    return p


class _ToInduction:
    def __init__(self, psi: PSchema, barrier: list):
        self.psi = psi
        self.theory = psi.theory
        self.barrier = barrier
        self.cache: dict[str, _Induction] = {}

    def _cut_off(self, owner: str, target: str) -> bool:
        return any(target in m and owner not in m for m in self.barrier)

    def top(self) -> Proof:
        main = self.psi.main
        return self.tree(main.step, main.symbol)

    def tree(self, t: Proof, owner: str) -> Proof:
        def fix(nd: Proof):
            if nd.rule != "link":
                return None
            if self._cut_off(owner, nd.target):
                return B.thax(nd.conclusion, label=nd.target)
            return self.derive(nd)
        return map_nodes(t, fix)

    def derive(self, lk: Proof) -> Proof:
        d = self.psi[lk.target]
        s = dict(zip(d.ints, lk.iargs))
        s.update(zip(d.ivars, lk.rargs))
        if d.closing:
            if d.active is not None:
                s[d.active] = lk.arg
            return substitute(self.tree(d.step, d.symbol), s)
        ind = self.induction(d)
        inst = tuple((m, a) for m, a in zip(d.ints, lk.iargs))
        n = d.active
        lo = substitute(ind.formula, {n: ZERO})
        hi = substitute(ind.formula, {n: lk.arg})
        lo_i, hi_i = substitute(lo, dict(inst)), substitute(hi, dict(inst))
        concl = Sequent((lo_i,) + ind.side.ant, ind.side.suc + (hi_i,))
        step = node("mvind", concl, ind.premise, formula=ind.formula, term=lk.arg, ivar=n, inst=inst)
        base = substitute(ind.base, dict(inst))
        out = _contract_side(B.cut(base, step, lo_i), ind.side)
        if ind.packed:
            dep_t = substitute(ind.dep, {n: lk.arg, **dict(inst)})
            out = B.cut(out, self._unpacked(dep_t), hi_i)
        if d.ivars:
            out = substitute(out, dict(zip(d.ivars, lk.rargs)))
        return out

    @staticmethod
    def _unpacked(dep: Sequent) -> Proof:
        return unpack(dep.ant, dep.suc)

    def induction(self, d: Component) -> _Induction:
        if d.symbol in self.cache:
            return self.cache[d.symbol]
        if value_of(d.alpha) != 0:
            raise TranslationError("UnsupportedBase", f"{d.symbol}: base case at {render(d.alpha)} instead of 0")
        n = d.active
        es = d.es()
        dep, side = _split(es, {n, *d.ints})
        packed = not (not dep.ant and len(dep.suc) == 1)
        formula = pack_formula(dep.ant, dep.suc) if packed else dep.suc[0]
        hyp = formula

        def hypothesis(lk: Proof) -> Proof:
            if tuple(lk.iargs) != tuple(d.ints) or lk.arg != n:
                raise TranslationError("VaryingInternals",
                                       f"{d.symbol}: self-link with arguments other than its own parameters")
            core = unpack(dep.ant, dep.suc) if packed else B.ax(hyp)
            return B.weaken(core, ant=side.ant, suc=side.suc)

        threaded, copies = self._thread(d.step, d.symbol, hypothesis, hyp)
        if copies == 0:
            threaded = B.weaken(threaded, ant=(hyp,))
        for _ in range(copies - 1):
            threaded = B.contract(threaded, hyp, "ant")
        if packed:
            dep_s = substitute(dep, {n: succ(n)})
            threaded = pack(threaded, dep_s.ant, dep_s.suc)
        base = self.tree(d.base, d.symbol)
        if packed:
            dep0 = substitute(dep, {n: ZERO})
            base = pack(base, dep0.ant, dep0.suc)
        ind = _Induction(formula, side, dep, packed, threaded, base)
        self.cache[d.symbol] = ind
        return ind

    def _thread(self, t: Proof, owner: str, hypothesis, hyp) -> tuple[Proof, int]:
        """Replace self-links by derivations using ``hyp`` and carry it down to the root."""
        if t.rule == "link":
            if t.target == owner:
                return hypothesis(t), 1
            if self._cut_off(owner, t.target):
                return B.thax(t.conclusion, label=t.target), 0
            return self.derive(t), 0
        if not t.premises:
            return t, 0
        results = [self._thread(q, owner, hypothesis, hyp) for q in t.premises]
        prem = tuple(p for p, _ in results)
        counts = [c for _, c in results]
        c = t.conclusion
        if not any(counts):
            return replace(t, premises=prem), 0
        if len(prem) == 1:
            if t.term is not None and t.rule in ("allr", "exl") and t.term in free_symbols(hyp):
                raise TranslationError("EigenvariableCaptured",
                                       f"eigenvariable {t.term} occurs in the induction hypothesis")
            k = counts[0]
            return replace(t, premises=prem, conclusion=Sequent((hyp,) * k + c.ant, c.suc)), k
        k = sum(counts)
        cand = replace(t, premises=prem, conclusion=Sequent((hyp,) * k + c.ant, c.suc))
        if check_inference(cand, self.theory) is None:
            return cand, k
        k = max(counts)
        prem = tuple(B.weaken(p, ant=(hyp,) * (k - j)) for p, j in zip(prem, counts))
        return replace(t, premises=prem, conclusion=Sequent((hyp,) * k + c.ant, c.suc)), k


def schema_to_mvlkie(psi: PSchema, *, general: bool = False) -> Proof:
    """Replace every recursive component by an mvIND inference.

    With ``general`` a non-strict schema is accepted: links into its
    computational sub-schemata become theory-axiom leaves.
    """
    rep = validate_schema(psi)
    if not rep.valid:
        raise TranslationError("InvalidSchema", rep.violations[0].message)
    barrier = []
    if not rep.strict:
        if not general:
            raise TranslationError("NotStrict", "the schema is not strict")
        barrier = [s.members for s in sub_schemata(psi).accepted if s.computational]
    return _ToInduction(psi, barrier).top()


# -- multi-variable induction to schema -----------------------------------------------


def _passives_used(p: Proof) -> set:
    out = set()
    for _, nd in p.nodes():
        out |= parameters_of(nd.conclusion, Kind.PASSIVE)
    return out


class _ToSchema:
    def __init__(self, proof: Proof):
        self.proof = proof
        self.components: list[Component] = []
        self.order: list[tuple[str, str]] = []
        self.count = 0

    def run(self) -> PSchema:
        main = Component("main", self.proof, self.proof, active=None)
        body = self.tree(self.proof, "main")
        self.components.insert(0, replace(main, base=body, step=body))
        return self.components

    def tree(self, t: Proof, owner: str) -> Proof:
        if t.rule == "mvind":
            return self.component(t, owner)
        if not t.premises:
            return t
        return replace(t, premises=tuple(self.tree(q, owner) for q in t.premises))

    def component(self, t: Proof, owner: str) -> Proof:
        self.count += 1
        sym = f"ind{self.count}"
        self.order.append((owner, sym))
        n, F = t.ivar, t.formula
        inst = dict(t.inst)
        lo, hi = substitute(F, {n: ZERO, **inst}), substitute(F, {n: t.term, **inst})
        ctx = Sequent(B._drop(t.conclusion.ant, lo), B._drop(t.conclusion.suc, hi))
        extra = sorted((parameters_of(F, Kind.INTERNAL) | parameters_of(ctx, Kind.INTERNAL)) - set(inst), key=str)
        ints = tuple(sorted(inst, key=str)) + tuple(extra)
        iargs = tuple(inst[m] for m in sorted(inst, key=str)) + tuple(extra)
        stray = (parameters_of(F, Kind.ACTIVE) - {n}) | parameters_of(ctx, Kind.ACTIVE)
        if stray:
            raise TranslationError("MultipleActive",
                                   f"induction on {n} also mentions active {', '.join(sorted(map(str, stray)))}")
        f0 = substitute(F, {n: ZERO})
        es = Sequent((f0,) + ctx.ant, ctx.suc + (F,))
        base = B.weaken(B.ax(f0), ant=ctx.ant, suc=ctx.suc)
        premise = self.tree(t.premises[0], sym)
        rec = B.link(sym, es, n, ints)
        step = _contract_side(B.cut(rec, premise, F), ctx)
        self.components.append(Component(sym, base, step, active=n, ints=ints))
        return B.link(sym, t.conclusion, t.term, iargs)


def mvlkie_to_schema(proof: Proof, theory: EqTheory = EMPTY, pa_axioms: EqTheory | None = None) -> PSchema:
    """Turn every mvIND inference into a component linked from where it stood."""
    if any(nd.rule == "link" for _, nd in proof.nodes()):
        raise TranslationError("InvalidProof", "links are not allowed in an induction proof")
    es_p = parameters_of(proof.conclusion, Kind.PASSIVE)
    if not _passives_used(proof) <= es_p:
        extra = sorted(map(str, _passives_used(proof) - es_p))
        raise TranslationError("NotStrict", f"passive parameters {', '.join(extra)} are not in the end-sequent")
    if parameters_of(proof.conclusion, Kind.ACTIVE) or parameters_of(proof.conclusion, Kind.INTERNAL):
        raise TranslationError("NotAProof", "the end-sequent has active or internal parameters")
    ts = _ToSchema(proof)
    comps = ts.run()
    if pa_axioms is None and any(nd.rule == "pa" for _, nd in proof.nodes()):
        pa_axioms = E_PA
    return PSchema(tuple(comps), tuple(ts.order), None, theory, pa_axioms)


# -- eliminating the E rule over the arithmetic axioms ------------------------------------


@dataclass
class Elimination:
    proof: Proof
    e_nodes: int
    cuts_added: int


def _axiom(u, v, base: EqTheory, theory: EqTheory) -> Proof:
    for lhs, rhs in ((u, v), (v, u)):
        if root_step(lhs, base) == rhs:
            return B.pa(lhs, rhs)
    for lhs, rhs in ((u, v), (v, u)):
        if root_step(lhs, theory) == rhs:
            raise TranslationError("NonPaRule", f"{render(lhs)} -> {render(rhs)} is not an instance of {base.name}")
    raise TranslationError("NotJoinable", f"{render(u)} and {render(v)} are not one rewrite step apart")


def _congruence(u, v, rel: tuple, base: EqTheory, theory: EqTheory) -> tuple[Proof, int]:
    """A proof of ``|- u = v`` (in some orientation) for terms differing at ``rel``."""
    if not rel:
        return _axiom(u, v, base, theory), 0
    j = rel[0]
    inner, cuts = _congruence(u.args[j], v.args[j], rel[1:], base, theory)
    if u.head == "s":
        sch = B.scheme("succ", inner.conclusion.suc, Atom("=", (u, v)))
    elif is_defined(u.head):
        sch = B.scheme("func", inner.conclusion.suc, Atom("=", (u, v)))
    else:
        raise TranslationError("Unsupported", f"no congruence scheme for {u.head}")
    return B.cut(inner, sch), cuts + 1


def _one_step(p: Proof, side: str, cur, nxt, pos: tuple, base: EqTheory, theory: EqTheory) -> tuple[Proof, int]:
    if not isinstance(cur, Atom) or not pos:
        raise TranslationError("Unsupported", f"rewrite of {render(cur)} is not inside an atom")
    i = pos[0]
    eqp, cuts = _congruence(cur.args[i], nxt.args[i], pos[1:], base, theory)
    eqf = eqp.conclusion.suc[0]
    if side == "suc":
        q = B.cut(p, B.scheme("pred", [cur, eqf], nxt), cur)
    else:
        q = B.cut(B.scheme("pred", [nxt, eqf], cur), p, cur)
    return B.cut(eqp, q, eqf), cuts + 2


def eliminate_e_rule(proof: Proof, theory: EqTheory = E_PA, base: EqTheory = E_PA) -> Elimination:
    """Replace E inferences by cuts against axiom instances and congruence schemes."""
    stats = {"e": 0, "cuts": 0}

    def fix(nd: Proof):
        if nd.rule != "e":
            return None
        stats["e"] += 1
        p = nd.premises[0]
        from .calculus import Checker

        aa, as_, ra, rs = Checker._diff(nd.conclusion, p.conclusion)
        if not (aa or as_):
            return p
        side, new, old = ("ant", aa[0], ra[0]) if aa else ("suc", as_[0], rs[0])
        if nd.path is not None:
            steps = [(nd.path, new)]
        else:
            steps = B.e_steps(old, new, theory)
        cur = old
        for pos, nxt in steps:
            p, c = _one_step(p, side, cur, nxt, pos, base, theory)
            stats["cuts"] += c
            cur = nxt
        return p

    out = map_nodes(proof, fix)
    return Elimination(out, stats["e"], stats["cuts"])


# -- the PRA normal form ---------------------------------------------------------------

FRESH_LIMIT = 1_000_000


class FreshNames:
    def __init__(self, taken: set, prefix: str, kind: Kind):
        self.taken = {p.name for p in taken}
        self.prefix = prefix
        self.kind = kind
        self.i = 0

    def __call__(self) -> Param:
        while True:
            self.i += 1
            if self.i > FRESH_LIMIT:
                raise TranslationError("FreshNameClash", f"no fresh {self.prefix} name left")
            name = f"{self.prefix}{self.i}"
            if name not in self.taken:
                self.taken.add(name)
                return Param(name, self.kind)


def _all_params(p: Proof) -> set:
    out = set()
    for _, nd in p.nodes():
        out |= parameters_of(nd.conclusion)
        for x in (nd.formula, nd.term, nd.ivar):
            if x is not None:
                out |= parameters_of(x)
        for _, a in nd.inst:
            out |= parameters_of(a)
    return out


def to_pra(proof: Proof, prefix: str = "_v") -> Proof:
    """Rename induction parameters to fresh passives, turning mvIND into IND."""
    if any(nd.rule == "e" for _, nd in proof.nodes()):
        raise TranslationError("NotEFree", "eliminate the E rule first")
    if any(nd.rule == "link" for _, nd in proof.nodes()):
        raise TranslationError("InvalidProof", "links are not allowed here")
    fresh = FreshNames(_all_params(proof), prefix, Kind.PASSIVE)
    stray: dict = {}

    def sub(x, env):
        if x is None:
            return None
        y = substitute(x, env)
        for q in sorted(parameters_of(y, Kind.ACTIVE) | parameters_of(y, Kind.INTERNAL), key=str):
            if q not in stray:
                stray[q] = fresh()
        return substitute(y, stray)

    def go(t: Proof, env: dict) -> Proof:
        if t.rule == "mvind":
            nu = fresh()
            inner = dict(env)
            for m, a in t.inst:
                inner[m] = sub(a, env)
            inner[t.ivar] = nu
            return replace(t, rule="ind", conclusion=sub(t.conclusion, env),
                           premises=(go(t.premises[0], inner),), formula=sub(t.formula, inner),
                           term=sub(t.term, env), ivar=nu, inst=())
        return replace(t, conclusion=sub(t.conclusion, env), premises=tuple(go(q, env) for q in t.premises),
                       formula=sub(t.formula, env), term=sub(t.term, env))

    return go(proof, {})


def from_pra(proof: Proof) -> Proof:
    """Read IND inferences back as mvIND, abstracting outer induction parameters."""
    taken = _all_params(proof)
    n = FreshNames(taken, "_n", Kind.ACTIVE)()
    fresh_m = FreshNames(taken, "_m", Kind.INTERNAL)

    def go(t: Proof, env: dict) -> Proof:
        if t.rule == "ind":
            outer = sorted((free_symbols(t.formula) & set(env)) - {t.ivar}, key=str)
            inner = {t.ivar: n}
            inst = []
            for o in outer:
                if env[o].kind is Kind.ACTIVE:
                    k = fresh_m()
                    inner[o] = k
                    inst.append((k, env[o]))
                else:
                    inner[o] = env[o]
            formula = substitute(t.formula, inner)
            ctx_env = {**env, **inner}
            return replace(t, rule="mvind", conclusion=substitute(t.conclusion, env),
                           premises=(go(t.premises[0], ctx_env),), formula=formula,
                           term=substitute(t.term, env), ivar=n, inst=tuple(inst))
        return replace(t, conclusion=substitute(t.conclusion, env), premises=tuple(go(q, env) for q in t.premises),
                       formula=substitute(t.formula, env) if t.formula is not None else None,
                       term=substitute(t.term, env) if t.term is not None else None)

    return go(proof, {})


# -- quantifying the passive parameters -------------------------------------------------


def generalize(proof: Proof) -> Proof:
    """Close the end-sequent under universal quantifiers over its passive parameters."""
    es = proof.conclusion
    ps = sorted(parameters_of(es, Kind.PASSIVE), key=str)
    if not ps:
        return proof
    p = proof
    if es.ant or len(es.suc) != 1:
        p = pack(p, es.ant, es.suc)
    body = p.conclusion.suc[0]
    for q in reversed(ps):
        f = ForAll(q, body)
        p = B.allr(p, f, q)
        body = f
    return p
