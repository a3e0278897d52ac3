"""Helpers for assembling proof trees with inferred conclusions."""

from __future__ import annotations

from .calculus import Proof, Sequent, _key, leaf, node, seq
from .rewrite import DEFAULT_FUEL, EqTheory, reduction_chain
from .terms import Exists, ForAll, alpha_eq, eq, render, substitute


class BuildError(Exception):
    pass


def _drop(fs: tuple, f) -> tuple:
    k = _key(f)
    for i, g in enumerate(fs):
        if _key(g) == k:
            return fs[:i] + fs[i + 1:]
    raise BuildError(f"{render(f)} not found among {', '.join(map(render, fs)) or 'nothing'}")


def ax(f) -> Proof:
    return leaf("ax", seq([f], [f]))


def refl(t) -> Proof:
    return leaf("eq", seq((), [eq(t, t)]), scheme="refl")


def scheme(name: str, ant, suc) -> Proof:
    return leaf("eq", seq(ant, [suc]), scheme=name)


def pa(lhs, rhs, label: str | None = None) -> Proof:
    return leaf("pa", seq((), [eq(lhs, rhs)]), label=label)


def link(target: str, sequent: Sequent, arg, iargs=(), rargs=()) -> Proof:
    return leaf("link", sequent, target=target, arg=arg, iargs=tuple(iargs), rargs=tuple(rargs))


def thax(sequent: Sequent, label: str | None = None) -> Proof:
    return leaf("thax", sequent, label=label)


def cut(left: Proof, right: Proof, f=None) -> Proof:
    """Multiplicative cut; the cut formula defaults to the first shared one."""
    c1, c2 = left.conclusion, right.conclusion
    if f is None:
        keys = {_key(g) for g in c2.ant}
        common = [g for g in c1.suc if _key(g) in keys]
        if not common:
            raise BuildError(f"no cut formula between {c1} and {c2}")
        f = common[0]
    concl = Sequent(c1.ant + _drop(c2.ant, f), _drop(c1.suc, f) + c2.suc)
    return node("cut", concl, left, right, formula=f)


def weaken(p: Proof, ant=(), suc=()) -> Proof:
    for f in ant:
        c = p.conclusion
        p = node("wl", Sequent((f,) + c.ant, c.suc), p, formula=f)
    for f in suc:
        c = p.conclusion
        p = node("wr", Sequent(c.ant, c.suc + (f,)), p, formula=f)
    return p


def contract(p: Proof, f, side: str) -> Proof:
    c = p.conclusion
    if side == "ant":
        return node("cl", Sequent(_drop(c.ant, f), c.suc), p, formula=f)
    return node("cr", Sequent(c.ant, _drop(c.suc, f)), p, formula=f)


def contract_all(p: Proof) -> Proof:
    """Contract duplicates until every formula occurs once per side."""
    for side in ("ant", "suc"):
        while True:
            fs = getattr(p.conclusion, side)
            seen, dup = set(), None
            for f in fs:
                if _key(f) in seen:
                    dup = f
                    break
                seen.add(_key(f))
            if dup is None:
                break
            p = contract(p, dup, side)
    return p


def exr(p: Proof, f: Exists, witness) -> Proof:
    aux = substitute(f.body, {f.var: witness})
    c = p.conclusion
    return node("exr", Sequent(c.ant, _drop(c.suc, aux) + (f,)), p, formula=f, term=witness)


def allr(p: Proof, f: ForAll, eigen) -> Proof:
    aux = substitute(f.body, {f.var: eigen})
    c = p.conclusion
    return node("allr", Sequent(c.ant, _drop(c.suc, aux) + (f,)), p, formula=f, term=eigen)


def _place(c: Sequent, side: str, i: int, f) -> Sequent:
    if side == "ant":
        return Sequent(c.ant[:i] + (f,) + c.ant[i + 1:], c.suc)
    return Sequent(c.ant, c.suc[:i] + (f,) + c.suc[i + 1:])


def e_steps(source, target, theory: EqTheory, fuel: int = DEFAULT_FUEL) -> list[tuple[tuple, object]]:
    """Single rewrite steps leading from ``source`` to ``target`` through their common normal form."""
    down = reduction_chain(source, theory, fuel)
    up = reduction_chain(target, theory, fuel)
    nf_s = down[-1][1] if down else source
    nf_t = up[-1][1] if up else target
    if not alpha_eq(nf_s, nf_t):
        raise BuildError(f"{render(source)} and {render(target)} are not joinable")
    steps = list(down)
    before = [target] + [x for _, x in up[:-1]]
    for (pos, _), prev in zip(reversed(up), reversed(before)):
        steps.append((pos, prev))
    return steps


def rewrite(p: Proof, side: str, i: int, target, theory: EqTheory) -> Proof:
    """Chain of one-step E inferences turning formula ``i`` of ``side`` into ``target``."""
    src = getattr(p.conclusion, side)[i]
    for pos, f in e_steps(src, target, theory):
        p = node("e", _place(p.conclusion, side, i, f), p, path=pos)
    return p


def rewrite_to(p: Proof, goal: Sequent, theory: EqTheory) -> Proof:
    """Rewrite formulas positionwise until the conclusion is ``goal``."""
    c = p.conclusion
    if len(c.ant) != len(goal.ant) or len(c.suc) != len(goal.suc):
        raise BuildError(f"cannot rewrite {c} into {goal}")
    for side in ("ant", "suc"):
        for i, f in enumerate(getattr(goal, side)):
            if not alpha_eq(getattr(p.conclusion, side)[i], f):
                p = rewrite(p, side, i, f, theory)
    return p


def unary(rule: str, p: Proof, *, add=((), ()), remove=((), ()), **kw) -> Proof:
    """A one-premise inference: drop ``remove`` from the premise, then add ``add``."""
    ant, suc = p.conclusion.ant, p.conclusion.suc
    for f in remove[0]:
        ant = _drop(ant, f)
    for f in remove[1]:
        suc = _drop(suc, f)
    return node(rule, Sequent(tuple(add[0]) + ant, suc + tuple(add[1])), p, **kw)


def binary(rule: str, p1: Proof, p2: Proof, f, side: str, aux1=((), ()), aux2=((), ())) -> Proof:
    """A multiplicative two-premise inference with principal formula ``f`` on ``side``."""
    parts = []
    for p, aux in ((p1, aux1), (p2, aux2)):
        ant, suc = p.conclusion.ant, p.conclusion.suc
        for g in aux[0]:
            ant = _drop(ant, g)
        for g in aux[1]:
            suc = _drop(suc, g)
        parts.append((ant, suc))
    ant = parts[0][0] + parts[1][0]
    suc = parts[0][1] + parts[1][1]
    if side == "ant":
        ant = (f,) + ant
    else:
        suc = suc + (f,)
    return node(rule, Sequent(ant, suc), p1, p2, formula=f)
