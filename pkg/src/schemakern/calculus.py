"""Schematic sequents, proof trees and the inference checker.

Sequents are pairs of multisets compared up to alpha-equivalence.  Every node
of a proof tree names its rule; side data (cut formula, witness, eigenvariable,
rewrite position, link arguments, induction data) is optional wherever the
checker can recover it from the premises.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Iterator, Mapping

from .rewrite import DEFAULT_FUEL, EMPTY, EqTheory, FuelExhausted, joinable, root_step
from .terms import (
    And,
    App,
    Atom,
    Exists,
    ForAll,
    Implies,
    Kind,
    Not,
    Or,
    Param,
    Sort,
    Var,
    alpha_eq,
    canonical,
    children,
    free_symbols,
    is_defined,
    params_by_kind,
    parameters_of,
    render,
    replace_at,
    sort_of,
    subterm_at,
    substitute,
    succ,
    ZERO,
)


# -- sequents ---------------------------------------------------------------


@lru_cache(maxsize=1 << 16)
def _key(f) -> str:
    return render(canonical(f))


@dataclass(frozen=True, eq=False)
class Sequent:
    ant: tuple = ()
    suc: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "ant", tuple(self.ant))
        object.__setattr__(self, "suc", tuple(self.suc))

    def key(self) -> tuple:
        return (tuple(sorted(map(_key, self.ant))), tuple(sorted(map(_key, self.suc))))

    def __eq__(self, other):
        return isinstance(other, Sequent) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def formulas(self) -> tuple:
        return self.ant + self.suc

    def _substitute(self, s):
        return Sequent(tuple(substitute(f, s) for f in self.ant), tuple(substitute(f, s) for f in self.suc))

    def __str__(self) -> str:
        return render_sequent(self)


def render_sequent(s: Sequent) -> str:
    left = ", ".join(render(f) for f in s.ant)
    right = ", ".join(render(f) for f in s.suc)
    return f"{left} |- {right}".strip()


def active_params(x) -> set[Param]:
    return parameters_of(x, Kind.ACTIVE)


def _counter(fs) -> Counter:
    return Counter(_key(f) for f in fs)


def _rep(fs) -> dict:
    return {_key(f): f for f in fs}


def _expand(ctr: Counter, pool) -> list:
    rep = _rep(pool)
    return [rep[k] for k in sorted(ctr) for _ in range(ctr[k])]


# -- proof trees ------------------------------------------------------------

RULE_ARITY = {
    "ax": 0, "eq": 0, "link": 0, "thax": 0, "pa": 0,
    "wl": 1, "wr": 1, "cl": 1, "cr": 1,
    "andl": 1, "orr": 1, "impr": 1, "notl": 1, "notr": 1,
    "alll": 1, "allr": 1, "exl": 1, "exr": 1,
    "e": 1, "mvind": 1, "ind": 1,
    "andr": 2, "orl": 2, "impl": 2, "cut": 2,
}

SCHEMES = ("refl", "succ", "func", "pred")


@dataclass(frozen=True)
class Proof:
    rule: str
    conclusion: Sequent
    premises: tuple = ()
    formula: object = None      # principal, cut, or induction formula
    term: object = None         # witness or eigenvariable; induction target
    path: tuple | None = None   # rewrite position for the E rule
    scheme: str | None = None   # equational axiom scheme
    target: str | None = None   # link target symbol
    arg: object = None          # link numeric argument
    iargs: tuple = ()           # link internal arguments
    rargs: tuple = ()           # link individual arguments
    ivar: Param | None = None   # induction parameter
    inst: tuple = ()            # ((internal, term), ...) for mvind
    label: str | None = None    # theory axiom name
    span: object = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))

    def nodes(self) -> Iterator[tuple[tuple, "Proof"]]:
        """Pre-order traversal yielding (path, node)."""
        stack = [((), self)]
        while stack:
            path, node = stack.pop()
            yield path, node
            for i in reversed(range(len(node.premises))):
                stack.append((path + (i,), node.premises[i]))

    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    def count(self, rule: str) -> int:
        return sum(1 for _, n in self.nodes() if n.rule == rule)

    def at(self, path) -> "Proof":
        node = self
        for i in path:
            node = node.premises[i]
        return node

    def replace_at(self, path: tuple, new: "Proof") -> "Proof":
        if not path:
            return new
        ps = list(self.premises)
        ps[path[0]] = ps[path[0]].replace_at(path[1:], new)
        return replace(self, premises=tuple(ps))

    def formulas(self) -> tuple:
        out = []
        for _, n in self.nodes():
            out.extend(n.conclusion.formulas())
        return tuple(out)

    def _substitute(self, s):
        return substitute_proof(self, s)


def substitute_proof(p: Proof, s: Mapping) -> Proof:
    """Apply ``s`` throughout a proof, respecting parameters bound by induction."""
    s = dict(s)
    if not s:
        return p
    sub = lambda x: substitute(x, s) if x is not None else None  # noqa: E731
    if p.rule in ("mvind", "ind") and p.ivar is not None:
        bound = {p.ivar} | {m for m, _ in p.inst}
        inner = {k: v for k, v in s.items() if k not in bound}
        premises = tuple(substitute_proof(q, inner) for q in p.premises)
        formula = substitute(p.formula, inner) if p.formula is not None else None
        inst = tuple((m, sub(a)) for m, a in p.inst)
        return replace(p, conclusion=p.conclusion._substitute(s), premises=premises,
                       formula=formula, term=sub(p.term), inst=inst)
    return replace(
        p,
        conclusion=p.conclusion._substitute(s),
        premises=tuple(substitute_proof(q, s) for q in p.premises),
        formula=sub(p.formula),
        term=sub(p.term),
        arg=sub(p.arg),
        iargs=tuple(sub(a) for a in p.iargs),
        rargs=tuple(sub(a) for a in p.rargs),
    )


def end_sequent(tree: Proof) -> Sequent:
    return tree.conclusion


def map_nodes(p: Proof, fn: Callable[[Proof], Proof | None]) -> Proof:
    """Bottom-up rewrite; ``fn`` returns a replacement or None to keep the node."""
    premises = tuple(map_nodes(q, fn) for q in p.premises)
    changed = any(a is not b for a, b in zip(premises, p.premises))
    node = replace(p, premises=premises) if changed else p
    out = fn(node)
    return node if out is None else out


# -- violations and reports -------------------------------------------------


@dataclass(frozen=True)
class Violation:
    code: str
    path: tuple
    message: str
    span: object = field(default=None, compare=False)

    def as_dict(self) -> dict:
        d = {"code": self.code, "path": list(self.path), "message": self.message}
        if self.span is not None:
            d["span"] = list(self.span)
        return d


@dataclass(frozen=True)
class LinkSignature:
    """What a link to a component must conclude: es with its parameters abstracted."""

    symbol: str
    sequent: Sequent
    active: Param
    ints: tuple = ()
    ivars: tuple = ()

    def instance(self, arg, iargs=(), rargs=()) -> Sequent:
        if len(iargs) != len(self.ints) or len(rargs) != len(self.ivars):
            raise ValueError(
                f"link to {self.symbol} expects {len(self.ints)} internal and "
                f"{len(self.ivars)} individual arguments")
        s = {self.active: arg}
        s.update(zip(self.ints, iargs))
        s.update(zip(self.ivars, rargs))
        return substitute(self.sequent, s)


@dataclass
class CheckOptions:
    allow_links: bool = True
    allow_mvind: bool = True
    allow_ind: bool = False
    links: Mapping[str, LinkSignature] | None = None
    axioms: tuple | None = None      # sequents admissible as theory axioms
    pra: bool = False                # forbid active and internal parameters
    pa_axioms: EqTheory | None = None  # rules whose equations are admitted as axiom leaves
    fuel: int = DEFAULT_FUEL


@dataclass
class Report:
    valid: bool
    violations: list
    activity: str
    kind: str
    active: tuple = ()

    @property
    def codes(self) -> list[str]:
        return [v.code for v in self.violations]

    @property
    def classification(self) -> str:
        return f"{self.activity}, {self.kind}"

    def as_dict(self) -> dict:
        return {
            "valid": self.valid,
            "activity": self.activity,
            "kind": self.kind,
            "violations": [v.as_dict() for v in self.violations],
        }


class _Fail(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def _need(cond: bool, code: str, message):
    """Raise unless ``cond``; ``message`` may be a thunk so passing checks render nothing."""
    if not cond:
        raise _Fail(code, message() if callable(message) else message)


# -- formula-level checks ---------------------------------------------------


def quantifier_violations(f) -> list[str]:
    """Binders over active or internal parameters (forbidden everywhere)."""
    out = []
    match f:
        case ForAll(v, b) | Exists(v, b):
            if isinstance(v, Param) and v.kind is not Kind.PASSIVE:
                out.append(f"{render(f)} binds {v}")
            out.extend(quantifier_violations(b))
        case Not(b):
            out.extend(quantifier_violations(b))
        case And(l, r) | Or(l, r) | Implies(l, r):
            out.extend(quantifier_violations(l))
            out.extend(quantifier_violations(r))
    return out


def instance_of(body, var, target):
    """Return ``t`` with ``body{var<-t}`` alpha-equal to ``target``, else None.

    ``var`` maps to an unknown term; other symbols must agree literally.
    """
    found: dict = {}

    def walk(p, t, bound_p: dict, bound_t: dict) -> bool:
        if p == var and var not in bound_p:
            if var in found:
                return found[var] == t
            if free_symbols(t) & set(bound_t):
                return False
            found[var] = t
            return True
        if isinstance(p, (Param, Var)) and isinstance(t, (Param, Var)):
            if p in bound_p or t in bound_t:
                return bound_p.get(p) == bound_t.get(t) and bound_p.get(p) is not None
            return p == t
        if type(p) is not type(t):
            return False
        match p:
            case App(h, args):
                return h == t.head and len(args) == len(t.args) and all(
                    walk(a, b, bound_p, bound_t) for a, b in zip(args, t.args))
            case Atom(h, args):
                return h == t.pred and len(args) == len(t.args) and all(
                    walk(a, b, bound_p, bound_t) for a, b in zip(args, t.args))
            case ForAll(v, b) | Exists(v, b):
                lvl = len(bound_p)
                return walk(b, t.body, {**bound_p, v: lvl}, {**bound_t, t.var: lvl})
            case _:
                ks, kt = children(p), children(t)
                return len(ks) == len(kt) and all(walk(a, b, bound_p, bound_t) for a, b in zip(ks, kt))

    if not walk(body, target, {}, {}):
        return None
    return found.get(var, var)


# -- the checker ------------------------------------------------------------


class Checker:
    def __init__(self, theory: EqTheory = EMPTY, options: CheckOptions | None = None):
        self.theory = theory
        self.opt = options or CheckOptions()

    # single inference

    def check_inference(self, node: Proof) -> None:
        """Raise _Fail on the first violated side condition of ``node``."""
        rule = node.rule
        _need(rule in RULE_ARITY, "UnknownRule", lambda: f"unknown rule {rule}")
        _need(len(node.premises) == RULE_ARITY[rule], "BadArity",
              lambda: f"{rule} takes {RULE_ARITY[rule]} premises, got {len(node.premises)}")
        handler = getattr(self, f"_r_{rule}")
        handler(node, node.conclusion, [p.conclusion for p in node.premises])

    # leaves

    def _r_ax(self, node, c, _):
        _need(len(c.ant) == 1 and len(c.suc) == 1 and alpha_eq(c.ant[0], c.suc[0]),
              "BadAxiom", f"not an axiom: {c}")

    def _r_thax(self, node, c, _):
        _need(self.opt.axioms is not None, "TheoryAxiomNotAllowed", "theory axioms are not enabled")
        _need(any(c == a for a in self.opt.axioms), "BadAxiom",
              lambda: f"{c} is not among the admitted theory axioms")

    def _r_pa(self, node, c, _):
        th = self.opt.pa_axioms
        _need(th is not None, "TheoryAxiomNotAllowed", "equational axioms are not enabled")
        _need(not c.ant and len(c.suc) == 1 and self._is_eq(c.suc[0]), "BadAxiom",
              lambda: f"{c} is not an equation")
        l, r = c.suc[0].args
        _need(root_step(l, th) == r, "BadAxiom", lambda: f"{c} is not an instance of a {th.name} axiom")

    def _r_link(self, node, c, _):
        _need(self.opt.allow_links, "LinkNotAllowed", lambda: f"link to {node.target} in a link-free profile")
        table = self.opt.links
        if table is None:
            return
        _need(node.target in table, "UnknownLink", lambda: f"no component named {node.target}")
        sig = table[node.target]
        try:
            want = sig.instance(node.arg, node.iargs, node.rargs)
        except ValueError as e:
            raise _Fail("LinkMismatch", str(e))
        _need(want == c, "LinkMismatch", lambda: f"link {node.target} concludes {c}, expected {want}")

    def _r_eq(self, node, c, _):
        schemes = (node.scheme,) if node.scheme else SCHEMES
        _need(all(s in SCHEMES for s in schemes), "BadSchemeInstance", lambda: f"unknown scheme {node.scheme}")
        for s in schemes:
            if getattr(self, f"_scheme_{s}")(c):
                return
        raise _Fail("BadSchemeInstance", f"{c} is not an instance of {'/'.join(schemes)}")

    @staticmethod
    def _is_eq(f) -> bool:
        return isinstance(f, Atom) and f.pred == "=" and len(f.args) == 2

    def _scheme_refl(self, c) -> bool:
        return (not c.ant and len(c.suc) == 1 and self._is_eq(c.suc[0])
                and c.suc[0].args[0] == c.suc[0].args[1])

    @staticmethod
    def _covers(hyps, a, b) -> bool:
        return any(h.args in ((a, b), (b, a)) for h in hyps)

    def _pairs_justified(self, hyps, xs, ys) -> bool:
        """Every differing argument pair has a hypothesis, and every hypothesis is used."""
        if len(xs) != len(ys):
            return False
        pairs = [(x, y) for x, y in zip(xs, ys)]
        if not all(x == y or self._covers(hyps, x, y) for x, y in pairs):
            return False
        return all(any(h.args in ((x, y), (y, x)) for x, y in pairs) for h in hyps)

    def _scheme_succ(self, c) -> bool:
        if len(c.ant) != 1 or len(c.suc) != 1 or not all(map(self._is_eq, c.ant + c.suc)):
            return False
        l, r = c.suc[0].args
        if not (isinstance(l, App) and l.head == "s" and isinstance(r, App) and r.head == "s"):
            return False
        return c.ant[0].args in ((l.args[0], r.args[0]), (r.args[0], l.args[0]))

    def _scheme_func(self, c) -> bool:
        if len(c.suc) != 1 or not all(map(self._is_eq, c.ant + c.suc)):
            return False
        l, r = c.suc[0].args
        if not (isinstance(l, App) and isinstance(r, App) and l.head == r.head and is_defined(l.head)):
            return False
        return self._pairs_justified(c.ant, l.args, r.args)

    def _scheme_pred(self, c) -> bool:
        if len(c.suc) != 1 or not isinstance(c.suc[0], Atom):
            return False
        goal = c.suc[0]
        for i, cand in enumerate(c.ant):
            if not isinstance(cand, Atom) or cand.pred != goal.pred:
                continue
            hyps = c.ant[:i] + c.ant[i + 1:]
            if all(map(self._is_eq, hyps)) and self._pairs_justified(hyps, cand.args, goal.args):
                return True
        return False

    # unary structural and logical rules, via multiset differences

    @staticmethod
    def _diff(c: Sequent, p: Sequent):
        """(added_ant, added_suc, removed_ant, removed_suc) going from p up to c."""
        ca, cs, pa, ps = _counter(c.ant), _counter(c.suc), _counter(p.ant), _counter(p.suc)
        rep = _rep(c.ant + c.suc + p.ant + p.suc)
        expand = lambda ctr: sorted((rep[k] for k, n in ctr.items() for _ in range(n)), key=_key)  # noqa: E731
        return expand(ca - pa), expand(cs - ps), expand(pa - ca), expand(ps - cs)

    def _unary(self, c, p, *, add=((), ()), remove=((), ())):
        aa, as_, ra, rs = self._diff(c, p)
        want = (sorted(add[0], key=_key), sorted(add[1], key=_key),
                sorted(remove[0], key=_key), sorted(remove[1], key=_key))
        got = (aa, as_, ra, rs)
        return [_key(x) for grp in got for x in grp] == [_key(x) for grp in want for x in grp] and all(
            len(g) == len(w) for g, w in zip(got, want))

    def _principal(self, c: Sequent, p: Sequent, side: str, kind, node) -> list:
        aa, as_, _, _ = self._diff(c, p)
        pool = aa if side == "ant" else as_
        if node.formula is not None:
            pool = [f for f in pool if alpha_eq(f, node.formula)]
        cands = [f for f in pool if isinstance(f, kind)]
        _need(bool(cands), "PrincipalMismatch",
              lambda: f"no new {kind.__name__} formula in the {'antecedent' if side == 'ant' else 'succedent'}")
        return cands

    def _structural(self, c, p, side: str, weak: bool, node):
        aa, as_, ra, rs = self._diff(c, p)
        added, removed = (aa, ra) if side == "ant" else (as_, rs)
        other = (as_, rs) if side == "ant" else (aa, ra)
        _need(not other[0] and not other[1], "ContextMismatch", "the other side changed")
        if weak:
            _need(len(added) == 1 and not removed, "ContextMismatch", "weakening adds exactly one formula")
            if node.formula is not None:
                _need(alpha_eq(added[0], node.formula), "PrincipalMismatch", "weakened formula differs")
        else:
            _need(len(removed) == 1 and not added, "ContextMismatch", "contraction merges exactly two copies")
            f = removed[0]
            keys = _counter(c.ant if side == "ant" else c.suc)
            _need(keys[_key(f)] >= 1, "ContextMismatch", lambda: f"{render(f)} not kept by contraction")
            if node.formula is not None:
                _need(alpha_eq(f, node.formula), "PrincipalMismatch", "contracted formula differs")

    def _r_wl(self, node, c, ps):
        self._structural(c, ps[0], "ant", True, node)

    def _r_wr(self, node, c, ps):
        self._structural(c, ps[0], "suc", True, node)

    def _r_cl(self, node, c, ps):
        self._structural(c, ps[0], "ant", False, node)

    def _r_cr(self, node, c, ps):
        self._structural(c, ps[0], "suc", False, node)

    def _try(self, c, p, options) -> bool:
        return any(self._unary(c, p, add=a, remove=r) for a, r in options)

    def _r_andl(self, node, c, ps):
        p = ps[0]
        for f in self._principal(c, p, "ant", And, node):
            opts = [(((f,), ()), (aux, ())) for aux in ((f.left, f.right), (f.left,), (f.right,))]
            if self._try(c, p, opts):
                return
        raise _Fail("ContextMismatch", "conjunction left: premise does not match")

    def _r_orr(self, node, c, ps):
        p = ps[0]
        for f in self._principal(c, p, "suc", Or, node):
            opts = [(((), (f,)), ((), aux)) for aux in ((f.left, f.right), (f.left,), (f.right,))]
            if self._try(c, p, opts):
                return
        raise _Fail("ContextMismatch", "disjunction right: premise does not match")

    def _r_impr(self, node, c, ps):
        p = ps[0]
        for f in self._principal(c, p, "suc", Implies, node):
            if self._unary(c, p, add=((), (f,)), remove=((f.left,), (f.right,))):
                return
        raise _Fail("ContextMismatch", "implication right: premise does not match")

    def _r_notl(self, node, c, ps):
        p = ps[0]
        for f in self._principal(c, p, "ant", Not, node):
            if self._unary(c, p, add=((f,), ()), remove=((), (f.body,))):
                return
        raise _Fail("ContextMismatch", "negation left: premise does not match")

    def _r_notr(self, node, c, ps):
        p = ps[0]
        for f in self._principal(c, p, "suc", Not, node):
            if self._unary(c, p, add=((), (f,)), remove=((f.body,), ())):
                return
        raise _Fail("ContextMismatch", "negation right: premise does not match")

    # quantifiers

    def _quant(self, node, c, p, side: str, kind, eigen: bool):
        cands = self._principal(c, p, side, kind, node)
        _, _, ra, rs = self._diff(c, p)
        removed = ra if side == "ant" else rs
        for f in cands:
            for aux in removed:
                t = instance_of(f.body, f.var, aux)
                if t is None:
                    continue
                vacuous = not occurs_var(f.var, f.body)
                if vacuous:
                    t = node.term
                elif node.term is not None and t != node.term:
                    continue
                add = ((f,), ()) if side == "ant" else ((), (f,))
                rem = ((aux,), ()) if side == "ant" else ((), (aux,))
                if not self._unary(c, p, add=add, remove=rem):
                    continue
                if t is not None:
                    self._witness_ok(f.var, t, c, eigen)
                return
        raise _Fail("ContextMismatch", f"{'eigenvariable' if eigen else 'witness'} rule premise does not match")

    def _witness_ok(self, var, t, c, eigen: bool):
        want = Sort.OMEGA if isinstance(var, Param) else Sort.IOTA
        _need(sort_of(t, self.theory.signature) is want, "SortMismatch",
              lambda: f"{render(t)} does not have the sort of {var}")
        if not eigen:
            return
        _need(isinstance(t, (Param, Var)), "EigenvariableCaptured", lambda: f"eigenvariable {render(t)} is not a variable")
        if isinstance(t, Param):
            _need(t.kind is Kind.PASSIVE, "ActiveQuantified", lambda: f"eigenvariable {t} is not passive")
        _need(t not in free_symbols(c), "EigenvariableCaptured", lambda: f"eigenvariable {t} occurs in the conclusion")

    def _r_alll(self, node, c, ps):
        self._quant(node, c, ps[0], "ant", ForAll, False)

    def _r_exr(self, node, c, ps):
        self._quant(node, c, ps[0], "suc", Exists, False)

    def _r_allr(self, node, c, ps):
        self._quant(node, c, ps[0], "suc", ForAll, True)

    def _r_exl(self, node, c, ps):
        self._quant(node, c, ps[0], "ant", Exists, True)

    # the E rule

    def _r_e(self, node, c, ps):
        aa, as_, ra, rs = self._diff(c, ps[0])
        if not aa and not as_ and not ra and not rs:
            return  # rewrite inside a duplicated formula is invisible to multisets
        _need((len(aa), len(ra), len(as_), len(rs)) in ((1, 1, 0, 0), (0, 0, 1, 1)), "ContextMismatch",
              "the E rule rewrites exactly one formula")
        new, old = (aa[0], ra[0]) if aa else (as_[0], rs[0])
        if node.path is not None:
            try:
                a, b = subterm_at(new, node.path), subterm_at(old, node.path)
            except IndexError:
                raise _Fail("NotJoinable", f"position {node.path} is not in {render(new)}")
            if replace_at(new, node.path, b) != old:
                raise _Fail("NotJoinable", f"{render(old)} and {render(new)} differ outside position {node.path}")
            if root_step(a, self.theory) != b and root_step(b, self.theory) != a:
                raise _Fail("NotJoinable", f"{render(a)} and {render(b)} are not one rewrite step apart")
            return
        try:
            ok = joinable(new, old, self.theory, self.opt.fuel)
        except FuelExhausted as e:
            raise _Fail("FuelExhausted", str(e))
        if not ok:
            raise _Fail("NotJoinable", f"{render(old)} and {render(new)} have different normal forms")

    # binary rules

    @staticmethod
    def _minus(fs, remove) -> Counter | None:
        ctr = _counter(fs)
        for f in remove:
            k = _key(f)
            if ctr[k] < 1:
                return None
            ctr[k] -= 1
        return +ctr

    def _binary(self, c, p1, p2, principal, aux1, aux2) -> str | None:
        """None on success, else the violation code."""
        l1a, l1s = self._minus(p1.ant, aux1[0]), self._minus(p1.suc, aux1[1])
        l2a, l2s = self._minus(p2.ant, aux2[0]), self._minus(p2.suc, aux2[1])
        if None in (l1a, l1s, l2a, l2s):
            return "PrincipalMismatch"
        ta, ts = self._minus(c.ant, principal[0]), self._minus(c.suc, principal[1])
        if ta is None or ts is None:
            return "PrincipalMismatch"
        if (ta, ts) == (l1a + l2a, l1s + l2s):
            return None
        if (ta, ts) == (l1a, l1s) == (l2a, l2s):
            return None
        return "ContextMismatch"

    def _binary_search(self, cands, build, what: str):
        code = "PrincipalMismatch"
        for f in cands:
            res = build(f)
            if res is None:
                return
            if res == "ContextMismatch":
                code = res
        raise _Fail(code, f"{what}: premises do not match the conclusion")

    def _r_cut(self, node, c, ps):
        p1, p2 = ps
        if node.formula is not None:
            cands = [node.formula]
        else:
            right = _rep(p2.ant)
            cands = [f for k, f in sorted(_rep(p1.suc).items()) if k in right]
        _need(bool(cands), "PrincipalMismatch", "no cut formula common to both premises")
        self._binary_search(cands, lambda f: self._binary(c, p1, p2, ((), ()), ((), (f,)), ((f,), ())), "cut")

    def _binary_principal(self, node, c, side, kind):
        pool = c.ant if side == "ant" else c.suc
        cands = [f for f in pool if isinstance(f, kind)]
        if node.formula is not None:
            cands = [f for f in cands if alpha_eq(f, node.formula)]
        _need(bool(cands), "PrincipalMismatch", lambda: f"no {kind.__name__} formula in the conclusion")
        return sorted(cands, key=_key)

    def _r_andr(self, node, c, ps):
        p1, p2 = ps
        cands = self._binary_principal(node, c, "suc", And)
        self._binary_search(cands, lambda f: self._binary(
            c, p1, p2, ((), (f,)), ((), (f.left,)), ((), (f.right,))), "conjunction right")

    def _r_orl(self, node, c, ps):
        p1, p2 = ps
        cands = self._binary_principal(node, c, "ant", Or)
        self._binary_search(cands, lambda f: self._binary(
            c, p1, p2, ((f,), ()), ((f.left,), ()), ((f.right,), ())), "disjunction left")

    def _r_impl(self, node, c, ps):
        p1, p2 = ps
        cands = self._binary_principal(node, c, "ant", Implies)
        self._binary_search(cands, lambda f: self._binary(
            c, p1, p2, ((f,), ()), ((), (f.left,)), ((f.right,), ())), "implication left")

    # induction

    def _induction(self, node, c, p, multi: bool):
        _need(node.formula is not None and node.ivar is not None and node.term is not None,
              "BadInduction", "induction needs its formula, parameter and target term")
        n, F, t = node.ivar, node.formula, node.term
        inst = dict(node.inst)
        if multi:
            _need(n.kind is Kind.ACTIVE, "BadInduction", lambda: f"mvIND parameter {n} must be active")
            _need(all(m.kind is Kind.INTERNAL for m in inst), "BadInduction",
                  "mvIND instantiates internal parameters only")
        else:
            _need(n.kind is Kind.PASSIVE and not inst, "BadInduction",
                  lambda: f"IND needs a passive eigenvariable and no instantiation, got {n}")
        _need(sort_of(t, self.theory.signature) is Sort.OMEGA, "SortMismatch", lambda: f"{render(t)} is not numeric")
        lo = substitute(F, {n: ZERO, **inst})
        hi = substitute(F, {n: t, **inst})
        pre_lo, pre_hi = F, substitute(F, {n: succ(n)})
        ctx_a = self._minus(c.ant, (lo,))
        ctx_s = self._minus(c.suc, (hi,))
        _need(ctx_a is not None and ctx_s is not None, "PrincipalMismatch",
              lambda: f"conclusion lacks {render(lo)} |- {render(hi)}")
        pa, ps_ = self._minus(p.ant, (pre_lo,)), self._minus(p.suc, (pre_hi,))
        _need(pa is not None and ps_ is not None, "PrincipalMismatch",
              lambda: f"premise lacks {render(pre_lo)} |- {render(pre_hi)}")
        _need((pa, ps_) == (ctx_a, ctx_s), "ContextMismatch", "induction premise and conclusion contexts differ")
        bound = {n} | set(inst)
        rest = Sequent(_expand(pa, p.ant), _expand(ps_, p.suc))
        clash = bound & free_symbols(rest)
        _need(not clash, "EigenvariableCaptured",
              lambda: f"induction parameters {', '.join(sorted(map(str, clash)))} occur in the context")

    def _r_mvind(self, node, c, ps):
        _need(self.opt.allow_mvind, "InductionNotAllowed", "mvIND is not enabled in this profile")
        self._induction(node, c, ps[0], True)

    def _r_ind(self, node, c, ps):
        _need(self.opt.allow_ind, "InductionNotAllowed", "IND is not enabled in this profile")
        self._induction(node, c, ps[0], False)

    # sequent-level conditions

    def sequent_violations(self, node: Proof) -> list[tuple[str, str]]:
        out = []
        seq = node.conclusion
        for f in seq.formulas():
            for msg in quantifier_violations(f):
                out.append(("ActiveQuantified", msg))
        kinds = params_by_kind(seq)
        if len(kinds[Kind.ACTIVE]) > 1:
            names = ", ".join(sorted(map(str, kinds[Kind.ACTIVE])))
            out.append(("MultipleActiveParams", f"sequent mentions active parameters {names}"))
        if self.opt.pra and (kinds[Kind.ACTIVE] or kinds[Kind.INTERNAL]):
            out.append(("NotPassiveOnly", f"{seq} has active or internal parameters"))
        if self.opt.pra and node.rule == "e":
            out.append(("NotEFree", "the E rule is not part of this profile"))
        return out

    # whole trees

    def check_derivation(self, tree: Proof) -> Report:
        violations: list[Violation] = []
        actives: set[Param] = set()
        for path, node in tree.nodes():
            actives |= active_params(node.conclusion)
            for code, msg in self.sequent_violations(node):
                violations.append(Violation(code, path, msg, node.span))
            try:
                self.check_inference(node)
            except _Fail as e:
                violations.append(Violation(e.code, path, str(e), node.span))
        if len(actives) > 1:
            names = ", ".join(sorted(map(str, actives)))
            violations.append(Violation("MultipleActiveParams", (), f"derivation uses active parameters {names}"))
        es = tree.conclusion
        kinds = params_by_kind(es)
        activity = "inactive" if not actives else "{" + ", ".join(sorted(p.name for p in actives)) + "}-active"
        kind = "derivation" if kinds[Kind.ACTIVE] or kinds[Kind.INTERNAL] else "proof"
        return Report(not violations, violations, activity, kind, tuple(sorted(actives, key=str)))


def occurs_var(v, f) -> bool:
    return v in free_symbols(f)


def check_inference(node: Proof, theory: EqTheory = EMPTY, fuel: int = DEFAULT_FUEL,
                    options: CheckOptions | None = None) -> Violation | None:
    opt = options or CheckOptions(fuel=fuel)
    try:
        Checker(theory, opt).check_inference(node)
    except _Fail as e:
        return Violation(e.code, (), str(e), node.span)
    return None


def check_derivation(tree: Proof, theory: EqTheory = EMPTY, *, allow_links: bool = True,
                     allow_mvind: bool = True, fuel: int = DEFAULT_FUEL, **kw) -> Report:
    opt = CheckOptions(allow_links=allow_links, allow_mvind=allow_mvind, fuel=fuel, **kw)
    return Checker(theory, opt).check_derivation(tree)


# -- small constructors used by passes and tests ----------------------------


def seq(ant=(), suc=()) -> Sequent:
    return Sequent(tuple(ant), tuple(suc))


def leaf(rule: str, conclusion: Sequent, **kw) -> Proof:
    return Proof(rule, conclusion, (), **kw)


def node(rule: str, conclusion: Sequent, *premises: Proof, **kw) -> Proof:
    return Proof(rule, conclusion, tuple(premises), **kw)
