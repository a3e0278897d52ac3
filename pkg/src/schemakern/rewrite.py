"""Equational theories as left-to-right rewrite systems.

Rules have the shape ``^f(t1..tk) -> rhs`` where the ``ti`` contain no defined
symbols.  Every parameter or individual variable in a left-hand side is a
pattern variable.  Reduction is leftmost-innermost.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

from .terms import (
    App,
    Atom,
    Kind,
    Param,
    Sort,
    Var,
    alpha_eq,
    canonical,
    children,
    free_symbols,
    is_defined,
    is_term,
    numeral,
    render,
    sort_of,
    substitute,
    with_children,
)

DEFAULT_FUEL = 10_000


class RewriteError(Exception):
    pass


class FuelExhausted(RewriteError):
    pass


class BadRule(RewriteError):
    pass


@dataclass(frozen=True)
class RewriteRule:
    lhs: App | Atom
    rhs: object

    def __post_init__(self):
        head = self.lhs.head if isinstance(self.lhs, App) else self.lhs.pred
        if not is_defined(head):
            raise BadRule(f"rule head {head} is not a defined symbol")
        for a in self.lhs.args:
            if _mentions_defined(a):
                raise BadRule(f"argument {render(a)} of {render(self.lhs)} contains a defined symbol")
        extra = free_symbols(self.rhs) - free_symbols(self.lhs)
        if extra:
            names = ", ".join(sorted(str(x) for x in extra))
            raise BadRule(f"rhs of {render(self.lhs)} has unbound symbols {names}")
        if isinstance(self.lhs, App) != is_term(self.rhs):
            raise BadRule(f"rule {render(self.lhs)} mixes terms and formulas")

    @property
    def head(self) -> str:
        return self.lhs.head if isinstance(self.lhs, App) else self.lhs.pred

    def __str__(self) -> str:
        return f"{render(self.lhs)} -> {render(self.rhs)}"


def _mentions_defined(t) -> bool:
    if isinstance(t, App):
        return is_defined(t.head) or any(_mentions_defined(a) for a in t.args)
    return False


@dataclass
class EqTheory:
    name: str
    rules: tuple[RewriteRule, ...] = ()
    _index: dict = field(default_factory=dict, init=False, repr=False, compare=False)
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)
    _signature: dict | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        self.rules = tuple(self.rules)
        for r in self.rules:
            self._index.setdefault(r.head, []).append(r)

    def __hash__(self):
        return id(self)

    def rules_for(self, head: str) -> list[RewriteRule]:
        return self._index.get(head, [])

    @property
    def heads(self) -> set[str]:
        return set(self._index)

    @property
    def signature(self) -> dict[str, Sort]:
        """Result sorts of defined function symbols, inferred from right-hand sides."""
        if self._signature is None:
            sig: dict[str, Sort] = {}
            for _ in range(len(self.rules) + 1):
                changed = False
                for r in self.rules:
                    if isinstance(r.lhs, App):
                        srt = sort_of(r.rhs, sig)
                        if sig.get(r.head) != srt:
                            sig[r.head] = srt
                            changed = True
                if not changed:
                    break
            self._signature = sig
        return self._signature

    def extend(self, other: "EqTheory", name: str | None = None) -> "EqTheory":
        return EqTheory(name or f"{self.name}+{other.name}", self.rules + other.rules)


EMPTY = EqTheory("empty")


# -- matching ---------------------------------------------------------------


def match(pattern, target, binding: dict | None = None, signature=None) -> dict | None:
    """First-order matching; parameters only bind numeric terms."""
    binding = {} if binding is None else binding
    stack = [(pattern, target)]
    while stack:
        p, t = stack.pop()
        if isinstance(p, (Param, Var)):
            if p in binding:
                if binding[p] != t:
                    return None
                continue
            if not is_term(t):
                return None
            if isinstance(p, Param) and sort_of(t, signature) is not Sort.OMEGA:
                return None
            binding[p] = t
            continue
        if isinstance(p, App):
            if not isinstance(t, App) or t.head != p.head or len(t.args) != len(p.args):
                return None
        elif isinstance(p, Atom):
            if not isinstance(t, Atom) or t.pred != p.pred or len(t.args) != len(p.args):
                return None
        else:
            if p != t:
                return None
            continue
        stack.extend(zip(p.args, t.args))
    return binding


def root_step(expr, theory: EqTheory):
    """Rewrite ``expr`` at its root with the first matching rule, or None."""
    head = expr.head if isinstance(expr, App) else expr.pred if isinstance(expr, Atom) else None
    if head is None:
        return None
    for rule in theory.rules_for(head):
        b = match(rule.lhs, expr, signature=theory.signature)
        if b is not None:
            return substitute(rule.rhs, b)
    return None


def root_rule(expr, theory: EqTheory) -> RewriteRule | None:
    head = expr.head if isinstance(expr, App) else expr.pred if isinstance(expr, Atom) else None
    if head is None:
        return None
    for rule in theory.rules_for(head):
        if match(rule.lhs, expr, signature=theory.signature) is not None:
            return rule
    return None


# -- reduction --------------------------------------------------------------


def apply_rule_once(expr, theory: EqTheory):
    """One leftmost-innermost step, or None when ``expr`` is in normal form."""
    kids = children(expr)
    for i, k in enumerate(kids):
        r = apply_rule_once(k, theory)
        if r is not None:
            return with_children(expr, kids[:i] + (r,) + kids[i + 1:])
    return root_step(expr, theory)


def rewrite_step(expr, theory: EqTheory, path: tuple = ()) -> tuple[tuple, object] | None:
    """Like apply_rule_once, also reporting the position of the contracted redex."""
    kids = children(expr)
    for i, k in enumerate(kids):
        r = rewrite_step(k, theory, path + (i,))
        if r is not None:
            sub_path, new = r
            return sub_path, with_children(expr, kids[:i] + (new,) + kids[i + 1:])
    out = root_step(expr, theory)
    return None if out is None else (path, out)


def reduction_chain(expr, theory: EqTheory, fuel: int = DEFAULT_FUEL) -> list[tuple[tuple, object]]:
    """Successive (position, result) pairs of the leftmost-innermost reduction of ``expr``."""
    chain = []
    cur = expr
    while True:
        r = rewrite_step(cur, theory)
        if r is None:
            return chain
        if len(chain) >= fuel:
            raise FuelExhausted(f"no normal form within {fuel} steps")
        chain.append(r)
        cur = r[1]


def redex_positions(expr, path: tuple = ()) -> Iterable[tuple]:
    for i, k in enumerate(children(expr)):
        yield from redex_positions(k, path + (i,))
    yield path


class _Budget:
    __slots__ = ("left", "limit")

    def __init__(self, fuel: int):
        self.left = fuel
        self.limit = fuel

    def spend(self, n: int = 1):
        self.left -= n
        if self.left < 0:
            raise FuelExhausted(f"no normal form within {self.limit} steps")


def normalize(expr, theory: EqTheory, fuel: int = DEFAULT_FUEL):
    """Leftmost-innermost normal form, raising FuelExhausted past ``fuel`` steps."""
    if fuel < 1:
        raise ValueError("fuel must be positive")
    if not theory.rules:
        return expr
    budget = _Budget(fuel)
    return _nf(expr, theory, budget)[0]


def normalize_counting(expr, theory: EqTheory, fuel: int = DEFAULT_FUEL) -> tuple[object, int]:
    budget = _Budget(fuel)
    return _nf(expr, theory, budget)


def _nf(expr, theory: EqTheory, budget: _Budget) -> tuple[object, int]:
    cached = theory._cache.get(expr)
    if cached is not None:
        budget.spend(cached[1])
        return cached
    steps = 0
    kids = children(expr)
    if kids:
        new = []
        for k in kids:
            nk, n = _nf(k, theory, budget)
            steps += n
            new.append(nk)
        cur = with_children(expr, tuple(new))
    else:
        cur = expr
    nxt = root_step(cur, theory)
    if nxt is not None:
        budget.spend()
        res, n = _nf(nxt, theory, budget)
        steps += 1 + n
        cur = res
    theory._cache[expr] = (cur, steps)
    return cur, steps


def joinable(a, b, theory: EqTheory, fuel: int = DEFAULT_FUEL) -> bool:
    if alpha_eq(a, b):
        return True
    if is_term(a) != is_term(b):
        return False
    return canonical(normalize(a, theory, fuel)) == canonical(normalize(b, theory, fuel))


# -- overlap sanity check ---------------------------------------------------


def _rename(x, suffix: str):
    syms = free_symbols(x)
    ren = {}
    for s in syms:
        ren[s] = Param(s.name + suffix, s.kind) if isinstance(s, Param) else Var(s.name + suffix)
    return substitute(x, ren), ren


def unify(a, b) -> dict | None:
    """Syntactic most general unifier of two terms or atoms."""
    sub: dict = {}

    def walk(x):
        while isinstance(x, (Param, Var)) and x in sub:
            x = sub[x]
        return x

    def resolve(x):
        x = walk(x)
        if isinstance(x, (App, Atom)) and x.args:
            return with_children(x, tuple(resolve(y) for y in x.args))
        return x

    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x, y = walk(x), walk(y)
        if x == y:
            continue
        if isinstance(x, (Param, Var)):
            if x in free_symbols(resolve(y)):
                return None
            sub[x] = y
            continue
        if isinstance(y, (Param, Var)):
            stack.append((y, x))
            continue
        hx = (type(x), getattr(x, "head", getattr(x, "pred", None)), len(x.args))
        hy = (type(y), getattr(y, "head", getattr(y, "pred", None)), len(y.args))
        if hx != hy:
            return None
        stack.extend(zip(x.args, y.args))
    return {k: resolve(v) for k, v in sub.items()}


def critical_pair_report(theory: EqTheory, depth: int = 3, fuel: int = DEFAULT_FUEL) -> list[str]:
    """Root overlaps between rules whose ground instances fail to join.

    Remaining variables after unification are grounded with numerals up to
    ``depth`` (individual variables with a fresh constant).
    """
    problems = []
    rules = list(theory.rules)
    for i, r1 in enumerate(rules):
        for r2 in rules[i + 1:]:
            if r1.head != r2.head:
                continue
            l2, ren = _rename(r2.lhs, "'")
            mgu = unify(r1.lhs, l2)
            if mgu is None:
                continue
            rhs1 = substitute(r1.rhs, mgu)
            rhs2 = substitute(substitute(r2.rhs, ren), mgu)
            open_syms = sorted(free_symbols((rhs1, rhs2)), key=str)
            choices = [
                [numeral(k) for k in range(depth + 1)] if isinstance(s, Param) else [App("c")]
                for s in open_syms
            ]
            for combo in itertools.product(*choices):
                g = dict(zip(open_syms, combo))
                if not joinable(substitute(rhs1, g), substitute(rhs2, g), theory, fuel):
                    problems.append(f"{r1} / {r2} disagree at {render(substitute(r1.lhs, {**mgu}))}")
                    break
    return problems


# -- builtin theories -------------------------------------------------------

_x = Param("x", Kind.PASSIVE)
_y = Param("y", Kind.PASSIVE)


def _succ(t):
    return App("s", (t,))


def _add(a, b):
    return App("^a", (a, b))


def _mul(a, b):
    return App("^m", (a, b))


E_PA = EqTheory(
    "E_PA",
    (
        RewriteRule(_add(_succ(_x), _y), _succ(_add(_x, _y))),
        RewriteRule(_add(App("0"), _y), _y),
        RewriteRule(_mul(_succ(_x), _y), _add(_mul(_x, _y), _y)),
        RewriteRule(_mul(App("0"), _y), App("0")),
    ),
)

IT = EqTheory(
    "IT",
    (
        RewriteRule(App("^it", (App("0"),)), App("a")),
        RewriteRule(App("^it", (_succ(_x),)), App("f", (App("^it", (_x,)),))),
    ),
)


def iterated(pred: str) -> EqTheory:
    """Iterated disjunction ``^vee_P`` and conjunction ``^wedge_P`` over ``P``."""
    from .terms import And, Or

    vee, wedge = f"^vee_{pred}", f"^wedge_{pred}"
    zero = App("0")
    rules = (
        RewriteRule(Atom(vee, (zero,)), Atom(pred, (zero,))),
        RewriteRule(Atom(vee, (_succ(_y),)), Or(Atom(vee, (_y,)), Atom(pred, (_succ(_y),)))),
        RewriteRule(Atom(wedge, (zero,)), Atom(pred, (zero,))),
        RewriteRule(Atom(wedge, (_succ(_y),)), And(Atom(wedge, (_y,)), Atom(pred, (_succ(_y),)))),
    )
    return EqTheory(f"ITER_{pred}", rules)


def builtin(name: str) -> EqTheory:
    if name == "E_PA":
        return E_PA
    if name == "IT":
        return IT
    if name.startswith("ITER_") and len(name) > 5:
        return iterated(name[5:])
    raise KeyError(f"unknown builtin theory {name}")
