"""Unfolding P-schemata into ordinary proofs by rewriting links."""

from __future__ import annotations

import random
import sys
from dataclasses import dataclass, field, replace

from . import build as B
from .calculus import Proof, Report, Sequent, Violation, check_derivation, substitute_proof
from .rewrite import DEFAULT_FUEL, FuelExhausted, normalize
from .schema import Component, PSchema, sub_schemata, validate_schema
from .terms import App, Kind, is_numeral, numeral, parameters_of, render, substitute, succ, value_of


class EvaluationError(Exception):
    code = "EvaluationError"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code:
            self.code = code


class StuckLink(EvaluationError):
    code = "StuckLink"


class EmptySchema(EvaluationError):
    code = "EmptySchema"


@dataclass(frozen=True)
class LinkRule:
    """``symbol(lhs args) -> proof``: one half of a component read as a rewrite rule."""

    symbol: str
    which: str
    lhs: App
    proof: Proof

    def __str__(self) -> str:
        return f"{render(self.lhs)} -> {self.which} of {self.symbol} ({self.proof.size()} nodes)"


def link_rules(psi: PSchema) -> list[LinkRule]:
    if not psi.components:
        raise EmptySchema("the schema has no components")
    out = []
    for c in psi.components:
        rest = tuple(c.ints) + tuple(c.ivars)
        if c.active is None:
            out.append(LinkRule(c.symbol, "step", App(c.symbol, rest), c.step))
            continue
        out.append(LinkRule(c.symbol, "base", App(c.symbol, (c.alpha,) + rest), c.base))
        step_arg = c.active if c.closing else succ(c.active)
        out.append(LinkRule(c.symbol, "step", App(c.symbol, (step_arg,) + rest), c.step))
    return out


@dataclass
class UnfoldReport:
    proof: Proof
    instance: Sequent
    steps: int
    theory_axioms: tuple = ()
    computational: tuple = ()
    sigma: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.proof.size()

    def as_dict(self) -> dict:
        return {
            "instance": str(self.instance),
            "steps": self.steps,
            "size": self.size,
            "theory_axioms": [str(s) for s in self.theory_axioms],
            "computational": [list(m) for m in self.computational],
            "sigma": {str(k): render(v) for k, v in self.sigma.items()},
        }


def instance(psi: PSchema, sigma: dict) -> Sequent:
    return substitute(psi.es(), sigma)


def _ground_numeral(t, theory, fuel: int) -> int | None:
    v = normalize(t, theory, fuel)
    return value_of(v) if is_numeral(v) else None


class _Unfolder:
    def __init__(self, psi: PSchema, sigma: dict, fuel: int, cut_off: list, seed: int | None):
        self.psi = psi
        self.sigma = sigma
        self.fuel = fuel
        self.cut_off = cut_off
        self.rng = random.Random(seed) if seed is not None else None
        self.memo: dict = {}
        self.steps = 0
        self.axioms: dict = {}
        self.comps = {c.symbol: self._instantiate(c) for c in psi.components}

    def _instantiate(self, c: Component) -> Component:
        s = {p: v for p, v in self.sigma.items() if p != c.active}
        return replace(c, base=substitute_proof(c.base, s), step=substitute_proof(c.step, s))

    def _tick(self):
        self.steps += 1
        if self.steps > self.fuel:
            raise FuelExhausted(f"unfolding needs more than {self.fuel} link expansions")

    def top(self) -> Proof:
        c = self.comps[self.psi.main.symbol]
        if c.active is None:
            tree = c.step
        else:
            v = _ground_numeral(self.sigma[c.active], self.psi.theory, self.fuel)
            tree = self._pick(c, v, (), ())
        return self.resolve(tree, c.symbol)

    def _pick(self, c: Component, v: int, iargs, rargs) -> Proof:
        s = dict(zip(c.ints, iargs))
        s.update(zip(c.ivars, rargs))
        a0 = value_of(c.alpha)
        if c.active is None:
            tree = c.step
        elif v == a0:
            tree = c.base
        elif v > a0:
            tree = c.step
            s[c.active] = numeral(v) if c.closing else numeral(v - 1)
        else:
            raise StuckLink(f"{c.symbol}({v}) matches neither the base at {a0} nor the step")
        return substitute_proof(tree, s)

    def _barrier(self, source: str, target: str) -> bool:
        return any(target in members and source not in members for members in self.cut_off)

    def expand(self, target: str, v: int, iargs, rargs) -> Proof:
        key = (target, v, tuple(map(render, iargs)), tuple(map(render, rargs)))
        if key in self.memo:
            return self.memo[key]
        self._tick()
        c = self.comps[target]
        out = self.resolve(self._pick(c, v, iargs, rargs), target)
        self.memo[key] = out
        return out

    def resolve(self, tree: Proof, owner: str) -> Proof:
        paths = [p for p, nd in tree.nodes() if nd.rule == "link"]
        if self.rng is not None:
            self.rng.shuffle(paths)
        for path in paths:
            tree = tree.replace_at(path, self._replace(tree.at(path), owner))
        return tree

    def _replace(self, lk: Proof, owner: str) -> Proof:
        if self._barrier(owner, lk.target):
            self.axioms.setdefault(lk.conclusion, None)
            return B.thax(lk.conclusion, label=lk.target)
        if lk.target not in self.comps:
            raise StuckLink(f"link to unknown component {lk.target}")
        v = _ground_numeral(lk.arg, self.psi.theory, self.fuel)
        if v is None:
            raise StuckLink(f"link {lk.target}({render(lk.arg)}) has no numeral value")
        sub = self.expand(lk.target, v, lk.iargs, lk.rargs)
        if sub.conclusion == lk.conclusion:
            return sub
        return B.rewrite_to(sub, lk.conclusion, self.psi.theory)


def unfold(psi: PSchema, sigma: dict, *, fuel: int = DEFAULT_FUEL, expand_computational: bool = False,
           seed: int | None = None, check: bool = True) -> UnfoldReport:
    """Evaluate ``psi`` at the numerals ``sigma`` into a link-free proof."""
    if not psi.components:
        raise EmptySchema("the schema has no components")
    if check:
        rep = validate_schema(psi, fuel)
        if not rep.valid:
            raise EvaluationError("; ".join(v.message for v in rep.violations[:3]), "InvalidSchema")
    needed = parameters_of(psi.es(), Kind.PASSIVE)
    main = psi.main
    if main.active is not None and main.closing:
        needed = needed | {main.active}
    missing = needed - set(sigma)
    if missing:
        raise EvaluationError(f"no value for {', '.join(sorted(map(str, missing)))}", "MissingSubstitution")
    sig = {}
    for p, t in sigma.items():
        if p not in needed:
            continue
        v = _ground_numeral(t, psi.theory, fuel)
        if v is None:
            raise EvaluationError(f"{p} <- {render(t)} is not a numeral", "NotGround")
        sig[p] = numeral(v)
    comp = [] if expand_computational else [s.members for s in sub_schemata(psi).accepted if s.computational]
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 50_000))
    try:
        u = _Unfolder(psi, sig, fuel, comp, seed)
        tree = u.top()
    finally:
        sys.setrecursionlimit(old)
    return UnfoldReport(tree, instance(psi, sig), u.steps, tuple(u.axioms), tuple(comp), sig)


def _normal_key(s: Sequent, theory, fuel: int) -> Sequent:
    return Sequent(tuple(normalize(f, theory, fuel) for f in s.ant), tuple(normalize(f, theory, fuel) for f in s.suc))


def verify_unfolded(report: UnfoldReport, psi: PSchema, fuel: int = DEFAULT_FUEL) -> Report:
    """Re-check an unfolded proof from scratch and compare its end-sequent."""
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 50_000))
    try:
        rep = check_derivation(report.proof, psi.theory, allow_links=False, allow_mvind=False, fuel=fuel,
                               axioms=tuple(report.theory_axioms), pa_axioms=psi.pa_axioms)
        got = _normal_key(report.proof.conclusion, psi.theory, fuel)
        want = _normal_key(report.instance, psi.theory, fuel)
    finally:
        sys.setrecursionlimit(old)
    if got != want:
        rep.violations.append(Violation("EndSequentMismatch", (), f"proves {report.proof.conclusion}, "
                                                                  f"expected {report.instance}"))
        rep.valid = False
    return rep
