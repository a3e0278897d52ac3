"""Components, linkability and P-schema validation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .calculus import (
    CheckOptions,
    Checker,
    LinkSignature,
    Proof,
    Sequent,
    Violation,
)
from .rewrite import DEFAULT_FUEL, EMPTY, EqTheory
from .terms import (
    App,
    Kind,
    Param,
    ZERO,
    is_numeral,
    parameters_of,
    render,
    substitute,
    succ,
    with_children,
    children,
    free_symbols,
)

NO_ACTIVE = Param("_", Kind.ACTIVE)


class SchemaError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class ShiftError(ValueError):
    pass


def unshift(expr, n: Param):
    """Invert ``{n <- s(n)}``: every ``s(n)`` becomes ``n``; a bare ``n`` is an error."""
    if expr == n:
        raise ShiftError(f"{n} occurs outside s({n})")
    if isinstance(expr, App) and expr.head == "s" and expr.args == (n,):
        return n
    if isinstance(expr, Sequent):
        return Sequent(tuple(unshift(f, n) for f in expr.ant), tuple(unshift(f, n) for f in expr.suc))
    kids = children(expr)
    if not kids:
        return expr
    return with_children(expr, tuple(unshift(k, n) for k in kids))


@dataclass(frozen=True)
class Component:
    """A proof symbol with its base derivation and step derivation.

    ``active`` is the recursion parameter.  A passive ``active`` (or None)
    marks a closing component whose step concludes its end-sequent unshifted
    and whose base concludes it at ``alpha``.
    """

    symbol: str
    base: Proof
    step: Proof
    active: Param | None = None
    ints: tuple = ()
    ivars: tuple = ()
    alpha: App = ZERO
    declared_es: Sequent | None = None
    span: object = field(default=None, compare=False, repr=False)

    @property
    def closing(self) -> bool:
        return self.active is None or self.active.kind is not Kind.ACTIVE

    def es(self) -> Sequent:
        if self.declared_es is not None:
            return self.declared_es
        if self.closing:
            return self.step.conclusion
        return unshift(self.step.conclusion, self.active)

    def base_instance(self) -> Sequent:
        if self.active is None:
            return self.es()
        return substitute(self.es(), {self.active: self.alpha})

    def step_instance(self) -> Sequent:
        if self.closing:
            return self.es()
        return substitute(self.es(), {self.active: succ(self.active)})

    def signature(self) -> LinkSignature:
        return LinkSignature(self.symbol, self.es(), self.active or NO_ACTIVE, tuple(self.ints), tuple(self.ivars))

    def links(self) -> Iterator[tuple[str, tuple, Proof]]:
        """(which, path, node) for every link leaf, which in {'base', 'step'}."""
        for which, tree in (("base", self.base), ("step", self.step)):
            for path, node in tree.nodes():
                if node.rule == "link":
                    yield which, path, node

    def formulas(self) -> tuple:
        return self.base.formulas() + self.step.formulas()


@dataclass
class PSchema:
    components: tuple
    order: tuple = ()
    passive: frozenset | None = None
    theory: EqTheory = EMPTY
    pa_axioms: EqTheory | None = None

    def __post_init__(self):
        self.components = tuple(self.components)
        self.order = tuple(self.order)

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, symbol: str) -> Component:
        for c in self.components:
            if c.symbol == symbol:
                return c
        raise KeyError(symbol)

    @property
    def symbols(self) -> list[str]:
        return [c.symbol for c in self.components]

    @property
    def main(self) -> Component:
        return self.components[0]

    def es(self) -> Sequent:
        return self.main.es()

    def link_table(self) -> dict[str, LinkSignature]:
        table = {}
        for c in self.components:
            try:
                table.setdefault(c.symbol, c.signature())
            except ShiftError:
                pass
        return table

    def namespace(self) -> frozenset:
        if self.passive is not None:
            return frozenset(self.passive)
        return frozenset().union(*(parameters_of(c, Kind.PASSIVE) for c in self.components))


# -- order helpers ------------------------------------------------------------


def closure(edges, nodes) -> dict[str, set[str]]:
    """Transitive closure as successor sets."""
    succ_: dict[str, set[str]] = {v: set() for v in nodes}
    for a, b in edges:
        succ_.setdefault(a, set()).add(b)
        succ_.setdefault(b, set())
    out = {}
    for v in succ_:
        seen, stack = set(), list(succ_[v])
        while stack:
            w = stack.pop()
            if w not in seen:
                seen.add(w)
                stack.extend(succ_.get(w, ()))
        out[v] = seen
    return out


def find_cycle(edges, nodes) -> list[str] | None:
    graph: dict[str, list[str]] = {v: [] for v in nodes}
    for a, b in edges:
        graph.setdefault(a, []).append(b)
        graph.setdefault(b, [])
    color = {v: 0 for v in graph}
    parent: dict[str, str] = {}
    for root in sorted(graph):
        if color[root]:
            continue
        stack = [(root, iter(sorted(graph[root])))]
        color[root] = 1
        while stack:
            v, it = stack[-1]
            w = next(it, None)
            if w is None:
                color[v] = 2
                stack.pop()
            elif color[w] == 0:
                color[w] = 1
                parent[w] = v
                stack.append((w, iter(sorted(graph[w]))))
            elif color[w] == 1:
                cyc = [v]
                while cyc[-1] != w:
                    cyc.append(parent[cyc[-1]])
                return list(reversed(cyc)) + [w]
    return None


def cross_links(psi: PSchema) -> list[tuple[str, str]]:
    out = []
    for c in psi.components:
        for _, _, node in c.links():
            if node.target != c.symbol:
                out.append((c.symbol, node.target))
    return sorted(set(out))


# -- linkability --------------------------------------------------------------


@dataclass
class LinkVerdict:
    kind: str  # none | linkable | strictly-linkable
    diagnostics: list = field(default_factory=list)

    def __str__(self) -> str:
        return self.kind


def linkable(c: Component, d: Component) -> LinkVerdict:
    if c.symbol == d.symbol:
        raise ValueError("linkability relates distinct components")
    es_d = parameters_of(d.es(), Kind.PASSIVE)
    found = False
    diags = []
    for which, path, node in c.links():
        if node.target != d.symbol:
            continue
        found = True
        missing = es_d - parameters_of(node.conclusion, Kind.PASSIVE)
        if missing:
            names = ", ".join(sorted(map(str, missing)))
            diags.append(f"{c.symbol}.{which}{list(path)}: link sequent lacks {names} from es({d.symbol})")
    if not found or diags:
        return LinkVerdict("none", diags)
    if es_d <= parameters_of(c.es(), Kind.PASSIVE):
        return LinkVerdict("strictly-linkable")
    return LinkVerdict("linkable")


# -- validation ----------------------------------------------------------------


@dataclass
class SchemaReport:
    valid: bool
    violations: list
    strict: bool = False
    complete: bool = False
    components: int = 0

    @property
    def codes(self) -> list[str]:
        return [v.code for v in self.violations]

    @property
    def classification(self) -> str:
        if not self.valid:
            return "invalid"
        return "strict" if self.strict else "complete" if self.complete else "general"

    def summary(self) -> str:
        if not self.valid:
            return f"invalid P-schema, {len(self.violations)} violation(s)"
        label = "complete" if self.complete else "general"
        return f"valid, {label} P-schema, {self.components} components"

    def as_dict(self) -> dict:
        return {
            "valid": self.valid,
            "classification": self.classification,
            "strict": self.strict,
            "complete": self.complete,
            "components": self.components,
            "violations": [v.as_dict() for v in self.violations],
        }


def _v(code: str, where: tuple, message: str, span=None) -> Violation:
    return Violation(code, where, message, span)


def _check_component(c: Component, psi: PSchema, table, fuel: int, out: list) -> None:
    sym = c.symbol
    if c.active is not None and c.active.kind is Kind.INTERNAL:
        out.append(_v("ParameterDiscipline", (sym,), f"{sym}: recursion parameter {c.active} is internal", c.span))
        return
    try:
        es = c.es()
    except ShiftError as e:
        out.append(_v("MissingInductivePair", (sym, "step"),
                      f"{sym}: step does not conclude an instance at s({c.active}): {e}", c.span))
        return
    actives = parameters_of(es, Kind.ACTIVE)
    if c.closing:
        if actives:
            out.append(_v("ParameterDiscipline", (sym,), f"{sym}: closing component with active {sorted(map(str, actives))}", c.span))
    else:
        if actives != {c.active}:
            out.append(_v("ParameterDiscipline", (sym,),
                          f"{sym}: end-sequent must have exactly the active parameter {c.active}", c.span))
    stray = parameters_of(es, Kind.INTERNAL) - set(c.ints)
    if stray:
        out.append(_v("ParameterDiscipline", (sym,),
                      f"{sym}: undeclared internal parameters {sorted(map(str, stray))}", c.span))
    if not is_numeral(c.alpha):
        out.append(_v("MissingInductivePair", (sym,), f"{sym}: base instance {render(c.alpha)} is not ground", c.span))

    checker = Checker(psi.theory, CheckOptions(allow_links=True, allow_mvind=False, links=table, fuel=fuel,
                                               pa_axioms=psi.pa_axioms))
    for which, tree, want in (("base", c.base, c.base_instance()), ("step", c.step, c.step_instance())):
        rep = checker.check_derivation(tree)
        for v in rep.violations:
            out.append(_v(v.code, (sym, which) + v.path, f"{sym}.{which}: {v.message}", v.span))
        if tree.conclusion != want:
            out.append(_v("MissingInductivePair", (sym, which),
                          f"{sym}.{which} concludes {tree.conclusion}, expected {want}", tree.span))
        allowed = set() if (which == "base" or c.closing) else {c.active}
        extra = set(rep.active) - allowed
        if extra:
            out.append(_v("ParameterDiscipline", (sym, which),
                          f"{sym}.{which} mentions active {sorted(map(str, extra))}", tree.span))

    ns = psi.namespace()
    loose = parameters_of(c, Kind.PASSIVE) - ns
    if loose:
        out.append(_v("ParameterDiscipline", (sym,),
                      f"{sym}: passive parameters {sorted(map(str, loose))} outside the namespace", c.span))

    for which, path, node in c.links():
        if node.target != sym:
            continue
        if which == "base" or c.closing:
            out.append(_v("CyclicLinks", (sym, which) + path, f"{sym}.{which} links to itself", node.span))
        elif node.arg != c.active:
            out.append(_v("CyclicLinks", (sym, which) + path,
                          f"{sym}: self-link argument {render(node.arg)} is not a proper subterm of s({c.active})",
                          node.span))


def validate_schema(psi: PSchema, fuel: int = DEFAULT_FUEL) -> SchemaReport:
    out: list[Violation] = []
    if not psi.components:
        return SchemaReport(False, [_v("EmptySchema", (), "the schema has no components")])
    seen: set[str] = set()
    for c in psi.components:
        if c.symbol in seen:
            out.append(_v("SymbolClash", (c.symbol,), f"component symbol {c.symbol} is declared twice", c.span))
        seen.add(c.symbol)
    table = psi.link_table()
    for c in psi.components:
        _check_component(c, psi, table, fuel, out)

    syms = psi.symbols
    for a, b in psi.order:
        for s in (a, b):
            if s not in seen:
                out.append(_v("OrderViolation", (), f"order mentions unknown component {s}"))
    links = cross_links(psi)
    cyc = find_cycle(links, syms)
    if cyc:
        out.append(_v("CyclicLinks", (), "links form a cycle: " + " -> ".join(cyc)))
    ocyc = find_cycle(psi.order, syms)
    if ocyc:
        out.append(_v("CyclicLinks", (), "declared order is cyclic: " + " < ".join(ocyc)))
    below = closure(psi.order, syms)
    for a, b in links:
        if b in seen and b not in below.get(a, set()):
            out.append(_v("OrderViolation", (a,), f"{a} links to {b} but {a} < {b} is not declared"))
    for a, b in links:
        if b in seen:
            verdict = linkable(psi[a], psi[b])
            if verdict.kind == "none":
                for d in verdict.diagnostics:
                    out.append(_v("OrderViolation", (a,), f"{a} < {b} is not linkable: {d}"))
    first = psi.main.symbol
    for s in syms[1:]:
        if s != first and s not in below.get(first, set()):
            out.append(_v("OrderViolation", (s,), f"{first} is not below {s} in the declared order"))

    valid = not out
    rep = SchemaReport(valid, out, components=len(psi.components))
    if valid:
        subs = sub_schemata(psi)
        rep.complete = not any(s.computational for s in subs.accepted)
        rep.strict = rep.complete and is_strict(psi)
    return rep


def is_strict(psi: PSchema) -> bool:
    es_p = parameters_of(psi.es(), Kind.PASSIVE)
    if any(not parameters_of(c, Kind.PASSIVE) <= es_p for c in psi.components):
        return False
    for a, b in cross_links(psi):
        if linkable(psi[a], psi[b]).kind != "strictly-linkable":
            return False
    return True


# -- sub-schemata ----------------------------------------------------------------


@dataclass
class SubSchema:
    members: tuple
    ok: bool
    computational: bool
    reasons: list = field(default_factory=list)


@dataclass
class SubSchemaReport:
    candidates: list

    @property
    def accepted(self) -> list[SubSchema]:
        return [s for s in self.candidates if s.ok]

    def as_dict(self) -> dict:
        return {"sub_schemata": [
            {"members": list(s.members), "ok": s.ok, "computational": s.computational, "reasons": s.reasons}
            for s in self.candidates]}


def sub_schemata(psi: PSchema) -> SubSchemaReport:
    """Check every link-closed subset with a least element against the two conditions."""
    syms = psi.symbols
    below = closure(psi.order + tuple(cross_links(psi)), syms)
    cands = []
    seen = set()
    for root in syms:
        members = tuple(s for s in syms if s == root or s in below[root])
        if members in seen:
            continue
        seen.add(members)
        cands.append(_judge(psi, members))
    return SubSchemaReport(cands)


def _judge(psi: PSchema, members: tuple) -> SubSchema:
    inside = set(members)
    outside = [c for c in psi.components if c.symbol not in inside]
    act_out = set().union(*(parameters_of(c.es(), Kind.ACTIVE) for c in outside)) if outside else set()
    act_in = set().union(*(parameters_of(psi[s].es(), Kind.ACTIVE) for s in members))
    es_p = parameters_of(psi.es(), Kind.PASSIVE)
    reasons = []
    if act_out & act_in:
        reasons.append("(1) shares active parameters " + ", ".join(sorted(map(str, act_out & act_in))))
    computational = False
    for c in outside:
        for which, path, node in c.links():
            if node.target not in inside:
                continue
            t = node.arg
            where = f"{c.symbol}.{which}{list(path)} -> {node.target}({render(t)})"
            if parameters_of(t, Kind.ACTIVE) & act_out:
                reasons.append(f"(2) {where}: argument shares an active parameter with the rest")
            if parameters_of(t, Kind.PASSIVE) & es_p:
                reasons.append(f"(2) {where}: argument mentions a passive parameter of the end-sequent")
            if parameters_of(t, Kind.INTERNAL):
                reasons.append(f"(2) {where}: argument has internal parameters")
            if free_symbols(t):
                computational = True
    ok = not reasons
    return SubSchema(members, ok, ok and computational, reasons)
