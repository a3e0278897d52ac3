"""Herbrand systems: witness terms of existential end-sequents as a rewrite system."""

from __future__ import annotations

from dataclasses import dataclass

from .calculus import Proof, _key
from .rewrite import DEFAULT_FUEL, EqTheory, RewriteRule, normalize
from .schema import Component, PSchema, validate_schema
from .sexpr import SList, Sym, SyntaxErr, read_all, span_of
from .terms import (
    And,
    App,
    Atom,
    Exists,
    Implies,
    Kind,
    Not,
    Or,
    Var,
    alpha_eq,
    is_quantifier_free,
    numeral,
    parameters_of,
    render,
    substitute,
    succ,
)

NIL = App("nil", ())
APPEND = "^append"
_h, _t, _y = Var("h"), Var("t"), Var("y")


def cons(h, t) -> App:
    return App("cons", (h, t))


def encode(items) -> App:
    out = NIL
    for x in reversed(list(items)):
        out = cons(x, out)
    return out


def append(a, b):
    if a == NIL:
        return b
    if b == NIL:
        return a
    return App(APPEND, (a, b))


APPEND_RULES = (
    RewriteRule(App(APPEND, (NIL, _y)), _y),
    RewriteRule(App(APPEND, (cons(_h, _t), _y)), cons(_h, App(APPEND, (_t, _y)))),
)


class HerbrandError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class HerbrandSystem:
    head: str
    params: tuple           # n_1 ... n_beta, in argument order
    variables: tuple        # x_1 ... x_alpha
    matrix: object          # quantifier-free F
    rules: tuple            # the W rules
    theory: EqTheory

    @property
    def rule_count(self) -> int:
        return len(self.rules)

    def system(self) -> EqTheory:
        return EqTheory(f"W[{self.head}]", tuple(self.rules) + APPEND_RULES + tuple(self.theory.rules))

    def rhs_size(self) -> int:
        return sum(_size(r.rhs) for r in self.rules)


def _size(t) -> int:
    return 1 + sum(_size(a) for a in getattr(t, "args", ()))


# -- shape of the end-sequent ---------------------------------------------------------


def split_prefix(f) -> tuple[tuple, object]:
    xs = []
    while isinstance(f, Exists):
        xs.append(f.var)
        f = f.body
    return tuple(xs), f


def _chain(nd: Proof, width: int) -> tuple:
    """Terms chosen for the ``width`` leading quantifiers introduced at ``nd`` and above it."""
    ws = [nd.term]
    aux = substitute(nd.formula.body, {nd.formula.var: nd.term})
    for _ in range(width - 1):
        inner = next((q for _, q in nd.nodes() if q.rule == "exr" and alpha_eq(q.formula, aux)), None)
        if inner is None:
            raise HerbrandError("WrongEndSequentShape", f"no introduction of {render(aux)} above")
        ws.append(inner.term)
        aux = substitute(aux.body, {aux.var: inner.term})
    return tuple(ws)


def _outermost(nd: Proof, width: int) -> bool:
    return nd.rule == "exr" and len(split_prefix(nd.formula)[0]) == width


def _collect(tree: Proof, width: int) -> list:
    """Witness lists of the full-prefix existential introductions, in pre-order."""
    return [_chain(nd, width) for _, nd in tree.nodes() if _outermost(nd, width)]


def harvest(tree: Proof, width: int, theory: EqTheory, fuel: int = DEFAULT_FUEL) -> list[tuple]:
    """Witness lists read off a proof, with every term E-normalized."""
    return [tuple(normalize(t, theory, fuel) for t in ws) for ws in _collect(tree, width)]


# -- extraction -------------------------------------------------------------------------


def _wname(sym: str) -> str:
    return f"^W_{sym}"


def _slots(c: Component) -> tuple:
    """Argument parameters of the W symbol for ``c``."""
    passives = parameters_of(c, Kind.PASSIVE)
    if c.closing:
        if c.active is not None:
            passives = passives | {c.active}
        return tuple(sorted(passives, key=str))
    return (c.active,) + tuple(c.ints) + tuple(sorted(passives - {c.active}, key=str))


class _Extractor:
    def __init__(self, psi: PSchema, width: int):
        self.psi = psi
        self.width = width
        self.slots = {c.symbol: _slots(c) for c in psi.components}

    def call(self, lk: Proof):
        d = self.psi[lk.target]
        slots = self.slots[d.symbol]
        s = dict(zip(d.ints, lk.iargs))
        if d.active is not None:
            s[d.active] = lk.arg
        return App(_wname(d.symbol), tuple(s.get(p, p) for p in slots))

    def rhs(self, tree: Proof):
        segs = []
        lists = []
        for _, nd in tree.nodes():
            if nd.rule == "link":
                if lists:
                    segs.append(encode(lists))
                    lists = []
                segs.append(self.call(nd))
            elif _outermost(nd, self.width):
                lists.append(encode(_chain(nd, self.width)))
        if lists:
            segs.append(encode(lists))
        out = NIL
        for seg in reversed(segs):
            out = append(seg, out)
        return out

    def rules(self, c: Component) -> list[RewriteRule]:
        head = _wname(c.symbol)
        slots = self.slots[c.symbol]
        if c.active is None:
            return [RewriteRule(App(head, slots), self.rhs(c.step))]
        i = slots.index(c.active)
        lo = slots[:i] + (c.alpha,) + slots[i + 1:]
        hi = slots[:i] + (succ(c.active),) + slots[i + 1:]
        step = c.step
        if c.closing:
            step = substitute(step, {c.active: succ(c.active)})
        return [RewriteRule(App(head, lo), self.rhs(c.base)), RewriteRule(App(head, hi), self.rhs(step))]


def _cut_formulas(nd: Proof) -> list:
    if nd.formula is not None:
        return [nd.formula]
    right = {_key(g) for g in nd.premises[1].conclusion.ant}
    return [f for f in nd.premises[0].conclusion.suc if _key(f) in right]


def extract_herbrand_system(psi: PSchema, fuel: int = DEFAULT_FUEL) -> HerbrandSystem:
    rep = validate_schema(psi, fuel)
    if not rep.valid:
        raise HerbrandError("InvalidSchema", rep.violations[0].message)
    if not rep.strict:
        raise HerbrandError("NotStrict", "Herbrand systems are extracted from strict schemata only")
    es = psi.es()
    if es.ant or len(es.suc) != 1:
        raise HerbrandError("WrongEndSequentShape", f"expected |- exists x. F, got {es}")
    xs, matrix = split_prefix(es.suc[0])
    if not xs:
        raise HerbrandError("WrongEndSequentShape", f"{render(es.suc[0])} has no existential prefix")
    if not is_quantifier_free(matrix):
        raise HerbrandError("WrongEndSequentShape", f"{render(matrix)} is not quantifier-free")
    for c in psi.components:
        for which, tree in (("base", c.base), ("step", c.step)):
            for path, nd in tree.nodes():
                if nd.rule != "cut":
                    continue
                for f in _cut_formulas(nd):
                    if not is_quantifier_free(f):
                        raise HerbrandError("QuantifiedCut", f"{c.symbol}.{which}{list(path)} cuts {render(f)}")
    ex = _Extractor(psi, len(xs))
    rules = []
    for c in psi.components:
        rules.extend(ex.rules(c))
    params = ex.slots[psi.main.symbol]
    return HerbrandSystem(_wname(psi.main.symbol), params, xs, matrix, tuple(rules), psi.theory)


# -- evaluation --------------------------------------------------------------------------


def decode(t) -> list[tuple]:
    """A constructor normal form ``cons(cons(t, ...), ...)`` as a list of term tuples."""
    def items(x, what):
        out = []
        while isinstance(x, App) and x.head == "cons" and len(x.args) == 2:
            out.append(x.args[0])
            x = x.args[1]
        if x != NIL:
            raise HerbrandError("NonConstructorNormalForm", f"{render(x)} is not a {what}")
        return out

    return [tuple(items(w, "witness list")) for w in items(t, "list of witness lists")]


def normalize_witnesses(h: HerbrandSystem, values, fuel: int = DEFAULT_FUEL) -> list[tuple]:
    values = tuple(values)
    if len(values) != len(h.params):
        raise HerbrandError("Arity", f"{h.head} takes {len(h.params)} arguments, got {len(values)}")
    goal = App(h.head, tuple(numeral(v) for v in values))
    return decode(normalize(goal, h.system(), fuel))


def herbrand_disjunction(h: HerbrandSystem, values, table) -> list:
    s0 = {p: numeral(v) for p, v in zip(h.params, values)}
    out = []
    for ws in table:
        if len(ws) != len(h.variables):
            raise HerbrandError("Arity", f"witness list of length {len(ws)} for {len(h.variables)} variables")
        out.append(substitute(h.matrix, {**s0, **dict(zip(h.variables, ws))}))
    return out


class _Classes:
    """Union-find with congruence closure over a fixed set of ground terms."""

    def __init__(self, terms):
        self.parent = {}
        self.terms = []
        for t in terms:
            self._add(t)

    def _add(self, t):
        if t in self.parent:
            return
        for a in getattr(t, "args", ()):
            self._add(a)
        self.parent[t] = t
        self.terms.append(t)

    def find(self, t):
        while self.parent[t] != t:
            self.parent[t] = self.parent[self.parent[t]]
            t = self.parent[t]
        return t

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        self.parent[ra] = rb
        self._close()

    def _close(self):
        changed = True
        while changed:
            changed = False
            sig = {}
            for t in self.terms:
                if not isinstance(t, App) or not t.args:
                    continue
                key = (t.head, tuple(self.find(a) for a in t.args))
                other = sig.setdefault(key, t)
                if self.find(other) != self.find(t):
                    self.parent[self.find(t)] = self.find(other)
                    changed = True


def _atoms(f, acc: dict):
    match f:
        case Atom():
            acc.setdefault(render(f), f)
        case Not(b):
            _atoms(b, acc)
        case And(l, r) | Or(l, r) | Implies(l, r):
            _atoms(l, acc)
            _atoms(r, acc)
        case _:
            raise HerbrandError("WrongEndSequentShape", f"{render(f)} is not quantifier-free")


def _value(f, v: dict):
    """Three-valued evaluation: True, False or None when undetermined."""
    match f:
        case Atom():
            return v.get(render(f))
        case Not(b):
            x = _value(b, v)
            return None if x is None else not x
        case And(l, r):
            a, b = _value(l, v), _value(r, v)
            if a is False or b is False:
                return False
            return None if a is None or b is None else True
        case Or(l, r):
            a, b = _value(l, v), _value(r, v)
            if a is True or b is True:
                return True
            return None if a is None or b is None else False
        case Implies(l, r):
            return _value(Or(Not(l), r), v)


def _consistent(atoms: dict, v: dict) -> bool:
    """Whether an assignment to ground atoms has a model of equality with free functions."""
    terms = [a for f in atoms.values() for a in f.args]
    cl = _Classes(terms)
    for k, f in atoms.items():
        if f.pred == "=" and v.get(k):
            cl.union(*f.args)
    for k, f in atoms.items():
        if f.pred == "=" and v.get(k) is False and cl.find(f.args[0]) == cl.find(f.args[1]):
            return False
    seen = {}
    for k, f in atoms.items():
        if f.pred == "=" or k not in v:
            continue
        key = (f.pred, tuple(cl.find(a) for a in f.args))
        if seen.setdefault(key, v[k]) != v[k]:
            return False
    return True


def valid_ground(formula) -> bool:
    """Decide validity of a ground quantifier-free formula modulo equality."""
    atoms: dict = {}
    _atoms(formula, atoms)
    names = sorted(atoms)

    def falsifiable(i: int, v: dict) -> bool:
        val = _value(formula, v)
        if val is True:
            return False
        if not _consistent(atoms, v):
            return False
        if i == len(names):
            return val is False
        for b in (False, True):
            v[names[i]] = b
            if falsifiable(i + 1, v):
                return True
            del v[names[i]]
        return False

    return not falsifiable(0, {})


def verify_herbrand_disjunction(h: HerbrandSystem, values, table, fuel: int = DEFAULT_FUEL) -> bool:
    disjuncts = herbrand_disjunction(h, values, table)
    if not disjuncts:
        return False
    disjuncts = [normalize(d, h.theory, fuel) for d in disjuncts]
    f = disjuncts[-1]
    for d in reversed(disjuncts[:-1]):
        f = Or(d, f)
    return valid_ground(f)


# -- the .hrs format ----------------------------------------------------------------------


def print_system(h: HerbrandSystem) -> str:
    from .syntax import PskDocument, print_document

    lines = []
    th = h.theory
    if th.rules:
        builtin = th.name in ("E_PA", "IT")
        doc = PskDocument(uses=[th.name] if builtin else [], rules=[] if builtin else list(th.rules))
        lines.append(print_document(doc).rstrip("\n"))
        lines.append("")
    lines.append(f"(herbrand {h.head}")
    lines.append("  (params" + "".join(f" {p}" for p in h.params) + ")")
    lines.append("  (vars" + "".join(f" {x}" for x in h.variables) + ")")
    lines.append(f"  (matrix {render(h.matrix)})")
    for r in h.rules:
        lines.append(f"  (wrule {render(r.lhs)} {render(r.rhs)})")
    lines[-1] += ")"
    return "\n".join(lines) + "\n"


def read_system(text: str) -> HerbrandSystem:
    from .syntax import Reader, read_formula, read_symbol, read_term

    forms = read_all(text)
    theory_forms = [f for f in forms if isinstance(f, SList) and f.head == "theory"]
    rest = [f for f in forms if not (isinstance(f, SList) and f.head == "theory")]
    if len(rest) != 1 or not isinstance(rest[0], SList) or rest[0].head != "herbrand" or len(rest[0]) < 2:
        where = rest[0] if rest else (forms[0] if forms else Sym(""))
        raise SyntaxErr("expected exactly one (herbrand HEAD ...) form", span_of(where))
    r = Reader()
    for f in theory_forms:
        r._toplevel(f)
    if r.diags:
        raise SyntaxErr(r.diags[0].message, r.diags[0].span)
    form = rest[0]
    head = str(form[1])
    params, variables, matrix, rules = (), (), None, []
    for item in form.items[2:]:
        if not isinstance(item, SList) or item.head is None:
            raise SyntaxErr("herbrand items are parenthesized", span_of(item))
        vals = item.items[1:]
        if item.head == "params":
            params = tuple(read_symbol(v) for v in vals)
        elif item.head == "vars":
            variables = tuple(read_symbol(v) for v in vals)
        elif item.head == "matrix" and len(vals) == 1:
            matrix = read_formula(vals[0])
        elif item.head == "wrule" and len(vals) == 2:
            rules.append(RewriteRule(read_term(vals[0]), read_term(vals[1])))
        else:
            raise SyntaxErr(f"unknown herbrand item {item.head}", span_of(item))
    if matrix is None:
        raise SyntaxErr("missing (matrix F)", span_of(form))
    return HerbrandSystem(head, params, variables, matrix, tuple(rules), r.doc.theory())
