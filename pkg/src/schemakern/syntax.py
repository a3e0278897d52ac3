"""The ``.psk`` document format: parsing to objects and canonical printing.

Terms::

    0  3  (s t)  n:x  p:x  i:x  v:x  n:x'  c  (f t ...)  (^a t u)

Formulas::

    (= t u)  (P t ...)  (not F)  (and F G)  (or F G)  (imp F G)
    (forall p:x F)  (exists v:x F)

Proofs are trees of ``(rule NAME (seq (ant ...) (suc ...)) ATTR ... PREMISE ...)``
with ``(link SYMBOL (seq ...) (arg t) (iargs t ...) (rargs t ...))`` leaves
and ``(ref NAME)`` splicing a named proof declared earlier.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .calculus import RULE_ARITY, Proof, Sequent
from .rewrite import BadRule, EqTheory, RewriteRule, builtin
from .schema import Component, PSchema
from .sexpr import SList, Sym, SyntaxErr, read_all, span_of
from .terms import (
    And,
    App,
    Atom,
    Exists,
    ForAll,
    Implies,
    KIND_OF_PREFIX,
    Not,
    Or,
    Param,
    Var,
    ZERO,
    numeral,
    render,
    substitute,
    succ,
)


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    span: tuple
    code: str
    message: str
    path: tuple = ()

    def as_dict(self) -> dict:
        return {"severity": self.severity, "span": list(self.span), "code": self.code,
                "message": self.message, "path": list(self.path)}

    def text(self, filename: str = "<input>") -> str:
        line, col = self.span[0], self.span[1]
        where = f" at {'/'.join(map(str, self.path))}" if self.path else ""
        return f"{filename}:{line}:{col}: {self.severity}: {self.code}: {self.message}{where}"


class ParseFailure(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(d.message for d in diagnostics))
        self.diagnostics = diagnostics


@dataclass
class PskDocument:
    uses: list = field(default_factory=list)         # builtin theory names
    rules: list = field(default_factory=list)        # RewriteRule
    axioms: dict = field(default_factory=dict)       # name -> Sequent
    proofs: dict = field(default_factory=dict)       # name -> Proof
    components: list = field(default_factory=list)   # Component
    order: list = field(default_factory=list)        # (lower, higher)
    passive: tuple | None = None
    pa: str | None = None                            # builtin theory admitted as axiom leaves
    spans: dict = field(default_factory=dict, compare=False, repr=False)

    def theory(self) -> EqTheory:
        rules: tuple = ()
        for name in self.uses:
            rules += builtin(name).rules
        rules += tuple(self.rules)
        name = "+".join(self.uses + (["local"] if self.rules else [])) or "empty"
        return EqTheory(name, rules)

    def schema(self) -> PSchema | None:
        if not self.components:
            return None
        return PSchema(tuple(self.components), tuple(self.order),
                       frozenset(self.passive) if self.passive is not None else None, self.theory(),
                       self.pa_theory())

    def pa_theory(self) -> EqTheory | None:
        return builtin(self.pa) if self.pa else None


# -- reading ---------------------------------------------------------------------

CONNECTIVES = {"and": And, "or": Or, "imp": Implies}
QUANTIFIERS = {"forall": ForAll, "exists": Exists}
ATTRS = {"seq", "cutf", "formula", "term", "path", "scheme", "ivar", "inst", "label",
         "arg", "iargs", "rargs", "target"}


def _err(msg: str, x) -> SyntaxErr:
    return SyntaxErr(msg, span_of(x))


def read_symbol(tok) -> Param | Var:
    text = str(tok)
    prefix, _, name = text.partition(":")
    if not name:
        raise _err(f"expected a parameter or variable, got {text}", tok)
    if prefix == "v":
        return Var(name)
    if prefix in KIND_OF_PREFIX:
        return Param(name, KIND_OF_PREFIX[prefix])
    raise _err(f"unknown symbol prefix {prefix!r} in {text}", tok)


def read_term(x):
    if isinstance(x, Sym):
        text = str(x)
        primes = len(text) - len(text.rstrip("'"))
        core = text[: len(text) - primes] if primes else text
        if not core:
            raise _err("empty term", x)
        if core.isdigit():
            t = numeral(int(core))
        elif ":" in core:
            t = read_symbol(_with_span(core, x))
        else:
            t = App(core)
        for _ in range(primes):
            t = succ(t)
        return t
    if isinstance(x, SList):
        if not x.items or not isinstance(x.items[0], Sym):
            raise _err("a compound term needs a function symbol", x)
        head = str(x.items[0])
        args = tuple(read_term(a) for a in x.items[1:])
        if head == "s" and len(args) != 1:
            raise _err("s takes exactly one argument", x)
        return App(head, args)
    raise _err("expected a term", x)


def _with_span(text, like) -> Sym:
    s = Sym(text)
    s.span = span_of(like)
    return s


def read_formula(x):
    if not isinstance(x, SList) or not x.items or not isinstance(x.items[0], Sym):
        raise _err("expected a formula in parentheses", x)
    head, rest = str(x.items[0]), x.items[1:]
    if head == "not":
        if len(rest) != 1:
            raise _err("not takes one formula", x)
        return Not(read_formula(rest[0]))
    if head in CONNECTIVES:
        if len(rest) != 2:
            raise _err(f"{head} takes two formulas", x)
        return CONNECTIVES[head](read_formula(rest[0]), read_formula(rest[1]))
    if head in QUANTIFIERS:
        if len(rest) != 2 or not isinstance(rest[0], Sym):
            raise _err(f"{head} takes a variable and a formula", x)
        return QUANTIFIERS[head](read_symbol(rest[0]), read_formula(rest[1]))
    return Atom(head, tuple(read_term(a) for a in rest))


def read_sequent(x) -> Sequent:
    if not isinstance(x, SList) or x.head != "seq":
        raise _err("expected (seq (ant ...) (suc ...))", x)
    ant, suc = (), ()
    for part in x.items[1:]:
        if not isinstance(part, SList) or part.head not in ("ant", "suc"):
            raise _err("a sequent has (ant ...) and (suc ...) parts", part)
        fs = tuple(read_formula(f) for f in part.items[1:])
        if part.head == "ant":
            ant = fs
        else:
            suc = fs
    return Sequent(ant, suc)


class Reader:
    def __init__(self):
        self.doc = PskDocument()
        self.diags: list[Diagnostic] = []

    def error(self, code: str, msg: str, x):
        self.diags.append(Diagnostic("error", span_of(x), code, msg))

    # proofs

    def read_proof(self, x) -> Proof:
        if not isinstance(x, SList) or x.head not in ("rule", "link", "ref"):
            raise _err("expected (rule ...), (link ...) or (ref ...)", x)
        if x.head == "ref":
            return self._ref(x)
        if x.head == "link":
            if len(x.items) < 2 or not isinstance(x.items[1], Sym):
                raise _err("(link SYMBOL (seq ...) ...)", x)
            rule, target, body = "link", str(x.items[1]), x.items[2:]
        else:
            if len(x.items) < 2 or not isinstance(x.items[1], Sym):
                raise _err("(rule NAME (seq ...) ...)", x)
            rule, target, body = str(x.items[1]), None, x.items[2:]
            if rule not in RULE_ARITY or rule == "link":
                raise _err(f"unknown rule {rule}", x.items[1])
        kw: dict = {"span": x.span}
        if target is not None:
            kw["target"] = target
        conclusion = None
        premises = []
        for item in body:
            if isinstance(item, SList) and item.head in ("rule", "link", "ref"):
                premises.append(self.read_proof(item))
                continue
            if not isinstance(item, SList) or item.head not in ATTRS:
                raise _err("unexpected item in proof node", item)
            key, vals = item.head, item.items[1:]
            if key == "seq":
                conclusion = read_sequent(item)
            elif key in ("cutf", "formula"):
                kw["formula"] = read_formula(self._one(item, vals))
            elif key == "term":
                kw["term"] = read_term(self._one(item, vals))
            elif key == "arg":
                kw["arg"] = read_term(self._one(item, vals))
            elif key == "path":
                try:
                    kw["path"] = tuple(int(str(v)) for v in vals)
                except ValueError:
                    raise _err("path entries are integers", item)
            elif key in ("scheme", "label", "target"):
                kw[key] = str(self._one(item, vals))
            elif key == "ivar":
                sym = read_symbol(self._one(item, vals))
                if not isinstance(sym, Param):
                    raise _err("the induction variable is numeric", item)
                kw["ivar"] = sym
            elif key == "inst":
                pairs = []
                for v in vals:
                    if not isinstance(v, SList) or len(v) != 2:
                        raise _err("(inst (i:m t) ...)", v)
                    pairs.append((read_symbol(v[0]), read_term(v[1])))
                kw["inst"] = tuple(pairs)
            elif key in ("iargs", "rargs"):
                kw[key] = tuple(read_term(v) for v in vals)
        if conclusion is None:
            conclusion = infer_conclusion(rule, premises, kw)
            if conclusion is None:
                raise _err(f"{rule} node needs an explicit (seq ...)", x)
        return Proof(rule, conclusion, tuple(premises), **kw)

    @staticmethod
    def _one(item, vals):
        if len(vals) != 1:
            raise _err(f"{item.head} takes exactly one value", item)
        return vals[0]

    def _ref(self, x) -> Proof:
        if len(x.items) < 2 or not isinstance(x.items[1], Sym):
            raise _err("(ref NAME [(subst (sym t) ...)])", x)
        name = str(x.items[1])
        if name not in self.doc.proofs:
            raise _err(f"unknown proof {name}", x.items[1])
        p = self.doc.proofs[name]
        for extra in x.items[2:]:
            if not isinstance(extra, SList) or extra.head != "subst":
                raise _err("ref accepts only (subst ...)", extra)
            s = {}
            for pair in extra.items[1:]:
                if not isinstance(pair, SList) or len(pair) != 2:
                    raise _err("(subst (sym t) ...)", pair)
                s[read_symbol(pair[0])] = read_term(pair[1])
            p = substitute(p, s)
        return p

    # top level

    def read(self, text: str) -> PskDocument:
        try:
            forms = read_all(text)
        except SyntaxErr as e:
            self.diags.append(Diagnostic("error", e.span, "Syntax", str(e)))
            return self.doc
        for form in forms:
            try:
                self._toplevel(form)
            except SyntaxErr as e:
                self.diags.append(Diagnostic("error", e.span, "Syntax", str(e)))
        return self.doc

    def _toplevel(self, f):
        if not isinstance(f, SList) or f.head is None:
            raise _err("expected a top-level form", f)
        head, rest = f.head, f.items[1:]
        d = self.doc
        if head == "theory":
            for item in rest:
                if isinstance(item, SList) and item.head == "use":
                    for name in item.items[1:]:
                        try:
                            builtin(str(name))
                        except KeyError:
                            self.error("UnknownTheory", f"unknown builtin theory {name}", name)
                            continue
                        d.uses.append(str(name))
                elif isinstance(item, SList) and item.head == "pa" and len(item) == 2:
                    try:
                        builtin(str(item[1]))
                    except KeyError:
                        self.error("UnknownTheory", f"unknown builtin theory {item[1]}", item[1])
                        continue
                    d.pa = str(item[1])
                elif isinstance(item, SList) and item.head in ("frule", "prule") and len(item) == 3:
                    reader = read_term if item.head == "frule" else read_formula
                    try:
                        d.rules.append(RewriteRule(reader(item[1]), reader(item[2])))
                    except BadRule as e:
                        self.error("BadRule", str(e), item)
                else:
                    raise _err("theory items are (use NAME ...), (pa NAME), (frule L R) or (prule L R)", item)
        elif head == "axiom":
            if len(rest) != 2 or not isinstance(rest[0], Sym):
                raise _err("(axiom NAME (seq ...))", f)
            name = str(rest[0])
            if name in d.axioms:
                self.error("Duplicate", f"axiom {name} declared twice", rest[0])
            d.axioms[name] = read_sequent(rest[1])
            d.spans[("axiom", name)] = f.span
        elif head == "proof":
            if len(rest) != 2 or not isinstance(rest[0], Sym):
                raise _err("(proof NAME TREE)", f)
            name = str(rest[0])
            if name in d.proofs:
                self.error("Duplicate", f"proof {name} declared twice", rest[0])
            d.proofs[name] = self.read_proof(rest[1])
            d.spans[("proof", name)] = f.span
        elif head == "component":
            c = self._component(f)
            if any(o.symbol == c.symbol for o in d.components):
                self.error("Duplicate", f"component {c.symbol} declared twice", f.items[1])
            d.components.append(c)
            d.spans[("component", c.symbol)] = f.span
        elif head == "order":
            if len(rest) != 2 or not all(isinstance(r, Sym) for r in rest):
                raise _err("(order LOWER HIGHER)", f)
            d.order.append((str(rest[0]), str(rest[1])))
        elif head == "passive":
            syms = tuple(read_symbol(r) for r in rest)
            d.passive = (d.passive or ()) + syms
        else:
            raise _err(f"unknown top-level form {head}", f)

    def _component(self, f) -> Component:
        if len(f) < 2 or not isinstance(f[1], Sym):
            raise _err("(component SYMBOL ...)", f)
        kw: dict = {}
        for item in f.items[2:]:
            if not isinstance(item, SList) or item.head is None:
                raise _err("component items are parenthesized", item)
            key, vals = item.head, item.items[1:]
            if key == "active":
                kw["active"] = read_symbol(self._one(item, vals))
            elif key == "ints":
                kw["ints"] = tuple(read_symbol(v) for v in vals)
            elif key == "ivars":
                kw["ivars"] = tuple(read_symbol(v) for v in vals)
            elif key == "alpha":
                kw["alpha"] = read_term(self._one(item, vals))
            elif key == "es":
                kw["declared_es"] = read_sequent(self._one(item, vals))
            elif key in ("base", "step"):
                kw[key] = self.read_proof(self._one(item, vals))
            else:
                raise _err(f"unknown component item {key}", item)
        for need in ("base", "step"):
            if need not in kw:
                raise _err(f"component {f[1]} lacks ({need} ...)", f)
        return Component(str(f[1]), span=f.span, **kw)


def infer_conclusion(rule: str, premises: list, kw: dict) -> Sequent | None:
    """Conclusions that follow from premises and side data alone."""
    f = kw.get("formula")
    if rule == "cut" and f is not None and len(premises) == 2:
        p1, p2 = premises[0].conclusion, premises[1].conclusion
        return Sequent(p1.ant + _drop(p2.ant, f), _drop(p1.suc, f) + p2.suc)
    if rule in ("wl", "wr") and f is not None and len(premises) == 1:
        p = premises[0].conclusion
        return Sequent(p.ant + (f,), p.suc) if rule == "wl" else Sequent(p.ant, p.suc + (f,))
    if rule in ("cl", "cr") and f is not None and len(premises) == 1:
        p = premises[0].conclusion
        return Sequent(_drop(p.ant, f), p.suc) if rule == "cl" else Sequent(p.ant, _drop(p.suc, f))
    return None


def _drop(fs: tuple, f) -> tuple:
    from .terms import alpha_eq

    out = list(fs)
    for i, g in enumerate(out):
        if alpha_eq(g, f):
            del out[i]
            break
    return tuple(out)


def parse(text: str) -> tuple[PskDocument, list[Diagnostic]]:
    r = Reader()
    doc = r.read(text)
    return doc, r.diags


def parse_strict(text: str) -> PskDocument:
    doc, diags = parse(text)
    if diags:
        raise ParseFailure(diags)
    return doc


# -- printing --------------------------------------------------------------------


def print_sequent(s: Sequent) -> str:
    ant = " ".join(["ant", *(render(f) for f in s.ant)])
    suc = " ".join(["suc", *(render(f) for f in s.suc)])
    return f"(seq ({ant}) ({suc}))"


def _attrs(p: Proof) -> list[str]:
    out = []
    if p.formula is not None:
        out.append(f"({'cutf' if p.rule == 'cut' else 'formula'} {render(p.formula)})")
    if p.term is not None:
        out.append(f"(term {render(p.term)})")
    if p.path is not None:
        out.append("(path" + "".join(f" {i}" for i in p.path) + ")")
    if p.scheme is not None:
        out.append(f"(scheme {p.scheme})")
    if p.ivar is not None:
        out.append(f"(ivar {p.ivar})")
    if p.inst:
        out.append("(inst" + "".join(f" ({m} {render(t)})" for m, t in p.inst) + ")")
    if p.label is not None:
        out.append(f"(label {p.label})")
    if p.arg is not None:
        out.append(f"(arg {render(p.arg)})")
    if p.iargs:
        out.append("(iargs " + " ".join(render(t) for t in p.iargs) + ")")
    if p.rargs:
        out.append("(rargs " + " ".join(render(t) for t in p.rargs) + ")")
    return out


def print_proof(p: Proof, indent: int = 0) -> str:
    pad = " " * indent
    head = f"(link {p.target}" if p.rule == "link" else f"(rule {p.rule}"
    first = " ".join([head, print_sequent(p.conclusion), *_attrs(p)])
    if not p.premises:
        return pad + first + ")"
    lines = [pad + first]
    lines.extend(print_proof(q, indent + 2) for q in p.premises)
    return "\n".join(lines) + ")"


def print_document(d: PskDocument) -> str:
    blocks = []
    if d.uses or d.rules or d.pa:
        items = []
        if d.uses:
            items.append("  (use " + " ".join(d.uses) + ")")
        if d.pa:
            items.append(f"  (pa {d.pa})")
        for r in d.rules:
            tag = "frule" if isinstance(r.lhs, App) else "prule"
            items.append(f"  ({tag} {render(r.lhs)} {render(r.rhs)})")
        blocks.append("(theory\n" + "\n".join(items) + ")")
    if d.passive is not None:
        blocks.append("(passive" + "".join(f" {p}" for p in d.passive) + ")")
    for name, s in d.axioms.items():
        blocks.append(f"(axiom {name} {print_sequent(s)})")
    for name, p in d.proofs.items():
        blocks.append(f"(proof {name}\n{print_proof(p, 2)})")
    for c in d.components:
        lines = [f"(component {c.symbol}"]
        if c.active is not None:
            lines.append(f"  (active {c.active})")
        if c.ints:
            lines.append("  (ints " + " ".join(map(str, c.ints)) + ")")
        if c.ivars:
            lines.append("  (ivars " + " ".join(map(str, c.ivars)) + ")")
        if c.alpha != ZERO:
            lines.append(f"  (alpha {render(c.alpha)})")
        if c.declared_es is not None:
            lines.append(f"  (es {print_sequent(c.declared_es)})")
        lines.append("  (base\n" + print_proof(c.base, 4) + ")")
        lines.append("  (step\n" + print_proof(c.step, 4) + "))")
        blocks.append("\n".join(lines))
    for a, b in d.order:
        blocks.append(f"(order {a} {b})")
    return "\n\n".join(blocks) + "\n"
