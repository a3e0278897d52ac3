"""Sorts, parameters, terms, formula schemata and substitution.

Terms and formulas are immutable dataclasses.  Numerals are unary
``s``-chains over ``0``; defined (hatted) symbols carry a leading ``^`` in
their head name, e.g. ``^a`` for addition.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Union


class Sort(str, Enum):
    OMEGA = "omega"
    IOTA = "iota"
    BOOL = "o"  # declared for predicate results, never consumed


class Kind(str, Enum):
    ACTIVE = "active"
    PASSIVE = "passive"
    INTERNAL = "internal"


PREFIX = {Kind.ACTIVE: "n", Kind.PASSIVE: "p", Kind.INTERNAL: "i"}
KIND_OF_PREFIX = {v: k for k, v in PREFIX.items()}


class TermError(Exception):
    pass


class SortError(TermError):
    pass


class CaptureError(TermError):
    pass


class NotANumeral(TermError):
    pass


@dataclass(frozen=True)
class Param:
    """A numeric parameter of one of the three kinds."""

    name: str
    kind: Kind

    def __str__(self) -> str:
        return f"{PREFIX[self.kind]}:{self.name}"


@dataclass(frozen=True)
class Var:
    """An individual (iota) variable."""

    name: str

    def __str__(self) -> str:
        return f"v:{self.name}"


@dataclass(frozen=True)
class App:
    head: str
    args: tuple = ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Bound:
    # de Bruijn level; only produced by canonical()
    level: int

    def __str__(self) -> str:
        return f"#{self.level}"


Term = Union[Param, Var, App, Bound]
Symbol = Union[Param, Var]

ZERO = App("0")


def succ(t: Term) -> App:
    return App("s", (t,))


def is_defined(head: str) -> bool:
    return head.startswith("^")


# -- formulas ---------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple = ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Not:
    body: "Formula"

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class ForAll:
    var: Symbol
    body: "Formula"

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Exists:
    var: Symbol
    body: "Formula"

    def __str__(self) -> str:
        return render(self)


Formula = Union[Atom, Not, And, Or, Implies, ForAll, Exists]
BINARY = {And: "and", Or: "or", Implies: "imp"}
QUANT = {ForAll: "forall", Exists: "exists"}


def eq(left: Term, right: Term) -> Atom:
    return Atom("=", (left, right))


def is_term(x) -> bool:
    return isinstance(x, (Param, Var, App, Bound))


def is_formula(x) -> bool:
    return isinstance(x, (Atom, Not, And, Or, Implies, ForAll, Exists))


def is_quantifier_free(f: Formula) -> bool:
    match f:
        case Atom():
            return True
        case Not(b):
            return is_quantifier_free(b)
        case And(l, r) | Or(l, r) | Implies(l, r):
            return is_quantifier_free(l) and is_quantifier_free(r)
    return False


# -- numerals ---------------------------------------------------------------


def numeral(k: int) -> App:
    if k < 0:
        raise ValueError("numerals are natural numbers")
    t = ZERO
    for _ in range(k):
        t = succ(t)
    return t


def _decode(t) -> int | None:
    k = 0
    while isinstance(t, App) and t.head == "s" and len(t.args) == 1:
        k += 1
        t = t.args[0]
    return k if t == ZERO else None


def value_of(t: Term) -> int:
    """Decode a pure ``0``/``s`` chain; anything else raises NotANumeral."""
    k = _decode(t)
    if k is None:
        raise NotANumeral(f"not a numeral: {render(t)}")
    return k


def is_numeral(t: Term) -> bool:
    return _decode(t) is not None


# -- sorts ------------------------------------------------------------------

DEFAULT_SIGNATURE: dict[str, Sort] = {"0": Sort.OMEGA, "s": Sort.OMEGA}


def sort_of(t: Term, signature: Mapping[str, Sort] | None = None) -> Sort:
    """Result sort of ``t``.

    Heads missing from ``signature`` are guessed: defined symbols whose
    arguments are all numeric are numeric, everything else is individual.
    """
    match t:
        case Param() | Bound():
            return Sort.OMEGA
        case Var():
            return Sort.IOTA
        case App(head, args):
            if head in DEFAULT_SIGNATURE:
                return DEFAULT_SIGNATURE[head]
            if signature and head in signature:
                return signature[head]
            if is_defined(head) and all(sort_of(a, signature) is Sort.OMEGA for a in args):
                return Sort.OMEGA
            return Sort.IOTA
    raise TypeError(f"not a term: {t!r}")


# -- traversal --------------------------------------------------------------


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def formula_terms(f: Formula) -> Iterator[Term]:
    """Top-level argument terms of every atom in ``f``."""
    match f:
        case Atom(_, args):
            yield from args
        case Not(b) | ForAll(_, b) | Exists(_, b):
            yield from formula_terms(b)
        case And(l, r) | Or(l, r) | Implies(l, r):
            yield from formula_terms(l)
            yield from formula_terms(r)


def free_symbols(expr) -> set:
    """Free parameters and individual variables of a term, formula or sequent."""
    if isinstance(expr, (Param, Var, App, Atom, Not, And, Or, Implies, ForAll, Exists)):
        return set(_free_cached(expr))
    out: set = set()
    _free(expr, frozenset(), out)
    return out


@lru_cache(maxsize=1 << 16)
def _free_cached(x) -> frozenset:
    out: set = set()
    _free(x, frozenset(), out)
    return frozenset(out)


def _free(x, bound: frozenset, out: set) -> None:
    match x:
        case Param() | Var():
            if x not in bound:
                out.add(x)
        case App(_, args) | Atom(_, args):
            for a in args:
                _free(a, bound, out)
        case Not(b):
            _free(b, bound, out)
        case And(l, r) | Or(l, r) | Implies(l, r):
            _free(l, bound, out)
            _free(r, bound, out)
        case ForAll(v, b) | Exists(v, b):
            _free(b, bound | {v}, out)
        case Bound():
            pass
        case _ if hasattr(x, "formulas"):
            for f in x.formulas():
                _free(f, bound, out)
        case tuple() | list() | frozenset() | set():
            for y in x:
                _free(y, bound, out)
        case _:
            raise TypeError(f"cannot collect symbols of {x!r}")


def parameters_of(expr, kind: Kind | str | None = None) -> set[Param]:
    params = {p for p in free_symbols(expr) if isinstance(p, Param)}
    if kind is None:
        return params
    kind = Kind(kind)
    return {p for p in params if p.kind is kind}


def params_by_kind(expr) -> dict[Kind, set[Param]]:
    syms = free_symbols(expr)
    return {k: {p for p in syms if isinstance(p, Param) and p.kind is k} for k in Kind}


def occurs(sym: Symbol, expr) -> bool:
    return sym in free_symbols(expr)


# -- substitution -----------------------------------------------------------


Substitution = Mapping[Symbol, Term]


def check_substitution(s: Substitution, signature: Mapping[str, Sort] | None = None) -> None:
    for k, v in s.items():
        if isinstance(k, Param):
            if sort_of(v, signature) is not Sort.OMEGA:
                raise SortError(f"{k} is numeric but {render(v)} is not")
        elif isinstance(k, Var):
            pass
        else:
            raise SortError(f"cannot substitute for {k!r}")


def substitute(expr, s: Substitution, *, check: bool = False,
               signature: Mapping[str, Sort] | None = None):
    """Simultaneous, capture-checking substitution.

    Works on terms, formulas and anything exposing ``_substitute`` (sequents,
    proof trees).  Raises CaptureError when a substituted term would fall
    under a binder of one of its own free symbols.
    """
    if check:
        check_substitution(s, signature)
    if not s:
        return expr
    return _subst(expr, dict(s))


def _subst(x, s: dict):
    match x:
        case Param() | Var():
            return s.get(x, x)
        case App(h, args):
            return App(h, tuple(_subst(a, s) for a in args)) if args else x
        case Atom(p, args):
            return Atom(p, tuple(_subst(a, s) for a in args)) if args else x
        case Not(b):
            return Not(_subst(b, s))
        case And(l, r):
            return And(_subst(l, s), _subst(r, s))
        case Or(l, r):
            return Or(_subst(l, s), _subst(r, s))
        case Implies(l, r):
            return Implies(_subst(l, s), _subst(r, s))
        case ForAll(v, b) | Exists(v, b):
            inner = {k: t for k, t in s.items() if k != v}
            if inner:
                live = free_symbols(b)
                for k, t in inner.items():
                    if k in live and occurs(v, t):
                        raise CaptureError(f"{render(t)} would be captured by binder {v}")
            return type(x)(v, _subst(b, inner) if inner else b)
        case Bound():
            return x
        case _ if hasattr(x, "_substitute"):
            return x._substitute(s)
        case tuple():
            return tuple(_subst(y, s) for y in x)
    raise TypeError(f"cannot substitute into {x!r}")


def compose(s2: Substitution, s1: Substitution) -> dict:
    """The substitution ``s2 ∘ s1`` (apply s1, then s2)."""
    out = {k: substitute(v, s2) for k, v in s1.items()}
    for k, v in s2.items():
        out.setdefault(k, v)
    return out


# -- alpha-equivalence ------------------------------------------------------


def canonical(f):
    """Replace bound symbols by de Bruijn levels so alpha-variants coincide."""
    return _canon(f, {}, 0)


def _canon(x, env: dict, depth: int):
    match x:
        case Param() | Var():
            return env.get(x, x)
        case App(h, args):
            return App(h, tuple(_canon(a, env, depth) for a in args)) if args else x
        case Atom(p, args):
            return Atom(p, tuple(_canon(a, env, depth) for a in args)) if args else x
        case Not(b):
            return Not(_canon(b, env, depth))
        case And(l, r) | Or(l, r) | Implies(l, r):
            return type(x)(_canon(l, env, depth), _canon(r, env, depth))
        case ForAll(v, b) | Exists(v, b):
            return type(x)(Bound(depth), _canon(b, {**env, v: Bound(depth)}, depth + 1))
        case Bound():
            return x
    raise TypeError(f"not a term or formula: {x!r}")


def alpha_eq(a, b) -> bool:
    return a == b or canonical(a) == canonical(b)


# -- positions --------------------------------------------------------------


def children(x) -> tuple:
    match x:
        case App(_, args) | Atom(_, args):
            return args
        case Not(b) | ForAll(_, b) | Exists(_, b):
            return (b,)
        case And(l, r) | Or(l, r) | Implies(l, r):
            return (l, r)
    return ()


def with_children(x, kids: tuple):
    match x:
        case App(h, _):
            return App(h, tuple(kids))
        case Atom(p, _):
            return Atom(p, tuple(kids))
        case Not(_):
            return Not(kids[0])
        case ForAll(v, _) | Exists(v, _):
            return type(x)(v, kids[0])
        case And() | Or() | Implies():
            return type(x)(kids[0], kids[1])
    if kids:
        raise TypeError(f"{x!r} has no children")
    return x


def subterm_at(x, path: Iterable[int]):
    for i in path:
        kids = children(x)
        if not 0 <= i < len(kids):
            raise IndexError(f"bad position {tuple(path)}")
        x = kids[i]
    return x


def replace_at(x, path: tuple, new):
    if not path:
        return new
    kids = list(children(x))
    i = path[0]
    if not 0 <= i < len(kids):
        raise IndexError(f"bad position {path}")
    kids[i] = replace_at(kids[i], path[1:], new)
    return with_children(x, tuple(kids))


# -- rendering --------------------------------------------------------------

SUGAR_LIMIT = 20


def render(x) -> str:
    """Canonical s-expression text of a term or formula."""
    match x:
        case Param() | Var() | Bound():
            return str(x)
        case App(h, args):
            k = _decode(x)
            if k is not None:
                return str(k) if k <= SUGAR_LIMIT else "(s " * k + "0" + ")" * k
            if not args:
                return h
            return "(" + " ".join([h, *(render(a) for a in args)]) + ")"
        case Atom(p, args):
            return "(" + " ".join([p, *(render(a) for a in args)]) + ")"
        case Not(b):
            return f"(not {render(b)})"
        case And(l, r) | Or(l, r) | Implies(l, r):
            return f"({BINARY[type(x)]} {render(l)} {render(r)})"
        case ForAll(v, b) | Exists(v, b):
            return f"({QUANT[type(x)]} {v} {render(b)})"
    raise TypeError(f"cannot render {x!r}")
