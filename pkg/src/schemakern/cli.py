"""Command-line driver: check, unfold, translate, herbrand and fmt."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .build import BuildError
from .calculus import Proof, check_derivation
from .evaluation import EvaluationError, unfold, verify_unfolded
from .herbrand import (
    HerbrandError,
    extract_herbrand_system,
    harvest,
    normalize_witnesses,
    print_system,
    read_system,
    verify_herbrand_disjunction,
)
from .rewrite import DEFAULT_FUEL, E_PA, FuelExhausted
from .schema import PSchema, validate_schema
from .sexpr import SyntaxErr
from .syntax import Diagnostic, ParseFailure, PskDocument, parse, parse_strict, print_document
from .terms import Kind, numeral, parameters_of, render
from .translate import (
    TranslationError,
    eliminate_e_rule,
    from_pra,
    generalize,
    mvlkie_to_schema,
    schema_to_mvlkie,
    to_pra,
)

EXIT_OK, EXIT_INVALID, EXIT_INTERNAL = 0, 1, 2
NO_SPAN = (1, 1, 1, 1)


class Invalid(Exception):
    """User-facing failure: bad input, invalid proof or an exhausted budget."""

    def __init__(self, code: str, message: str, diagnostics=()):
        super().__init__(message)
        self.code = code
        self.diagnostics = list(diagnostics)


@dataclass
class Out:
    fmt: str
    stdout: object = field(default_factory=lambda: sys.stdout)
    stderr: object = field(default_factory=lambda: sys.stderr)

    def result(self, record: dict, text: str):
        if self.fmt == "json":
            print(json.dumps(record, sort_keys=True), file=self.stdout)
        elif text:
            print(text, file=self.stdout)

    def diagnostic(self, d: Diagnostic, filename: str):
        if self.fmt == "json":
            print(json.dumps({"diagnostic": {**d.as_dict(), "file": filename}}, sort_keys=True), file=self.stderr)
        else:
            print(d.text(filename), file=self.stderr)


# -- input helpers ---------------------------------------------------------------


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise Invalid("IOError", f"{path}: {e}") from e


def _write(path: str | None, text: str, out: Out) -> None:
    if path in (None, "-"):
        out.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def load_document(path: str) -> PskDocument:
    doc, diags = parse(_read(path))
    if diags:
        raise Invalid("SyntaxError", f"{len(diags)} diagnostic(s)", diags)
    return doc


def _span_for(doc: PskDocument, v) -> tuple:
    if v.span is not None:
        return tuple(v.span)
    if v.path:
        for kind in ("component", "proof"):
            span = doc.spans.get((kind, v.path[0]))
            if span is not None:
                return tuple(span)
    return NO_SPAN


def _diagnostics(doc: PskDocument, violations, prefix: tuple = ()) -> list[Diagnostic]:
    return [Diagnostic("error", _span_for(doc, v), v.code, v.message, prefix + tuple(v.path)) for v in violations]


def _uses_rule(p: Proof, rule: str) -> bool:
    return any(nd.rule == rule for _, nd in p.nodes())


def _single_proof(doc: PskDocument) -> tuple[str, Proof]:
    if len(doc.proofs) != 1:
        raise Invalid("NotAProof", f"expected exactly one proof, found {len(doc.proofs)}")
    return next(iter(doc.proofs.items()))


def _schema(doc: PskDocument) -> PSchema:
    psi = doc.schema()
    if psi is None:
        raise Invalid("NotASchema", "the document declares no components")
    return psi


def check_proof(doc: PskDocument, p: Proof, fuel: int):
    pra = _uses_rule(p, "ind")
    return check_derivation(p, doc.theory(), allow_links=False, allow_mvind=not pra, allow_ind=pra, pra=pra,
                            fuel=fuel, axioms=tuple(doc.axioms.values()), pa_axioms=doc.pa_theory())


def parse_assignments(text: str, params) -> dict:
    """``"alpha=3,beta=2"`` against the given parameters, matched by bare or prefixed name."""
    by_name = {}
    for p in params:
        by_name[p.name] = p
        by_name[str(p)] = p
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        name, eq, value = item.partition("=")
        name = name.strip()
        if not eq or name not in by_name:
            known = ", ".join(sorted(q.name for q in params)) or "none"
            raise Invalid("BadSubstitution", f"cannot assign {item!r}; parameters: {known}")
        try:
            v = int(value)
        except ValueError:
            raise Invalid("BadSubstitution", f"{value.strip()!r} is not a natural number") from None
        if v < 0:
            raise Invalid("BadSubstitution", f"{name} must be non-negative")
        out[by_name[name]] = numeral(v)
    return out


def parse_values(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise Invalid("BadParams", f"{text!r} is not a comma-separated list of naturals") from None
    if any(v < 0 for v in vals):
        raise Invalid("BadParams", "parameters must be non-negative")
    return vals


# -- commands --------------------------------------------------------------------


def cmd_check(args, out: Out) -> int:
    doc = load_document(args.file)
    records, lines, bad = [], [], []
    psi = doc.schema()
    if psi is not None:
        rep = validate_schema(psi, args.fuel)
        records.append({"kind": "schema", **rep.as_dict(), "summary": rep.summary()})
        lines.append(rep.summary())
        if rep.valid:
            lines.append(f"strict: {'yes' if rep.strict else 'no'}")
        bad += _diagnostics(doc, rep.violations)
    for name, p in doc.proofs.items():
        rep = check_proof(doc, p, args.fuel)
        verdict = "valid" if rep.valid else "invalid"
        lines.append(f"proof {name}: {verdict}, {rep.activity} {rep.kind}, {p.size()} nodes")
        records.append({"kind": "proof", "name": name, "valid": rep.valid, "activity": rep.activity,
                        "size": p.size(), "violations": [v.as_dict() for v in rep.violations]})
        bad += _diagnostics(doc, rep.violations, (name,))
    if not records:
        raise Invalid("EmptyDocument", "nothing to check: no components and no proofs")
    out.result({"command": "check", "file": args.file, "valid": not bad, "results": records}, "\n".join(lines))
    for d in bad:
        out.diagnostic(d, args.file)
    return EXIT_INVALID if bad else EXIT_OK


def cmd_unfold(args, out: Out) -> int:
    doc = load_document(args.file)
    psi = _schema(doc)
    params = parameters_of(psi.es(), Kind.PASSIVE)
    if psi.main.active is not None and psi.main.closing:
        params = params | {psi.main.active}
    sigma = parse_assignments(args.subst, params)
    rep = unfold(psi, sigma, fuel=args.fuel, expand_computational=args.expand_computational, seed=args.seed)
    ver = verify_unfolded(rep, psi, args.fuel)
    verdict = "valid" if ver.valid else "invalid"
    axioms = {f"t{i}": s for i, s in enumerate(rep.theory_axioms)}
    emitted = PskDocument(uses=list(doc.uses), rules=list(doc.rules), axioms=axioms,
                          proofs={"unfolded": rep.proof}, pa=doc.pa)
    text = print_document(emitted)
    record = {"command": "unfold", "file": args.file, "verdict": verdict, **rep.as_dict(),
              "violations": [v.as_dict() for v in ver.violations]}
    summary = [f"instance: {rep.instance}", f"steps: {rep.steps}", f"size: {rep.size}", f"verdict: {verdict}"]
    if args.emit:
        _write(args.emit, text, out)
        out.result(record, "\n".join(summary))
    elif out.fmt == "json":
        out.result({**record, "proof": text}, "")
    else:
        out.stdout.write(text + "".join(f"; {s}\n" for s in summary))
    for d in _diagnostics(emitted, ver.violations, ("unfolded",)):
        out.diagnostic(d, args.emit or "<unfolded>")
    return EXIT_OK if ver.valid else EXIT_INVALID


def _to_proof(doc: PskDocument, args) -> Proof:
    """The input as an induction proof, whatever form it arrives in."""
    if doc.components:
        return schema_to_mvlkie(_schema(doc))
    _, p = _single_proof(doc)
    return from_pra(p) if _uses_rule(p, "ind") else p


def cmd_translate(args, out: Out) -> int:
    doc = load_document(args.file)
    theory = doc.theory()
    pa = doc.pa
    if args.to == "schema":
        if doc.components and not (args.eliminate_e or args.generalize):
            target = _schema(doc)
        else:
            p = _to_proof(doc, args)
            if args.eliminate_e:
                p = eliminate_e_rule(p, theory).proof
                pa = pa or "E_PA"
            target = mvlkie_to_schema(p, theory, E_PA if pa else None)
        from .library import schema_document

        result = schema_document(target)
        result.uses, result.rules = list(doc.uses), list(doc.rules)
        rep = validate_schema(target, args.fuel)
        valid, violations = rep.valid, rep.violations
    else:
        p = _to_proof(doc, args)
        if args.to == "pra":
            if _uses_rule(p, "e"):
                if not args.eliminate_e:
                    raise Invalid("NotEFree", "the proof uses the E rule; pass --eliminate-e")
            if args.eliminate_e:
                p = eliminate_e_rule(p, theory).proof
                pa = pa or "E_PA"
            p = to_pra(p)
        elif args.eliminate_e:
            p = eliminate_e_rule(p, theory).proof
            pa = pa or "E_PA"
        if args.generalize:
            p = generalize(p)
        name = _schema(doc).main.symbol if doc.components else next(iter(doc.proofs))
        result = PskDocument(uses=list(doc.uses), rules=list(doc.rules), axioms=dict(doc.axioms),
                             proofs={name: p}, pa=pa)
        rep = check_proof(result, p, args.fuel)
        valid, violations = rep.valid, rep.violations
    text = print_document(result)
    _write(args.output, text, out)
    if args.output not in (None, "-"):
        verdict = "valid" if valid else "invalid"
        out.result({"command": "translate", "to": args.to, "output": args.output, "valid": valid},
                   f"wrote {args.output}: {verdict}")
    for d in _diagnostics(result, violations):
        out.diagnostic(d, args.output or "<output>")
    return EXIT_OK if valid else EXIT_INVALID


def _load_system(path: str, fuel: int):
    text = _read(path)
    if path.endswith(".hrs"):
        return read_system(text), None
    doc = parse_strict(text)
    psi = _schema(doc)
    return extract_herbrand_system(psi, fuel), psi


def cmd_herbrand(args, out: Out) -> int:
    if args.action == "extract":
        h, _ = _load_system(args.file, args.fuel)
        text = print_system(h)
        _write(args.output, text, out)
        if args.output not in (None, "-"):
            out.result({"command": "herbrand extract", "output": args.output, "rules": h.rule_count},
                       f"wrote {args.output}: {h.rule_count} rules")
        return EXIT_OK
    h, psi = _load_system(args.file, args.fuel)
    values = parse_values(args.params)
    table = normalize_witnesses(h, values, args.fuel)
    rendered = [[render(t) for t in ws] for ws in table]
    if args.action == "eval":
        text = "\n".join("(" + " ".join(ws) + ")" for ws in rendered)
        out.result({"command": "herbrand eval", "params": list(values), "witnesses": rendered}, text)
        return EXIT_OK
    ok = verify_herbrand_disjunction(h, values, table, args.fuel)
    record = {"command": "herbrand verify", "params": list(values), "disjuncts": len(table), "valid": ok}
    lines = [f"disjuncts: {len(table)}", f"tautology: {'yes' if ok else 'no'}"]
    if psi is not None:
        sigma = dict(zip(h.params, map(numeral, values)))
        rep = unfold(psi, sigma, fuel=args.fuel, expand_computational=True, seed=args.seed)
        harvested = sorted(tuple(map(render, w)) for w in harvest(rep.proof, len(h.variables), psi.theory, args.fuel))
        agree = harvested == sorted(tuple(ws) for ws in rendered)
        record["agrees_with_unfolding"] = agree
        lines.append(f"agrees with unfolding: {'yes' if agree else 'no'}")
        ok = ok and agree
    out.result(record, "\n".join(lines))
    return EXIT_OK if ok else EXIT_INVALID


def cmd_fmt(args, out: Out) -> int:
    text = _read(args.file)
    if args.file.endswith(".hrs"):
        formatted = print_system(read_system(text))
    else:
        doc, diags = parse(text)
        if diags:
            raise Invalid("SyntaxError", f"{len(diags)} diagnostic(s)", diags)
        formatted = print_document(doc)
    if args.check:
        same = formatted == text
        out.result({"command": "fmt", "file": args.file, "canonical": same},
                   f"{args.file}: {'canonical' if same else 'would reformat'}")
        return EXIT_OK if same else EXIT_INVALID
    target = args.file if args.in_place else args.output
    _write(target, formatted, out)
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------


def default_fuel() -> int:
    raw = os.environ.get("SCHEMAKERN_FUEL")
    if raw is None:
        return DEFAULT_FUEL
    try:
        return max(1, int(raw))
    except ValueError:
        return DEFAULT_FUEL


def _global_flags(p: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--fuel", type=int, default=d(default_fuel()), help="step budget for rewriting and unfolding")
    p.add_argument("--format", choices=("text", "json"), default=d("text"), help="output style")
    p.add_argument("--seed", type=int, default=d(None), help="seed for link resolution order")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="schemakern", description="Check, evaluate and translate proof schemata.")
    _global_flags(parser, False)
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, helptext: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=helptext)
        _global_flags(p, True)
        return p

    p = command("check", "validate a .psk document")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = command("unfold", "evaluate a schema at numerals")
    p.add_argument("file")
    p.add_argument("--subst", default="", help='assignments such as "alpha=3,beta=2"')
    p.add_argument("--emit", metavar="PATH", help="write the unfolded proof here")
    p.add_argument("--expand-computational", action="store_true",
                   help="expand links into computational sub-schemata instead of citing them as axioms")
    p.set_defaults(func=cmd_unfold)

    p = command("translate", "convert between schemata and induction proofs")
    p.add_argument("file")
    p.add_argument("--to", choices=("mvlkie", "schema", "pra"), required=True)
    p.add_argument("--eliminate-e", action="store_true", help="replace rewriting steps by axioms and cuts")
    p.add_argument("--generalize", action="store_true", help="close the end-sequent under universal quantifiers")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_translate)

    h = command("herbrand", "Herbrand systems of existential schemata")
    hs = h.add_subparsers(dest="action", required=True)
    for action, helptext in (("extract", "print the W-rules"), ("eval", "normalize the witness table"),
                             ("verify", "check the Herbrand disjunction")):
        q = hs.add_parser(action, help=helptext)
        _global_flags(q, True)
        q.add_argument("file")
        if action == "extract":
            q.add_argument("-o", "--output")
        else:
            q.add_argument("--params", required=True, help='values such as "2,3"')
    h.set_defaults(func=cmd_herbrand)

    p = command("fmt", "print a document in canonical form")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.add_argument("-i", "--in-place", action="store_true")
    p.add_argument("--check", action="store_true", help="exit 1 if the file is not canonical")
    p.set_defaults(func=cmd_fmt)
    return parser


KNOWN_ERRORS = (EvaluationError, TranslationError, HerbrandError, FuelExhausted, BuildError)


def main(argv=None, stdout=None, stderr=None) -> int:
    out = Out("text", stdout or sys.stdout, stderr or sys.stderr)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INVALID
    out.fmt = args.format
    filename = getattr(args, "file", "<input>")
    try:
        return args.func(args, out)
    except Invalid as e:
        for d in e.diagnostics:
            out.diagnostic(d, filename)
        if not e.diagnostics:
            out.diagnostic(Diagnostic("error", NO_SPAN, e.code, str(e)), filename)
        return EXIT_INVALID
    except ParseFailure as e:
        for d in e.diagnostics:
            out.diagnostic(d, filename)
        return EXIT_INVALID
    except SyntaxErr as e:
        out.diagnostic(Diagnostic("error", tuple(e.span), "SyntaxError", str(e)), filename)
        return EXIT_INVALID
    except KNOWN_ERRORS as e:
        code = getattr(e, "code", type(e).__name__)
        out.diagnostic(Diagnostic("error", NO_SPAN, code, str(e)), filename)
        return EXIT_INVALID
    except Exception as e:  # noqa: BLE001 - anything else is a kernel bug
        out.diagnostic(Diagnostic("error", NO_SPAN, "InternalError", f"{type(e).__name__}: {e}"), filename)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
