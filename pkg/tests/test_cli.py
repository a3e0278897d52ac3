import io
import json

import pytest

from schemakern import library as L
from schemakern.cli import build_parser, default_fuel, main

FIXTURES = sorted(L.documents())


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_check_assoc(fixture_path):
    code, out, err = run("check", fixture_path("assoc"))
    assert code == 0 and err == ""
    assert out.splitlines()[0] == "valid, complete P-schema, 2 components"
    assert "strict: yes" in out


def test_check_proof_document(fixture_path):
    code, out, _ = run("check", fixture_path("comm_pra"))
    assert code == 0
    assert out.strip() == "proof comm: valid, inactive proof, 174 nodes"


def test_check_corrupted_file(tmp_path, fixture_path):
    text = open(fixture_path("assoc")).read().replace("(arg p:alpha)", "(arg (s p:alpha))")
    bad = tmp_path / "corrupted.psk"
    bad.write_text(text)
    code, out, err = run("check", str(bad))
    assert code == 1
    diags = [line for line in err.splitlines() if ": error: " in line]
    assert diags
    for line in diags:
        _, row, col = line.split(":")[:3]
        assert 1 <= int(row) <= text.count("\n") + 1 and int(col) >= 1


def test_syntax_error_diagnostic(tmp_path):
    bad = tmp_path / "bad.psk"
    bad.write_text("(proof a (rule ax (seq (ant) (suc)))")
    code, _, err = run("check", str(bad))
    assert code == 1
    assert err.startswith(f"{bad}:1:1: error: Syntax:")


def test_unfold_assoc(fixture_path, tmp_path):
    emit = tmp_path / "u.psk"
    code, out, _ = run("unfold", fixture_path("assoc"), "--subst", "alpha=1,beta=0,gamma=0", "--emit", str(emit))
    assert code == 0
    assert "verdict: valid" in out
    code, out, _ = run("check", str(emit))
    assert code == 0 and out.startswith("proof unfolded: valid, inactive proof")


def test_unfold_to_stdout_is_parseable(fixture_path):
    from schemakern.syntax import parse_strict

    code, out, _ = run("unfold", fixture_path("comm"), "--subst", "alpha=2,beta=1")
    assert code == 0
    doc = parse_strict(out)
    assert list(doc.proofs) == ["unfolded"]


def test_unfold_rejects_unknown_parameter(fixture_path):
    code, _, err = run("unfold", fixture_path("assoc"), "--subst", "zeta=1")
    assert code == 1 and "BadSubstitution" in err


def test_unfold_fuel_flag(fixture_path):
    code, _, err = run("--fuel", "2", "unfold", fixture_path("comm"), "--subst", "alpha=3,beta=3")
    assert code == 1 and "FuelExhausted" in err


def test_fuel_from_environment(monkeypatch):
    monkeypatch.setenv("SCHEMAKERN_FUEL", "77")
    assert default_fuel() == 77
    assert build_parser().parse_args(["check", "x"]).fuel == 77


@pytest.mark.parametrize("target", ["mvlkie", "schema"])
def test_translate_then_check(fixture_path, tmp_path, target):
    out_file = tmp_path / "t.psk"
    code, out, _ = run("translate", fixture_path("comm"), "--to", target, "-o", str(out_file))
    assert code == 0 and out.strip().endswith("valid")
    assert run("check", str(out_file))[0] == 0


def test_translate_to_pra_needs_elimination(fixture_path, tmp_path):
    assert run("translate", fixture_path("comm_mvlkie"), "--to", "pra")[0] == 1
    out_file = tmp_path / "p.psk"
    code, _, _ = run("translate", fixture_path("comm_mvlkie"), "--to", "pra", "--eliminate-e", "-o", str(out_file))
    assert code == 0
    assert run("check", str(out_file))[1].strip() == "proof comm: valid, inactive proof, 174 nodes"


def test_herbrand_commands(fixture_path, tmp_path):
    hrs = tmp_path / "it.hrs"
    assert run("herbrand", "extract", fixture_path("iterate"), "-o", str(hrs))[0] == 0
    code, out, _ = run("herbrand", "eval", str(hrs), "--params", "3")
    assert code == 0 and out.strip() == "((f (f (f a))))"
    code, out, _ = run("herbrand", "verify", fixture_path("padded"), "--params", "2")
    assert code == 0 and "tautology: yes" in out and "agrees with unfolding: yes" in out


@pytest.mark.parametrize("name", FIXTURES)
def test_fmt_is_idempotent(fixture_path, tmp_path, name):
    src = tmp_path / "x.psk"
    src.write_text(open(fixture_path(name)).read().replace("\n  ", "\n    "))
    _, once, _ = run("fmt", str(src))
    src.write_text(once)
    _, twice, _ = run("fmt", str(src))
    assert once == twice == open(fixture_path(name)).read()
    assert run("fmt", "--check", str(src))[0] == 0


@pytest.mark.parametrize("name", FIXTURES)
def test_json_and_text_agree(fixture_path, name):
    code_t, text, _ = run("check", fixture_path(name))
    code_j, js, _ = run("--format", "json", "check", fixture_path(name))
    record = json.loads(js)
    assert code_t == code_j
    assert record["valid"] == (code_t == 0)
    for r in record["results"]:
        if r["kind"] == "schema":
            assert r["summary"] in text
        else:
            assert f"proof {r['name']}: {'valid' if r['valid'] else 'invalid'}" in text


def test_json_diagnostics_are_structured(tmp_path):
    bad = tmp_path / "bad.psk"
    bad.write_text("(frob)")
    code, _, err = run("--format", "json", "check", str(bad))
    rec = json.loads(err.splitlines()[0])["diagnostic"]
    assert code == 1 and rec["code"] == "Syntax" and rec["span"][:2] == [1, 1]


def test_usage_errors_exit_one():
    assert run("frob")[0] == 1
    assert run("check")[0] == 1


def test_global_flags_after_the_command(fixture_path):
    code, out, _ = run("check", fixture_path("assoc"), "--format", "json")
    assert code == 0 and json.loads(out)["valid"] is True


def test_internal_errors_exit_two(fixture_path, monkeypatch):
    import schemakern.cli as cli

    def boom(*_a, **_k):
        raise RuntimeError("kernel bug")

    monkeypatch.setattr(cli, "validate_schema", boom)
    code, _, err = run("check", fixture_path("assoc"))
    assert code == 2 and "InternalError" in err
