from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from schemakern.sexpr import read_all
from schemakern.syntax import read_formula, read_term
from schemakern.terms import App, Kind, Param, Var, numeral

settings.register_profile("kernel", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("kernel")

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "schemakern" / "fixtures"


def T(text: str):
    return read_term(read_all(text)[0])


def F(text: str):
    return read_formula(read_all(text)[0])


@pytest.fixture
def fixture_path():
    return lambda name: str(FIXTURES / f"{name}.psk")


PARAMS = [Param("alpha", Kind.PASSIVE), Param("beta", Kind.PASSIVE), Param("n", Kind.ACTIVE),
          Param("k", Kind.INTERNAL)]


def terms(max_leaves: int = 8):
    """Random arithmetic terms over 0, s, ^a, ^m and a few parameters."""
    leaves = st.one_of(st.integers(0, 4).map(numeral), st.sampled_from(PARAMS))
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            sub.map(lambda t: App("s", (t,))),
            st.tuples(sub, sub).map(lambda p: App("^a", p)),
            st.tuples(sub, sub).map(lambda p: App("^m", p)),
        ),
        max_leaves=max_leaves,
    )


def ground_terms(max_leaves: int = 6):
    leaves = st.integers(0, 3).map(numeral)
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            sub.map(lambda t: App("s", (t,))),
            st.tuples(sub, sub).map(lambda p: App("^a", p)),
            st.tuples(sub, sub).map(lambda p: App("^m", p)),
        ),
        max_leaves=max_leaves,
    )


X, Y = Var("x"), Var("y")
