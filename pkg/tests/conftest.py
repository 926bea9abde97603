"""Shared hypothesis strategies and helpers for the test suite."""

import random

import pytest
from hypothesis import settings, strategies as st

from wb.algebra.ratfunc import function_field

settings.register_profile("default", max_examples=60, deadline=None, derandomize=True)
settings.load_profile("default")


def poly_terms(nvars, q, max_deg=3, max_terms=4):
    """Strategy for polynomial term dictionaries {exponent tuple: coefficient}."""
    exps = st.tuples(*[st.integers(0, max_deg)] * nvars)
    return st.dictionaries(exps, st.integers(1, q - 1), max_size=max_terms)


def field_elements(K, max_deg=3, allow_zero=True, fractions=True):
    """Strategy for elements of the rational function field K."""
    num = poly_terms(K.nvars, K.q, max_deg).map(lambda t: K(K.poly(t)))
    den = poly_terms(K.nvars, K.q, max_deg).filter(bool).map(lambda t: K(K.poly(t)))
    out = st.builds(lambda a, b: a / b, num, den) if fractions else num
    if not allow_zero:
        out = out.filter(lambda x: not x.is_zero())
    return out


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def F2t():
    return function_field(2, ("t",))


@pytest.fixture
def F2tt():
    return function_field(2, ("t1", "t2"))


# ---------------------------------------------------------------------------
# naive Tarskian evaluator, written independently of the compiled one

def naive_term(S, t, env):
    from wb.logic.syntax import Var
    if isinstance(t, Var):
        return env[t.key]
    return S.apply(t.fn, tuple(naive_term(S, a, env) for a in t.args))


def naive_eval(S, f, env):
    from wb.logic.syntax import And, Bot, Eq, Exists, Implies, Not, Or, Rel, Top
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Eq):
        return naive_term(S, f.lhs, env) == naive_term(S, f.rhs, env)
    if isinstance(f, Rel):
        return tuple(naive_term(S, a, env) for a in f.args) in S.relations[f.name]
    if isinstance(f, Not):
        return not naive_eval(S, f.body, env)
    if isinstance(f, And):
        return naive_eval(S, f.left, env) and naive_eval(S, f.right, env)
    if isinstance(f, Or):
        return naive_eval(S, f.left, env) or naive_eval(S, f.right, env)
    if isinstance(f, Implies):
        return (not naive_eval(S, f.left, env)) or naive_eval(S, f.right, env)
    results = (naive_eval(S, f.body, {**env, f.var.key: x}) for x in range(S.sizes[f.var.sort]))
    return any(results) if isinstance(f, Exists) else all(results)
