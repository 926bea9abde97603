"""Interpretations: translation shapes, soundness, mode duality and fragment audit."""

import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from wb.interp import (EXISTENTIAL, UNIVERSAL, Instance, Interpretation, InterpretationError,
                       builtin_instance, check_formula, corrupt_function, field_extension_interp,
                       identity_interp, multiplication_polynomials, residue_value_interps,
                       translate_formula, translate_term, translation_variables,
                       verify_interpretation)
from wb.logic.parser import parse_formula, parse_term
from wb.logic.prenex import classify_fragment, to_prenex
from wb.logic.syntax import (TOP, And, App, Eq, Exists, Not, Var, conj, exists_many,
                             residue_signature, ring_signature)
from wb.randgen import random_formula, random_prenex

R = ring_signature()
K = "K"


def F(text, sig=R):
    return parse_formula(text, sig)


def random_corpus(seed, count, qr=3, size=6):
    rng = random.Random(seed)
    free = [Var("a", K), Var("b", K)]
    return [random_formula(rng, R, free[: rng.randint(0, 2)], qr=rng.randint(0, qr), size=size)
            for _ in range(count)]


# ---------------------------------------------------------------------------
# translation shapes


def test_variable_term_shape():
    residue, _ = residue_value_interps()
    x = Var("x", "k")
    y = (Var("y_1", K),)
    got = translate_term(residue, x, EXISTENTIAL)
    xs = translation_variables(residue, x)[x]
    D, E = residue.domain, residue.eq
    assert got == conj([D.instantiate(xs), D.instantiate(y), E.instantiate(xs + y)])


def test_constant_term_shape():
    residue, _ = residue_value_interps()
    y = (Var("y_1", K),)
    got = translate_term(residue, App("1k", (), "k"), EXISTENTIAL)
    assert got == And(residue.domain.instantiate(y), residue.constants["1k"].instantiate(y))


def test_composite_term_shape():
    residue, _ = residue_value_interps()
    t = parse_term("(negk x:k)", residue_signature())
    got = translate_term(residue, t, EXISTENTIAL)
    assert isinstance(got, Exists)
    v = got.var
    body = got.body
    assert isinstance(body, And)
    assert body.right == residue.functions["negk"].instantiate((v, Var("y_1", K)))
    universal = translate_term(residue, t, UNIVERSAL)
    assert type(universal).__name__ == "Forall"


def test_formula_cases():
    I = field_extension_interp(2, [1, 1, 1])
    assert translate_formula(I, TOP) == TOP
    theta = F("(= x 0K)")
    assert translate_formula(I, Not(theta)) == Not(translate_formula(I, theta))
    ex = translate_formula(I, F("(exists x (= x 0K))"))
    x1, x2 = Var("x_1", K), Var("x_2", K)
    assert ex == exists_many((x1, x2), And(I.domain.instantiate((x1, x2)), translate_formula(I, theta)))


def test_missing_symbol():
    I = identity_interp(R)
    broken = Interpretation.__new__(Interpretation)
    broken.__dict__.update(I.__dict__)
    broken.functions = {k: v for k, v in I.functions.items() if k != "mul"}
    with pytest.raises(InterpretationError):
        translate_formula(broken, F("(= (mul x x) x)"))


# ---------------------------------------------------------------------------
# field extensions


def test_multiplication_polynomials_degree2():
    # beta^2 = -(alpha_0 + alpha_1 beta): the beta^2 row is linear in the parameters
    r = multiplication_polynomials(2, 2)
    assert len(r) == 3
    assert r[0][0] == {(0, 0): 1} and r[1][1] == {(0, 0): 1}
    assert r[2][0] and r[2][1]


def test_f4_over_f2_arity_and_soundness():
    inst = builtin_instance("ext:2:1,1,1")
    assert inst.I.n == 2
    assert inst.I.quantifier_free()
    rep = verify_interpretation(inst, random_corpus(1, 15))
    assert rep["structural"]["ok"]
    assert rep["ok"], rep["failures"]


def test_degree_one_extension():
    inst = builtin_instance("ext:3:2,1")       # X + 2 over F_3
    assert inst.I.n == 1
    assert verify_interpretation(inst, random_corpus(2, 10))["ok"]


def test_reducible_minpoly_rejected():
    with pytest.raises(InterpretationError):
        field_extension_interp(2, [0, 0, 1])
    with pytest.raises(InterpretationError):
        field_extension_interp(2, [1, 0, 1])
    with pytest.raises(InterpretationError):
        field_extension_interp(2, [1, 1, 2])


def test_extension_over_f3_degree2():
    inst = builtin_instance("ext:3:1,0,1")      # X^2 + 1 over F_3
    rep = verify_interpretation(inst, random_corpus(3, 6, qr=2))
    assert rep["ok"], rep["failures"]


# ---------------------------------------------------------------------------
# residue and value group


def test_residue_value_definitions_quantifier_free():
    residue, value = residue_value_interps()
    for I in (residue, value):
        assert I.quantifier_free()
        for d in I.definitions().values():
            assert str(classify_fragment(d.formula)) == "QuantifierFree"
    x, y, z = Var("x", K), Var("y", K), Var("z", K)
    res = lambda t: App("res", (t,), "k")
    val = lambda t: App("v", (t,), "G")
    assert Eq(App("addk", (res(x), res(y)), "k"), res(z)) == residue.functions["addk"].formula.right
    assert value.relations["leG"].formula.args == (val(x), val(y))
    assert value.constants["inf"].formula == Eq(val(x), App("inf", (), "G"))


@pytest.mark.parametrize("spec", ["residue:2", "residue:3", "value:3"])
def test_residue_value_on_mock_structure(spec):
    inst = builtin_instance(spec)
    sig = inst.I.source
    rng = random.Random(7)
    s = sig.sorts[0]
    corpus = [random_formula(rng, sig, [Var("a", s)], qr=2, size=5) for _ in range(12)]
    rep = verify_interpretation(inst, corpus)
    assert rep["ok"], rep["failures"]


# ---------------------------------------------------------------------------
# verification controls


def test_identity_interpretation_passes():
    rep = verify_interpretation(builtin_instance("identity:3"), random_corpus(4, 20))
    assert rep["ok"]


def test_corrupted_definition_is_caught():
    inst = builtin_instance("ext:2:1,1,1")
    bad = Instance(corrupt_function(inst.I, "mul"), inst.A, inst.B, inst.phi, inst.param_values)
    f = F("(exists y (= (mul y y) (add y 1K)))")
    g = F("(forall y (= (mul y 1K) y))")
    rep = verify_interpretation(bad, [f, g])
    assert not rep["ok"]
    assert rep["structural"]["functions"]["mul"] is False
    assert rep["failures"]


def test_corrupted_arity_one():
    inst = builtin_instance("identity:3")
    bad = Instance(corrupt_function(inst.I, "add"), inst.A, inst.B, inst.phi)
    rep = verify_interpretation(bad, [F("(= (add a a) a)")])
    assert not rep["ok"] and rep["failures"] == ["(= (add a:K a:K) a:K)"]


def test_json_round_trip():
    I = field_extension_interp(2, [1, 1, 1])
    J = Interpretation.from_json(json.loads(json.dumps(I.to_json())))
    assert J.functions == I.functions and J.domain == I.domain and J.params == I.params
    inst = builtin_instance("ext:2:1,1,1")
    inst2 = Instance(J, inst.A, inst.B, inst.phi, J.param_values)
    assert verify_interpretation(inst2, random_corpus(5, 5))["ok"]


# ---------------------------------------------------------------------------
# properties


@settings(max_examples=25)
@given(st.integers(0, 10 ** 6))
def test_modes_agree_and_sound(seed):
    inst = builtin_instance("ext:2:1,1,1")
    rng = random.Random(seed)
    f = random_formula(rng, R, [Var("a", K)], qr=2, size=6)
    rep = check_formula(inst, f)
    assert rep["sound"] and rep["modes_agree"]


@settings(max_examples=25)
@given(st.integers(0, 10 ** 6), st.sampled_from(["E", "A"]), st.integers(1, 3))
def test_select_strategy_preserves_class(seed, kind, m):
    inst = builtin_instance("ext:2:1,1,1")
    rng = random.Random(seed)
    f = random_prenex(rng, R, kind, m, [Var("a", K)], block_size=1, matrix_size=2)
    assert classify_fragment(f).within(kind, m)
    start = EXISTENTIAL if kind == "E" else UNIVERSAL
    g = translate_formula(inst.I, f, start, "select")
    assert classify_fragment(to_prenex(g)).within(kind, m)
