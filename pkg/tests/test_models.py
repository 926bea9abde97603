"""Finite structures and the compiled evaluator, checked against a naive one."""

import itertools
import json
import random

import pytest
from hypothesis import given, strategies as st

from wb.logic.parser import parse_formula, parse_term
from wb.logic.syntax import And, Or, Var, ring_signature
from wb.models import (FiniteStructure, StructureError, UnassignedVariable, builtin_structure,
                       define_set, eval_formula, eval_term, extension_field_structure,
                       finite_field_structure, is_irreducible, load_structure)
from wb.randgen import random_assignment, random_formula, random_structure, small_signature

from conftest import naive_eval

R = ring_signature()


def F(text):
    return parse_formula(text, R)


def T(text):
    return parse_term(text, R)


def test_term_examples():
    assert eval_term(finite_field_structure(2), T("(add 1K 1K)")) == 0
    assert eval_term(finite_field_structure(3), T("x"), {"x": 2}) == 2
    two_times_three = T("(mul (add 1K 1K) (add 1K (add 1K 1K)))")
    assert eval_term(finite_field_structure(5), two_times_three) == 1


def test_formula_examples():
    assert eval_formula(finite_field_structure(3), F("(forall x (exists y (= (add (add (add y y) y) x) x)))"))
    assert not eval_formula(finite_field_structure(2),
                            F("(exists x (and (= (mul x x) x) (not (= x 0K)) (not (= x 1K))))"))
    assert eval_formula(finite_field_structure(4), F("(forall x (exists z (= (mul z z) x)))"))
    assert not eval_formula(finite_field_structure(5), F("(forall x (exists z (= (mul z z) x)))"))


def test_define_set_examples():
    x = Var("x", "K")
    assert define_set(finite_field_structure(3), F("(= x x)"), {}, (x,)) == {(0,), (1,), (2,)}
    squares = define_set(finite_field_structure(5), F("(exists y (= (mul y y) x))"), {}, (x,))
    assert squares == {(0,), (1,), (4,)}
    assert define_set(finite_field_structure(5), F("bot"), {}, (x,)) == set()


def test_unassigned_variable():
    with pytest.raises(UnassignedVariable):
        eval_formula(finite_field_structure(2), F("(= x 0K)"), {})
    with pytest.raises(UnassignedVariable):
        eval_term(finite_field_structure(2), T("(add x 1K)"))
    with pytest.raises(StructureError):
        eval_formula(finite_field_structure(2), F("(= x 0K)"), {"x": 5})


def test_assignment_key_forms():
    S = finite_field_structure(5)
    f = F("(= x 1K)")
    assert eval_formula(S, f, {"x": 1})
    assert eval_formula(S, f, {"x:K": 1})
    assert eval_formula(S, f, {Var("x", "K"): 1})


def test_structure_validation():
    sig = small_signature()
    S = random_structure(random.Random(0), sig)
    d = S.to_json()
    bad = json.loads(json.dumps(d))
    bad["functions"]["f"] = bad["functions"]["f"][:-1] if len(bad["functions"]["f"]) > 1 else []
    with pytest.raises(StructureError):
        FiniteStructure.from_json(bad)
    empty = json.loads(json.dumps(d))
    empty["sizes"]["D"] = 0
    with pytest.raises(StructureError):
        FiniteStructure.from_json(empty)
    missing = json.loads(json.dumps(d))
    del missing["constants"]["c"]
    with pytest.raises(StructureError):
        FiniteStructure.from_json(missing)


def test_json_round_trip(tmp_path):
    S = random_structure(random.Random(3), small_signature())
    path = tmp_path / "s.json"
    path.write_text(json.dumps(S.to_json()))
    T2 = load_structure(str(path))
    assert T2.functions == S.functions and T2.relations == S.relations and T2.sizes == S.sizes


def test_builtin_specs():
    assert builtin_structure("gf:7").sizes == {"K": 7}
    assert builtin_structure("ext:2:1,1,1").sizes == {"K": 4}
    assert builtin_structure("vf:3").sizes == {"K": 3, "k": 3, "G": 2}
    assert builtin_structure("bs").sizes == {"D": 8, "P": 3}
    for bad in ("gf:6", "ext:2:0,0,1", "nope", "gf"):
        with pytest.raises(StructureError):
            builtin_structure(bad)


def test_extension_field_is_a_field():
    E = extension_field_structure(2, [1, 1, 1])
    axioms = [
        "(forall x (forall y (= (mul x y) (mul y x))))",
        "(forall x (or (= x 0K) (exists y (= (mul x y) 1K))))",
        "(forall x (forall y (forall z (= (mul x (add y z)) (add (mul x y) (mul x z))))))",
    ]
    for a in axioms:
        assert eval_formula(E, F(a))
    # F_4 and the builtin F_4 satisfy the same sentences checked here
    G = finite_field_structure(4)
    for s in ["(exists x (and (not (= x 0K)) (not (= x 1K)) (= (mul x x) (add x 1K))))",
              "(forall x (= (mul x (mul x (mul x x))) x))"]:
        assert eval_formula(E, F(s)) == eval_formula(G, F(s)) is True


def test_irreducibility():
    assert is_irreducible(2, [1, 1, 1])
    assert not is_irreducible(2, [0, 0, 1])
    assert not is_irreducible(2, [1, 0, 1])
    assert is_irreducible(3, [1, 0, 1])
    assert is_irreducible(2, [1, 1, 0, 1])
    assert is_irreducible(4, [2, 1, 1])          # X^2 + X + w over F_4
    with pytest.raises(ValueError):
        is_irreducible(2, [1, 0])


@given(st.integers(0, 10 ** 6))
def test_compiled_matches_naive(seed):
    rng = random.Random(seed)
    sig = small_signature()
    free = [Var("a", "D"), Var("b", "E")]
    S = random_structure(rng, sig)
    f = random_formula(rng, sig, free, qr=3, size=10)
    for _ in range(5):
        env = random_assignment(rng, S, free)
        assert eval_formula(S, f, env) == naive_eval(S, f, env)


@given(st.integers(0, 10 ** 6))
def test_define_set_boolean_laws(seed):
    rng = random.Random(seed)
    sig = small_signature()
    a = Var("a", "D")
    S = random_structure(rng, sig)
    f = random_formula(rng, sig, [a], qr=2, size=6)
    g = random_formula(rng, sig, [a], qr=2, size=6)
    Df, Dg = define_set(S, f, {}, (a,)), define_set(S, g, {}, (a,))
    assert define_set(S, And(f, g), {}, (a,)) == Df & Dg
    assert define_set(S, Or(f, g), {}, (a,)) == Df | Dg
    assert Df <= set(itertools.product(S.carrier("D")))
