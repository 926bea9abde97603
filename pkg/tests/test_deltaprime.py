"""Normal-form classification and closed-term normalization in the valued-field language."""

import pytest

from wb.deltaprime import (NotClosedError, closed_value, delta_prime_classify, normalize_closed_terms,
                           residue_numeral, simplify)
from wb.logic.parser import parse_formula, parse_term, render, render_term
from wb.logic.syntax import BOT, TOP, And, Exists, Not, Or, Var, valued_field_signature

from cases_deltaprime import CLASSIFY, NORMALIZE

SIG = valued_field_signature()


def P(text):
    return parse_formula(text, SIG)


@pytest.mark.parametrize("text,n,accepted,expected", CLASSIFY, ids=[str(i) for i in range(len(CLASSIFY))])
def test_classification_corpus(text, n, accepted, expected):
    r = delta_prime_classify(P(text), n)
    assert r.accepted is accepted
    if accepted:
        assert [c.shape for c in r.components] == expected
        assert r.offending is None
    else:
        assert render(r.offending) == expected and r.reason


@pytest.mark.parametrize("text,expected", NORMALIZE, ids=[str(i) for i in range(len(NORMALIZE))])
def test_normalization_corpus(text, expected):
    if isinstance(expected, type):
        with pytest.raises(expected):
            normalize_closed_terms(P(text))
    else:
        assert render(normalize_closed_terms(P(text))) == expected


def test_classification_respects_n():
    f = P("(exists z:k (forall w:k (= z:k (mulk w:k (ac x:K)))))")
    assert not delta_prime_classify(f, 1).accepted
    assert delta_prime_classify(f, 2).accepted
    with pytest.raises(ValueError):
        delta_prime_classify(f, -1)


def test_closed_values():
    assert closed_value(parse_term("(add 1K (mul 1K 1K))", SIG)) == 2
    assert closed_value(parse_term("(neg (sub 1K (add 1K 1K)))", SIG)) == 1
    assert closed_value(parse_term("(lam_2_01 (add 1K 1K) 1K 1K)", SIG)) == 0
    with pytest.raises(NotClosedError):
        closed_value(parse_term("(add x:K 1K)", SIG))
    assert render_term(residue_numeral(3)) == "(addk (addk 1k 1k) 1k)"


def test_simplify_absorption():
    x = Var("x", "k")
    atom = P("(= (ac y:K) 1k)")
    assert simplify(And(TOP, atom)) == atom
    assert simplify(Or(atom, TOP)) == TOP
    assert simplify(Not(BOT)) == TOP
    assert simplify(Exists(x, And(BOT, atom))) == BOT


RESIDUE_PIECES = [
    "(exists z:k (= (mulk z:k (ac x:K)) (ac y:K)))",
    "(= (ac x:K) 1k)",
]
GROUP_PIECES = [
    "(exists g:G (leG (v x:K) g:G))",
    "(ltG (v x:K) 0G)",
]


@pytest.mark.parametrize("sentence", [s for s, e in NORMALIZE if isinstance(e, str)])
@pytest.mark.parametrize("piece", RESIDUE_PIECES + GROUP_PIECES)
def test_normalized_output_combined_with_shapes_is_accepted(sentence, piece):
    g = normalize_closed_terms(P(sentence))
    for combo in (And(g, P(piece)), Or(P(piece), g)):
        assert delta_prime_classify(combo, 1).accepted
