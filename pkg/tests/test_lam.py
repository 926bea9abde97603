"""Lambda functions, p-independence, adjugate left inverses, rewriting and closure."""

import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from wb.algebra.matrix import ExactMatrix
from wb.algebra.ratfunc import function_field
from wb.lam import (LambdaPremiseError, ambient_lambda, frobenius_root, in_span, is_lambda_closed,
                    is_p_independent, is_p_independent_direct, is_p_independent_jacobian,
                    lambda_closure, lambda_coords, lambda_rewrite, left_inverse, mon,
                    support_sequence, term_field)
from wb.randgen import random_element

from conftest import field_elements

K1 = function_field(2, ("t",))
K2 = function_field(2, ("t1", "t2"))
K3 = function_field(3, ("t",))
K33 = function_field(3, ("t1", "t2"))
t = K1.gen(0)
t1, t2 = K2.gens()


# ---------------------------------------------------------------------------
# monomials and Frobenius


def test_mon_enumeration_is_restriction_compatible():
    for p in (2, 3):
        for nu in range(0, 3):
            for mu in range(nu, 4):
                head = mon(mu, p)[: p ** nu]
                assert head == [m + (0,) * (mu - nu) for m in mon(nu, p)]
    assert len(mon(3, 3)) == 27 and len(set(mon(3, 3))) == 27


def test_frobenius_root_examples():
    assert frobenius_root(t ** 2) == t
    assert frobenius_root(t) is None
    s1, s2 = K33.gens()
    assert frobenius_root(s1 ** 3 + s2 ** 3) == s1 + s2
    K4 = function_field(4, ("t",))
    w = K4.const(2)
    assert frobenius_root(w * K4.gen(0) ** 2) ** 2 == w * K4.gen(0) ** 2


# ---------------------------------------------------------------------------
# ambient coordinates


def test_ambient_examples():
    a = ambient_lambda(t)
    assert a[(0,)] == K1.zero() and a[(1,)] == K1.one()
    b = ambient_lambda(t ** 2 + t)
    assert b[(0,)] == t and b[(1,)] == K1.one()
    c = ambient_lambda(t1 * t2)
    assert c[(1, 1)] == K2.one()
    assert all(x.is_zero() for m, x in zip(c.monomials, c.coords) if m != (1, 1))


@pytest.mark.parametrize("K", [K1, K2, K3], ids=["F2(t)", "F2(t1,t2)", "F3(t)"])
@given(data=st.data())
def test_ambient_reconstruction_and_frobenius(K, data):
    a = data.draw(field_elements(K, max_deg=3))
    assert ambient_lambda(a).reconstruct() == a
    ap = ambient_lambda(a ** K.p)
    trivial = (0,) * K.nvars
    for m, x in zip(ap.monomials, ap.coords):
        assert x == (a if m == trivial else K.zero())


# ---------------------------------------------------------------------------
# p-independence


def test_p_independence_examples():
    assert is_p_independent([t])
    assert not is_p_independent([t ** 2])
    assert is_p_independent([t1, t1 + t2])
    assert not is_p_independent([t1, t2, t1 * t2])        # longer than the imperfection degree
    assert not is_p_independent([t1, t1])                 # repeated entries are dependent
    assert not is_p_independent([K2.one()])


SUBSET_POOL = [t1, t2, t1 * t2, t1 + t2, t1 ** 2 * t2]


@pytest.mark.parametrize("mask", range(1, 32))
def test_three_routes_agree_on_pool_subsets(mask):
    b = [x for i, x in enumerate(SUBSET_POOL) if mask >> i & 1]
    v = is_p_independent(b, K2)
    assert v == is_p_independent_direct(b, K2) == is_p_independent_jacobian(b, K2)


@settings(max_examples=30)
@given(data=st.data())
def test_three_routes_agree_random(data):
    K = data.draw(st.sampled_from([K2, K33]))
    k = data.draw(st.integers(1, 2))
    b = [data.draw(field_elements(K, max_deg=2, allow_zero=False)) for _ in range(k)]
    v = is_p_independent(b, K)
    assert v == is_p_independent_direct(b, K) == is_p_independent_jacobian(b, K)


# ---------------------------------------------------------------------------
# left inverse


def test_left_inverse_examples():
    from fractions import Fraction
    I3 = ExactMatrix.identity(3, K1.zero(), K1.one())
    L, mu = left_inverse(I3)
    assert mu == [0, 1, 2] and L.is_identity()
    F5 = function_field(5, ())
    A = ExactMatrix.over(F5, [[1], [1]])
    L, mu = left_inverse(A)
    assert mu == [0] and L.rows == [[F5.one(), F5.zero()]]
    with pytest.raises(ValueError):
        left_inverse(ExactMatrix.over(F5, [[1, 2], [2, 4]]))
    with pytest.raises(ValueError):
        left_inverse(ExactMatrix.rational([[Fraction(1), Fraction(2)]]))


def _random_full_rank(rng, K, m, n, elem):
    while True:
        A = ExactMatrix([[elem() for _ in range(n)] for _ in range(m)], K.zero(), K.one())
        if A.rank() == n:
            return A


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6))
def test_left_inverse_property(seed):
    rng = random.Random(seed)
    F5 = function_field(5, ())
    n = rng.randint(1, 3)
    m = rng.randint(n, 6)
    A = _random_full_rank(rng, F5, m, n, lambda: F5.const(rng.randrange(5)))
    L, mu = left_inverse(A)
    assert (L @ A).is_identity()
    assert all(L[i, j].is_zero() for i in range(n) for j in range(m) if j not in mu)
    # mu is the lexicographically least invertible row set
    for combo in itertools.combinations(range(m), n):
        if A.submatrix(list(combo)).rank() == n:
            assert list(combo) == mu
            break
    B = _random_full_rank(rng, K1, 4, 2, lambda: random_element(rng, K1, 2, 2))
    LB, _ = left_inverse(B)
    assert (LB @ B).is_identity()


# ---------------------------------------------------------------------------
# coordinates in a chosen base


def test_lambda_examples():
    c = lambda_coords(t ** 3, [t])
    assert c.defined and c[(0,)].is_zero() and c[(1,)] == t
    c = lambda_coords(K1.one(), [t])
    assert c[(0,)] == K1.one() and c[(1,)].is_zero()
    c = lambda_coords(t2, [t1])
    assert not c.defined and all(x.is_zero() for x in c.coords)
    z = lambda_coords(K1.zero(), [t])
    assert z.defined and all(x.is_zero() for x in z.coords)
    assert not in_span(t2, [t1]) and in_span(t1 ** 3 + t2 ** 2, [t1])


@settings(max_examples=30)
@given(data=st.data())
def test_reconstruction_in_chosen_base(data):
    K = data.draw(st.sampled_from([K1, K2, K3]))
    b = [data.draw(field_elements(K, max_deg=2, allow_zero=False)) for _ in range(K.nvars)]
    if not is_p_independent(b, K):
        return
    a = data.draw(field_elements(K, max_deg=3))
    c = lambda_coords(a, b, K)
    # with |b| equal to the imperfection degree every element is in the span
    assert c.defined and c.reconstruct() == a


# ---------------------------------------------------------------------------
# support sequences and rewriting


def test_support_sequence_examples():
    d = support_sequence([(t, t ** 2), (t ** 3, t)])
    assert d.supports[0] == (0,)
    c = support_sequence([(K1.one(), K1.const(1)), (K1.zero(), K1.one())])
    assert c.supports == [(), ()] and c.l == 0
    U = function_field(2, ("u0", "u1", "u2", "u3"))
    u = U.gens()
    f = support_sequence([(x,) for x in u])
    assert f.supports == [(0,)] * 4 and f.l == 0
    with pytest.raises(ValueError):
        support_sequence([])
    assert f.report()["supports"] == [[1]] * 4


def test_support_sequence_is_decreasing_and_independent():
    rng = random.Random(5)
    K = function_field(2, ("t1", "t2", "t3"))
    seq = [tuple(random_element(rng, K, 2, 2) for _ in range(3)) for _ in range(4)]
    d = support_sequence(seq, (K.gen(2),))
    for a, b in zip(d.supports, d.supports[1:]):
        assert set(b) <= set(a)
    assert all(d.supports[n] == d.supports[d.l] for n in range(d.l, len(seq)))
    assert is_p_independent(d.basis(d.l), K)


def test_rewrite_examples():
    X = term_field(2, 1, 0)
    x = X.gen(0)
    data = support_sequence([(t,)])
    r = lambda_rewrite([x, x], data, 0)
    assert r.agree and r.coords[(0,)].is_zero() and r.coords[(1,)] == K1.one()
    r2 = lambda_rewrite([x ** 2, x], data, 0)
    assert r2.agree and r2.coords[(0,)] == t and r2.coords[(1,)].is_zero()
    with pytest.raises(LambdaPremiseError):
        lambda_rewrite([x, X.one()], data, 0)


def test_rewrite_with_parameters():
    X = term_field(2, 1, 1)
    x, y = X.gens()
    data = support_sequence([(t1 + t2 ** 2,), (t1 ** 3,), (t1 + t2 ** 4,)], (t2,))
    for n in range(data.l, 3):
        r = lambda_rewrite([x * y + x ** 3, x], data, n)
        assert r.agree


# ---------------------------------------------------------------------------
# closure


def test_closure_examples():
    full = lambda_closure([t], t ** 3 + t)
    assert full.stabilized and full.iterations == 0 and not full.added
    from_prime = lambda_closure([], t)
    assert from_prime.stabilized and from_prime.iterations <= 1
    assert t in from_prime.generators
    squares = lambda_closure([t ** 2], t ** 2)
    assert squares.stabilized and t in squares.added


def test_closure_reports_exhaustion():
    rep = lambda_closure([t ** 4], t ** 4, max_iter=0)
    assert not rep.stabilized


def test_closedness_examples():
    assert is_lambda_closed([t], K1).closed is True
    rep = is_lambda_closed([t ** 2], K1)
    assert rep.closed is False
    assert rep.witness["a"] == "t^2" and rep.witness["value"] == "t"
    assert is_lambda_closed([], K1).closed is True
