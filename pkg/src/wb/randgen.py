"""Seeded random generators for formulas, structures and algebraic instances.

Every generator takes an explicit ``random.Random``; nothing reads global
random state.
"""

from __future__ import annotations

import itertools
import os
import random
from typing import Sequence

from .algebra.ratfunc import FieldElement, RationalFunctionField
from .logic.syntax import (And, App, Eq, Exists, Forall, Formula, Implies, Not, Or, Rel, Signature,
                           Term, Var)
from .models import FiniteStructure

DEFAULT_SEED = 20240601


def seed_from_env(default: int = DEFAULT_SEED) -> int:
    """The WB_SEED environment variable when set, else ``default``."""
    raw = os.environ.get("WB_SEED")
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"WB_SEED must be an integer, got {raw!r}") from None


def make_rng(seed: int | None = None) -> random.Random:
    return random.Random(seed_from_env() if seed is None else seed)


# ---------------------------------------------------------------------------
# formulas


def random_term(rng: random.Random, sig: Signature, sort: str, variables: Sequence[Var], depth: int) -> Term:
    vs = [v for v in variables if v.sort == sort]
    consts = [c for c, s in sig.constants.items() if s == sort]
    funcs = [f for f, (_, r) in sig.functions.items() if r == sort]
    leaves = [("var", v) for v in vs] + [("const", c) for c in consts]
    if depth <= 0 or not funcs or (leaves and rng.random() < 0.45):
        if not leaves:
            if not funcs:
                raise ValueError(f"no terms of sort {sort}")
            depth = max(depth, 1)
        else:
            kind, x = rng.choice(leaves)
            return x if kind == "var" else App(x, (), sort)
    fn = rng.choice(funcs)
    args, _ = sig.functions[fn]
    return App(fn, tuple(random_term(rng, sig, s, variables, depth - 1) for s in args), sort)


def random_atom(rng: random.Random, sig: Signature, variables: Sequence[Var], term_depth: int) -> Formula:
    choices = [("eq", s) for s in sig.sorts] + [("rel", r) for r in sig.relations]
    kind, x = rng.choice(choices)
    if kind == "eq":
        return Eq(random_term(rng, sig, x, variables, term_depth),
                  random_term(rng, sig, x, variables, term_depth))
    return Rel(x, tuple(random_term(rng, sig, s, variables, term_depth) for s in sig.relations[x]))


def random_formula(rng: random.Random, sig: Signature, free: Sequence[Var], qr: int, size: int = 6,
                   term_depth: int = 2, names: Sequence[str] = ("u", "v", "w")) -> Formula:
    """A random formula with quantifier rank at most ``qr`` and free variables among ``free``."""
    counter = [0]

    def bound_var():
        counter[0] += 1
        name = names[(counter[0] - 1) % len(names)]
        return Var(f"{name}{counter[0]}", rng.choice(sig.sorts))

    def gen(vars_: list, rank: int, budget: int) -> Formula:
        r = rng.random()
        if budget <= 1 or r < 0.25:
            return random_atom(rng, sig, vars_, term_depth)
        if rank > 0 and r < 0.55:
            v = bound_var()
            body = gen(vars_ + [v], rank - 1, budget - 1)
            return (Exists if rng.random() < 0.5 else Forall)(v, body)
        if r < 0.65:
            return Not(gen(vars_, rank, budget - 1))
        cls = rng.choice([And, Or, Or, Implies])
        return cls(gen(vars_, rank, budget // 2), gen(vars_, rank, budget // 2))
    return gen(list(free), qr, size)


def random_prenex(rng: random.Random, sig: Signature, kind: str, blocks: int, free: Sequence[Var],
                  block_size: int = 2, matrix_size: int = 3, term_depth: int = 1) -> Formula:
    """A prenex formula with exactly ``blocks`` alternating blocks, the first of ``kind``."""
    prefix = []
    k = kind
    count = 0
    for _ in range(blocks):
        for _ in range(rng.randint(1, block_size)):
            count += 1
            prefix.append((k, Var(f"q{count}", rng.choice(sig.sorts))))
        k = "A" if k == "E" else "E"
    vars_ = list(free) + [v for _, v in prefix]
    atoms = [random_atom(rng, sig, vars_, term_depth) for _ in range(matrix_size)]
    lits = [Not(a) if rng.random() < 0.4 else a for a in atoms]
    matrix = lits[0]
    for lit in lits[1:]:
        matrix = (And if rng.random() < 0.5 else Or)(matrix, lit)
    out = matrix
    for q, v in reversed(prefix):
        out = (Exists if q == "E" else Forall)(v, out)
    return out


# ---------------------------------------------------------------------------
# structures


def small_signature() -> Signature:
    """Two sorts with constants, unary and binary functions and relations."""
    return Signature(
        ["D", "E"], {"c": "D", "d": "E"},
        {"f": (("D",), "D"), "g": (("D", "E"), "D"), "h": (("D",), "E")},
        {"P": ("D",), "Q": ("D", "E")}, name="small")


def random_structure(rng: random.Random, sig: Signature | None = None, max_size: int = 3) -> FiniteStructure:
    """Random total tables on carriers of size 1..max_size."""
    sig = sig or small_signature()
    sizes = {s: rng.randint(1, max_size) for s in sig.sorts}
    consts = {c: rng.randrange(sizes[s]) for c, s in sig.constants.items()}

    def table(args, res):
        if not args:
            return rng.randrange(sizes[res])
        return [table(args[1:], res) for _ in range(sizes[args[0]])]
    funcs = {f: table(list(a), r) for f, (a, r) in sig.functions.items()}
    rels = {}
    for r, args in sig.relations.items():
        rels[r] = {t for t in itertools.product(*(range(sizes[s]) for s in args)) if rng.random() < 0.5}
    return FiniteStructure(sig, sizes, consts, funcs, rels, name="random")


def random_assignment(rng: random.Random, S: FiniteStructure, variables) -> dict:
    return {v.key: rng.randrange(S.sizes[v.sort]) for v in variables}


# ---------------------------------------------------------------------------
# algebra


def random_polynomial_element(rng: random.Random, K: RationalFunctionField, max_degree: int = 3,
                              max_terms: int = 3, allow_zero: bool = False) -> FieldElement:
    """A random polynomial in the generators of K."""
    n = K.nvars
    while True:
        terms = {}
        for _ in range(rng.randint(1, max_terms)):
            e = [0] * n
            for _ in range(rng.randint(0, max_degree)):
                if n:
                    e[rng.randrange(n)] += 1
            terms[tuple(e)] = rng.randrange(1, K.q)
        f = K(K.poly(terms))
        if allow_zero or not f.is_zero():
            return f


def random_element(rng: random.Random, K: RationalFunctionField, max_degree: int = 3,
                   max_terms: int = 3, fraction: float = 0.5) -> FieldElement:
    """A random element, a quotient of polynomials with probability ``fraction``."""
    num = random_polynomial_element(rng, K, max_degree, max_terms, allow_zero=True)
    if rng.random() < fraction:
        return num / random_polynomial_element(rng, K, max_degree, max_terms)
    return num


def random_dominance_instance(rng: random.Random, p: int, max_N: int = 2, max_degree: int = 4):
    """A random affine value sequence with rationally independent slopes and a
    random nonzero polynomial P in X1..XN of total degree at most max_degree."""
    from .algebra.ratfunc import function_field
    from .valued import AffineValueSequence

    N = rng.randint(1, max_N)
    K = function_field(p, ("t",) if N == 1 else tuple(f"t{j + 1}" for j in range(N)))
    k = K.nvars
    # a triangular slope matrix with nonzero diagonal has full rank
    deltas = [[0] * k for _ in range(N)]
    for j in range(N):
        deltas[j][j] = rng.randint(1, 3)
        for i in range(j + 1, k):
            deltas[j][i] = rng.randint(-2, 2)
    betas = [[rng.randint(0, 4) for _ in range(k)] for _ in range(N)]
    coeffs = [K.const(rng.randrange(1, p)) * K.monomial(tuple(rng.randint(0, 2) for _ in range(k)))
              for _ in range(N)]
    s = AffineValueSequence(betas, deltas, coeffs, K)
    P: dict = {}
    while not P:
        for _ in range(rng.randint(1, 4)):
            m = [0] * N
            for _ in range(rng.randint(0, max_degree)):
                m[rng.randrange(N)] += 1
            c = K.const(rng.randrange(1, p)) * K.monomial(tuple(rng.randint(0, 6) for _ in range(k)))
            if rng.random() < 0.3:
                c = c + K.monomial(tuple(rng.randint(0, 6) for _ in range(k)))
            if not c.is_zero():
                P[tuple(m)] = c
    return s, P


def random_rewrite_instance(rng: random.Random, K: RationalFunctionField, length: int = 5,
                            max_N: int = 2, max_degree: int = 2):
    """A sequence of N-tuples of K, a pair of terms (f_0, f_1) in X1..XN and an
    index n at or beyond the stabilization index of the support sequence."""
    from .lam import support_sequence, term_field

    N = rng.randint(1, max_N)
    seq = [tuple(random_element(rng, K, max_degree, 3) for _ in range(N)) for _ in range(length)]
    data = support_sequence(seq, (), K)
    T = term_field(K.q, N, 0)
    fs = [random_element(rng, T, max_degree, 3, fraction=0.3) for _ in range(2)]
    n = rng.randint(data.l, length - 1)
    return data, fs, n
