"""Prenex normal form, quantifier rank and classical-fragment classification.

The classes E(n) and A(n) count *alternating blocks* of like quantifiers in
the prefix: ``exists x exists y phi`` is E(1) and ``forall x exists y phi`` is
A(2).  This is the measure under which E(n) and A(n) are closed under
conjunction and disjunction and under which quantifier-free interpretations
send E(n) to E(n).  The nesting-depth measure is available through
``classify_fragment(f, measure="depth")``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .syntax import (ATOMS, BOT, TOP, And, Bot, Eq, Exists, Forall, Formula, FreshNames, Implies, Not,
                     Or, Rel, Top, Var, all_vars, free_vars, rename_bound)


# ---------------------------------------------------------------------------
# rank and prefix data


def quantifier_rank(f: Formula) -> int:
    """Maximal nesting depth of quantifiers."""
    if isinstance(f, ATOMS):
        return 0
    if isinstance(f, Not):
        return quantifier_rank(f.body)
    if isinstance(f, (And, Or, Implies)):
        return max(quantifier_rank(f.left), quantifier_rank(f.right))
    return 1 + quantifier_rank(f.body)


def is_prenex(f: Formula) -> bool:
    while isinstance(f, (Exists, Forall)):
        f = f.body
    return _quantifier_free(f)


def _quantifier_free(f: Formula) -> bool:
    if isinstance(f, ATOMS):
        return True
    if isinstance(f, Not):
        return _quantifier_free(f.body)
    if isinstance(f, (And, Or, Implies)):
        return _quantifier_free(f.left) and _quantifier_free(f.right)
    return False


def prefix(f: Formula) -> tuple[list[tuple[str, Var]], Formula]:
    """Split a prenex formula into its quantifier prefix and matrix."""
    out = []
    while isinstance(f, (Exists, Forall)):
        out.append(("E" if isinstance(f, Exists) else "A", f.var))
        f = f.body
    return out, f


def blocks(f: Formula) -> list[tuple[str, list[Var]]]:
    """Maximal blocks of like quantifiers in the prefix of a prenex formula."""
    out: list[tuple[str, list[Var]]] = []
    for kind, v in prefix(f)[0]:
        if out and out[-1][0] == kind:
            out[-1][1].append(v)
        else:
            out.append((kind, [v]))
    return out


# ---------------------------------------------------------------------------
# fragment classes


@dataclass(frozen=True)
class FragmentClass:
    kind: str          # "QF", "E", "A" or "NotPrenex"
    n: int = 0

    def __str__(self) -> str:
        if self.kind in ("QF", "NotPrenex"):
            return {"QF": "QuantifierFree", "NotPrenex": "NotPrenex"}[self.kind]
        return f"{self.kind}({self.n})"

    def to_json(self) -> dict:
        return {"kind": self.kind, "n": self.n, "label": str(self)}

    def within(self, kind: str, n: int) -> bool:
        """Membership in E_n / A_n with the "at most n" reading."""
        if self.kind == "QF":
            return True
        if self.kind == "NotPrenex":
            return False
        if self.kind == kind:
            return self.n <= n
        # a formula with fewer blocks sits in the opposite class one level up
        return self.n + 1 <= n


QF = FragmentClass("QF")
NOT_PRENEX = FragmentClass("NotPrenex")


def classify_fragment(f: Formula, measure: str = "blocks") -> FragmentClass:
    """E(n)/A(n) by leading quantifier, n counted as blocks or as nesting depth."""
    if not is_prenex(f):
        return NOT_PRENEX
    pre, _ = prefix(f)
    if not pre:
        return QF
    if measure == "blocks":
        n = len(blocks(f))
    elif measure == "depth":
        n = len(pre)
    else:
        raise ValueError(f"unknown measure {measure!r}")
    return FragmentClass(pre[0][0], n)


def in_class(f: Formula, kind: str, n: int, exact: bool = False, measure: str = "blocks") -> bool:
    """Whether f is in E_n (kind "E") or A_n (kind "A").

    With ``exact`` the measure must equal n and the leading quantifier must
    match; otherwise the "at most n" reading is used.
    """
    c = classify_fragment(f, measure)
    if exact:
        return c.kind == kind and c.n == n
    return c.within(kind, n)


# ---------------------------------------------------------------------------
# prenex conversion


def eliminate_implies(f: Formula) -> Formula:
    if isinstance(f, ATOMS):
        return f
    if isinstance(f, Not):
        return Not(eliminate_implies(f.body))
    if isinstance(f, Implies):
        return Or(Not(eliminate_implies(f.left)), eliminate_implies(f.right))
    if isinstance(f, (And, Or)):
        return type(f)(eliminate_implies(f.left), eliminate_implies(f.right))
    return type(f)(f.var, eliminate_implies(f.body))


def standardize_apart(f: Formula) -> Formula:
    """Give every binder its own name, distinct from all free variables.

    A binder keeps its name when that name is still unused.
    """
    fresh = FreshNames(v.name for v in free_vars(f))
    return rename_bound(f, fresh)


_Block = tuple  # (kind, tuple of vars)


def _merge(a: list, b: list) -> list:
    """Interleave two block lists, fusing heads of the same kind (left first)."""
    out: list = []
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i][0] == b[j][0]:
            out.append((a[i][0], a[i][1] + b[j][1]))
            i += 1
            j += 1
        else:
            out.append(a[i])
            i += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return out


def _flip(blocks_: list) -> list:
    return [("A" if k == "E" else "E", vs) for k, vs in blocks_]


def _pnf(f: Formula) -> tuple[list, Formula]:
    if isinstance(f, ATOMS):
        return [], f
    if isinstance(f, Not):
        pre, m = _pnf(f.body)
        return _flip(pre), Not(m)
    if isinstance(f, (And, Or)):
        pa, ma = _pnf(f.left)
        pb, mb = _pnf(f.right)
        return _merge(pa, pb), type(f)(ma, mb)
    kind = "E" if isinstance(f, Exists) else "A"
    pre, m = _pnf(f.body)
    if pre and pre[0][0] == kind:
        return [(kind, (f.var,) + pre[0][1])] + pre[1:], m
    return [(kind, (f.var,))] + pre, m


def to_prenex(f: Formula) -> Formula:
    """Equivalent prenex formula (over non-empty carriers).

    Implications are eliminated, bound variables are standardized apart,
    negations flip the quantifiers they pass, and the prefixes of the two
    sides of a conjunction or disjunction are merged block by block from the
    left, so E(n) and E(m) combine into E(max(n, m)).
    """
    g = standardize_apart(eliminate_implies(f))
    pre, m = _pnf(g)
    out = m
    for kind, vs in reversed(pre):
        for v in reversed(vs):
            out = Exists(v, out) if kind == "E" else Forall(v, out)
    return out


# ---------------------------------------------------------------------------
# generated fragments


def in_generated_fragment(f: Formula, delta0: Iterable[Formula], with_negations: bool = False) -> bool:
    """Whether f is syntactically a {and, or}-combination of generators.

    Generators are the members of delta0 (and their negations when
    ``with_negations``), together with top and bot.
    """
    gens = set(delta0)
    if with_negations:
        gens |= {Not(g) for g in list(gens)}
    return _generated(f, gens)


def _generated(f: Formula, gens: set) -> bool:
    if f in gens or isinstance(f, (Top, Bot)):
        return True
    if isinstance(f, (And, Or)):
        return _generated(f.left, gens) and _generated(f.right, gens)
    return False


def nnf(f: Formula) -> Formula:
    """Negation normal form with implications removed (negations on atoms)."""
    f = eliminate_implies(f)
    return _nnf(f, False)


def _nnf(f: Formula, neg: bool) -> Formula:
    if isinstance(f, Top):
        return BOT if neg else TOP
    if isinstance(f, Bot):
        return TOP if neg else BOT
    if isinstance(f, (Eq, Rel)):
        return Not(f) if neg else f
    if isinstance(f, Not):
        return _nnf(f.body, not neg)
    if isinstance(f, (And, Or)):
        cls = type(f)
        if neg:
            cls = Or if cls is And else And
        return cls(_nnf(f.left, neg), _nnf(f.right, neg))
    cls = type(f)
    if neg:
        cls = Forall if cls is Exists else Exists
    return cls(f.var, _nnf(f.body, neg))


def rank_after_prenex(f: Formula) -> int:
    return quantifier_rank(to_prenex(f))


def used_names(f: Formula) -> set:
    return {v.name for v in all_vars(f)}
