"""Syntactic normal forms in the three-sorted valued-field language with lambda and ac.

``delta_prime_classify`` decides whether a formula is a positive boolean
combination of

1. equations between home-field terms and their negations,
2. residue-field formulas theta(ac(t_1), ..., ac(t_r), y) with theta in E(n),
3. value-group formulas psi(v(t_1), ..., v(t_r), z) with psi in E(n).

``normalize_closed_terms`` rewrites the home-field atoms of a sentence whose
home-field terms are closed, leaving a combination of residue and group
sentences.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .logic.parser import render
from .logic.prenex import classify_fragment, to_prenex
from .logic.syntax import (BOT, LAMBDA_SYMBOL, TOP, And, App, Bot, Eq, Exists, Forall, Formula, Implies,
                           Not, Or, Rel, Term, Top, Var, bound_vars, subterms)

HOME, RESIDUE, GROUP = "K", "k", "G"


@dataclass
class Component:
    shape: int              # 0 for top/bot, otherwise 1, 2 or 3
    formula: Formula
    fragment: str = ""

    def to_json(self) -> dict:
        return {"shape": self.shape, "formula": render(self.formula), "class": self.fragment}


@dataclass
class DeltaPrimeResult:
    accepted: bool
    n: int
    components: list = field(default_factory=list)
    offending: Formula | None = None
    reason: str = ""

    def to_json(self) -> dict:
        return {"in_delta_prime": self.accepted, "n": self.n,
                "components": [c.to_json() for c in self.components],
                "offending": render(self.offending) if self.offending is not None else None,
                "reason": self.reason or None}


def _term_ok(t: Term, sort: str) -> str | None:
    """Why t is not a legal term of a shape-2 (sort k) or shape-3 (sort G) formula."""
    wrapper = "ac" if sort == RESIDUE else "v"
    if isinstance(t, Var):
        return None if t.sort == sort else f"variable {t.key} of sort {t.sort}"
    if t.fn == wrapper:
        return None
    if t.fn == "res":
        return "res is not a symbol of the lambda-ac language"
    if t.sort != sort:
        return f"term {t.fn} of sort {t.sort}"
    for a in t.args:
        why = _term_ok(a, sort)
        if why:
            return why
    return None


def _sorted_atom_ok(f: Formula, sort: str) -> str | None:
    if isinstance(f, (Top, Bot)):
        return None
    if isinstance(f, Eq):
        if f.lhs.sort != sort:
            return f"equation of sort {f.lhs.sort}"
        return _term_ok(f.lhs, sort) or _term_ok(f.rhs, sort)
    if isinstance(f, Rel):
        if sort != GROUP or f.name not in ("leG", "ltG"):
            return f"relation {f.name}"
        for a in f.args:
            why = _term_ok(a, sort)
            if why:
                return why
        return None
    raise TypeError(f)


def _sorted_formula_issue(f: Formula, sort: str) -> tuple[Formula, str] | None:
    """First offending node of f as a sort-restricted formula, or None."""
    if isinstance(f, (Top, Bot, Eq, Rel)):
        why = _sorted_atom_ok(f, sort)
        return (f, why) if why else None
    if isinstance(f, Not):
        return _sorted_formula_issue(f.body, sort)
    if isinstance(f, (And, Or, Implies)):
        return _sorted_formula_issue(f.left, sort) or _sorted_formula_issue(f.right, sort)
    if f.var.sort != sort:
        return f, f"quantifier over sort {f.var.sort}"
    return _sorted_formula_issue(f.body, sort)


def _shape1(f: Formula) -> bool:
    g = f.body if isinstance(f, Not) else f
    if not isinstance(g, Eq) or g.lhs.sort != HOME:
        return False
    return not any(isinstance(s, App) and s.fn == "res" for t in (g.lhs, g.rhs) for s in subterms(t))


def _try_sorted(f: Formula, n: int) -> tuple[Component | None, tuple | None]:
    issues = []
    for shape, sort in ((2, RESIDUE), (3, GROUP)):
        issue = _sorted_formula_issue(f, sort)
        if issue is None:
            cls = classify_fragment(to_prenex(f))
            if cls.within("E", n):
                return Component(shape, f, str(cls)), None
            issue = (f, f"{'residue' if shape == 2 else 'group'} formula of class {cls} is not in E({n})")
        issues.append(issue)
    return None, issues


def delta_prime_classify(f: Formula, n: int) -> DeltaPrimeResult:
    """Decompose f into shapes 1-3, or report a minimal offending subformula."""
    if n < 0:
        raise ValueError("n must be non-negative")
    out = DeltaPrimeResult(True, n)
    _classify(f, n, out)
    return out


def _classify(f: Formula, n: int, out: DeltaPrimeResult):
    if not out.accepted:
        return
    if isinstance(f, (Top, Bot)):
        out.components.append(Component(0, f, "QuantifierFree"))
        return
    if _shape1(f):
        out.components.append(Component(1, f, "QuantifierFree"))
        return
    comp, issues = _try_sorted(f, n)
    if comp is not None:
        out.components.append(comp)
        return
    if isinstance(f, (And, Or)):
        _classify(f.left, n, out)
        _classify(f.right, n, out)
        return
    if isinstance(f, Implies):
        _classify(Or(Not(f.left), f.right), n, out)
        return
    if isinstance(f, Not):
        g = f.body
        if isinstance(g, Not):
            _classify(g.body, n, out)
            return
        if isinstance(g, And):
            _classify(Or(Not(g.left), Not(g.right)), n, out)
            return
        if isinstance(g, Or):
            _classify(And(Not(g.left), Not(g.right)), n, out)
            return
        if isinstance(g, Implies):
            _classify(And(g.left, Not(g.right)), n, out)
            return
    out.accepted = False
    out.offending, out.reason = _pick_issue(f, issues)


def _pick_issue(f: Formula, issues: list) -> tuple[Formula, str]:
    # prefer a home-sort quantifier, then the issue of the sort f mostly lives in
    for node, why in issues:
        if isinstance(node, (Exists, Forall)) and node.var.sort == HOME:
            return node, why
    for node, why in issues:
        if "not in E(" in why:
            return node, why
    sorts = {v.sort for v in bound_vars(f)}
    idx = 1 if sorts == {GROUP} else 0
    if isinstance(f, (Eq, Rel)) and (isinstance(f, Rel) or f.lhs.sort == GROUP):
        idx = 1
    return issues[idx]


# ---------------------------------------------------------------------------
# closed home-field terms


class NotClosedError(ValueError):
    pass


def closed_value(t: Term) -> int:
    """Integer value of a closed home-field term over the prime field.

    Lambda terms evaluate to 0: every tuple of the prime field is
    p-dependent, so every lambda function vanishes on it.
    """
    if isinstance(t, Var):
        raise NotClosedError(f"variable {t.key} in a home-field term")
    if t.fn == "0K":
        return 0
    if t.fn == "1K":
        return 1
    if LAMBDA_SYMBOL.match(t.fn):
        for a in t.args:
            closed_value(a)
        return 0
    vals = [closed_value(a) for a in t.args]
    if t.fn == "add":
        return vals[0] + vals[1]
    if t.fn == "sub":
        return vals[0] - vals[1]
    if t.fn == "mul":
        return vals[0] * vals[1]
    if t.fn == "neg":
        return -vals[0]
    raise NotClosedError(f"symbol {t.fn} cannot be evaluated over the prime field")


def residue_numeral(k: int) -> Term:
    """The residue term 1k + ... + 1k (k >= 1 copies), folded to the left."""
    one = App("1k", (), RESIDUE)
    out = one
    for _ in range(k - 1):
        out = App("addk", (out, one), RESIDUE)
    return out


def _rewrite_home(f: Formula) -> Formula:
    if isinstance(f, (Top, Bot)):
        return f
    if isinstance(f, Eq):
        if f.lhs.sort != HOME:
            _reject_home_terms(f)
            return f
        d = closed_value(f.lhs) - closed_value(f.rhs)
        if d == 0:
            return TOP
        return Eq(residue_numeral(abs(d)), App("0k", (), RESIDUE))
    if isinstance(f, Rel):
        _reject_home_terms(f)
        return f
    if isinstance(f, Not):
        return Not(_rewrite_home(f.body))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(_rewrite_home(f.left), _rewrite_home(f.right))
    return type(f)(f.var, _rewrite_home(f.body))


def _reject_home_terms(f: Formula):
    args = (f.lhs, f.rhs) if isinstance(f, Eq) else f.args
    for t in args:
        for s in subterms(t):
            if isinstance(s, App) and s.fn in ("ac", "v", "res"):
                closed_value(s.args[0])


def simplify(f: Formula) -> Formula:
    """Remove top and bot from a formula by the usual absorption rules."""
    if isinstance(f, (Top, Bot, Eq, Rel)):
        return f
    if isinstance(f, Not):
        b = simplify(f.body)
        if isinstance(b, Top):
            return BOT
        if isinstance(b, Bot):
            return TOP
        return Not(b)
    if isinstance(f, (And, Or, Implies)):
        l, r = simplify(f.left), simplify(f.right)
        if isinstance(f, Implies):
            if isinstance(l, Bot) or isinstance(r, Top):
                return TOP
            if isinstance(l, Top):
                return r
            if isinstance(r, Bot):
                return simplify(Not(l))
            return Implies(l, r)
        unit, zero = (Top, Bot) if isinstance(f, And) else (Bot, Top)
        if isinstance(l, zero) or isinstance(r, zero):
            return TOP if zero is Top else BOT
        if isinstance(l, unit):
            return r
        if isinstance(r, unit):
            return l
        return type(f)(l, r)
    b = simplify(f.body)
    if isinstance(b, (Top, Bot)):
        return b
    return type(f)(f.var, b)


def normalize_closed_terms(sentence: Formula) -> Formula:
    """Replace closed home-field equations by residue characteristic statements.

    ``t1 = t2`` becomes top when both sides have the same integer value and
    otherwise ``1k + ... + 1k = 0k`` with |t1 - t2| summands.  Home-field
    terms under ac or v must be closed as well; they are left in place.
    """
    return simplify(_rewrite_home(sentence))
