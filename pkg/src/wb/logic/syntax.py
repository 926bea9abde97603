"""Multi-sorted first-order syntax: signatures, terms and formulas.

Terms and formulas are immutable, hashable dataclasses.  Conjunction and
disjunction are binary; n-ary input is folded to the left by the parser.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

LAMBDA_SYMBOL = re.compile(r"^lam_(\d+)_([0-9]+)$")


class SortError(ValueError):
    pass


# ---------------------------------------------------------------------------
# signatures


@dataclass
class Signature:
    sorts: list
    constants: dict = field(default_factory=dict)   # name -> sort
    functions: dict = field(default_factory=dict)   # name -> (arg sorts, result sort)
    relations: dict = field(default_factory=dict)   # name -> arg sorts
    lambda_sort: str | None = None                  # sort carrying lam_<n>_<m> symbols
    name: str = ""

    def __post_init__(self):
        self.sorts = list(self.sorts)
        self.functions = {k: (tuple(a), r) for k, (a, r) in self.functions.items()}
        self.relations = {k: tuple(a) for k, a in self.relations.items()}
        seen = set()
        for kind in (self.constants, self.functions, self.relations):
            for name in kind:
                if name in seen:
                    raise ValueError(f"symbol {name!r} declared twice")
                seen.add(name)
        for name, s in self.constants.items():
            self._check_sort(s, name)
        for name, (args, res) in self.functions.items():
            for s in args + (res,):
                self._check_sort(s, name)
        for name, args in self.relations.items():
            for s in args:
                self._check_sort(s, name)

    def _check_sort(self, s: str, name: str):
        if s not in self.sorts:
            raise ValueError(f"symbol {name!r} uses unknown sort {s!r}")

    def function(self, name: str) -> tuple[tuple, str] | None:
        if name in self.functions:
            return self.functions[name]
        if self.lambda_sort is not None:
            m = LAMBDA_SYMBOL.match(name)
            if m and len(m.group(2)) == int(m.group(1)) and int(m.group(1)) >= 1:
                n = int(m.group(1))
                return (self.lambda_sort,) * (n + 1), self.lambda_sort
        return None

    def is_symbol(self, name: str) -> bool:
        return name in self.constants or self.function(name) is not None or name in self.relations

    def to_json(self) -> dict:
        return {"name": self.name, "sorts": self.sorts, "constants": self.constants,
                "functions": {k: [list(a), r] for k, (a, r) in self.functions.items()},
                "relations": {k: list(a) for k, a in self.relations.items()},
                "lambda_sort": self.lambda_sort}

    @classmethod
    def from_json(cls, d: dict) -> Signature:
        return cls(d["sorts"], dict(d.get("constants", {})),
                   {k: (tuple(a), r) for k, (a, r) in d.get("functions", {}).items()},
                   {k: tuple(a) for k, a in d.get("relations", {}).items()},
                   d.get("lambda_sort"), d.get("name", ""))


def ring_signature(sort: str = "K", suffix: str = "") -> Signature:
    """Ring language on one sort: 0, 1, add, mul, neg (and sub)."""
    s = suffix
    return Signature(
        [sort],
        {f"0{sort}": sort, f"1{sort}": sort},
        {f"add{s}": ((sort, sort), sort), f"mul{s}": ((sort, sort), sort),
         f"sub{s}": ((sort, sort), sort), f"neg{s}": ((sort,), sort)},
        {}, name="ring" if sort == "K" else f"ring-{sort}")


def residue_signature() -> Signature:
    sig = ring_signature("k", "k")
    sig.name = "residue"
    return sig


def group_signature() -> Signature:
    """Ordered abelian group with a top element inf."""
    return Signature(
        ["G"], {"0G": "G", "inf": "G"},
        {"addG": (("G", "G"), "G"), "negG": (("G",), "G")},
        {"leG": ("G", "G"), "ltG": ("G", "G")}, name="group")


def valued_field_signature() -> Signature:
    """Three-sorted language: home field K, residue field k, value group G,
    with v, res, ac and the lambda symbols lam_<n>_<m> on K."""
    consts = {"0K": "K", "1K": "K", "0k": "k", "1k": "k", "0G": "G", "inf": "G"}
    funcs = {
        "add": (("K", "K"), "K"), "mul": (("K", "K"), "K"), "sub": (("K", "K"), "K"),
        "neg": (("K",), "K"),
        "addk": (("k", "k"), "k"), "mulk": (("k", "k"), "k"), "subk": (("k", "k"), "k"),
        "negk": (("k",), "k"),
        "addG": (("G", "G"), "G"), "negG": (("G",), "G"),
        "v": (("K",), "G"), "res": (("K",), "k"), "ac": (("K",), "k"),
    }
    rels = {"leG": ("G", "G"), "ltG": ("G", "G")}
    return Signature(["K", "k", "G"], consts, funcs, rels, lambda_sort="K", name="valued-field")


BUILTIN_SIGNATURES = {
    "ring": ring_signature,
    "residue": residue_signature,
    "group": group_signature,
    "valued-field": valued_field_signature,
}


def builtin_signature(name: str) -> Signature:
    if name not in BUILTIN_SIGNATURES:
        raise KeyError(f"unknown signature {name!r}; known: {', '.join(BUILTIN_SIGNATURES)}")
    return BUILTIN_SIGNATURES[name]()


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Var:
    name: str
    sort: str

    @property
    def key(self) -> str:
        return f"{self.name}:{self.sort}"

    def __repr__(self) -> str:
        return self.key


@dataclass(frozen=True)
class App:
    """Function application; constants are applications with no arguments."""

    fn: str
    args: tuple
    sort: str

    def __repr__(self) -> str:
        if not self.args:
            return self.fn
        return f"({self.fn} {' '.join(map(repr, self.args))})"


Term = Union[Var, App]


def const(name: str, sort: str) -> App:
    return App(name, (), sort)


def term_vars(t: Term) -> set:
    if isinstance(t, Var):
        return {t}
    out: set = set()
    for a in t.args:
        out |= term_vars(a)
    return out


def term_depth(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(term_depth(a) for a in t.args)


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def subst_term(t: Term, mapping: dict) -> Term:
    if isinstance(t, Var):
        return mapping.get(t, t)
    if not t.args:
        return t
    return App(t.fn, tuple(subst_term(a, mapping) for a in t.args), t.sort)


def sort_of(t: Term) -> str:
    return t.sort


# ---------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class Top:
    def __repr__(self) -> str:
        return "top"


@dataclass(frozen=True)
class Bot:
    def __repr__(self) -> str:
        return "bot"


@dataclass(frozen=True)
class Eq:
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Rel:
    name: str
    args: tuple


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: Var
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: Var
    body: "Formula"


Formula = Union[Top, Bot, Eq, Rel, Not, And, Or, Implies, Exists, Forall]
TOP, BOT = Top(), Bot()
ATOMS = (Top, Bot, Eq, Rel)
BINARY = (And, Or, Implies)
QUANTIFIERS = (Exists, Forall)


def conj(parts: Iterable) -> Formula:
    parts = list(parts)
    if not parts:
        return TOP
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts: Iterable) -> Formula:
    parts = list(parts)
    if not parts:
        return BOT
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def exists_many(vs: Iterable[Var], body: Formula) -> Formula:
    for v in reversed(list(vs)):
        body = Exists(v, body)
    return body


def forall_many(vs: Iterable[Var], body: Formula) -> Formula:
    for v in reversed(list(vs)):
        body = Forall(v, body)
    return body


def free_vars(f: Formula) -> set:
    if isinstance(f, (Top, Bot)):
        return set()
    if isinstance(f, Eq):
        return term_vars(f.lhs) | term_vars(f.rhs)
    if isinstance(f, Rel):
        out: set = set()
        for a in f.args:
            out |= term_vars(a)
        return out
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, BINARY):
        return free_vars(f.left) | free_vars(f.right)
    return free_vars(f.body) - {f.var}


def bound_vars(f: Formula) -> set:
    if isinstance(f, ATOMS):
        return set()
    if isinstance(f, Not):
        return bound_vars(f.body)
    if isinstance(f, BINARY):
        return bound_vars(f.left) | bound_vars(f.right)
    return {f.var} | bound_vars(f.body)


def all_vars(f: Formula) -> set:
    return free_vars(f) | bound_vars(f)


def atoms(f: Formula) -> Iterator[Formula]:
    if isinstance(f, ATOMS):
        yield f
    elif isinstance(f, Not):
        yield from atoms(f.body)
    elif isinstance(f, BINARY):
        yield from atoms(f.left)
        yield from atoms(f.right)
    else:
        yield from atoms(f.body)


def formula_terms(f: Formula) -> Iterator[Term]:
    for a in atoms(f):
        if isinstance(a, Eq):
            yield a.lhs
            yield a.rhs
        elif isinstance(a, Rel):
            yield from a.args


def size(f: Formula) -> int:
    if isinstance(f, ATOMS):
        return 1
    if isinstance(f, Not):
        return 1 + size(f.body)
    if isinstance(f, BINARY):
        return 1 + size(f.left) + size(f.right)
    return 1 + size(f.body)


def is_quantifier_free(f: Formula) -> bool:
    return not bound_vars(f)


class FreshNames:
    """Generates variable names not in a reserved set."""

    def __init__(self, reserved: Iterable[str] = ()):
        self.used = set(reserved)

    def reserve(self, names: Iterable[str]):
        self.used |= set(names)

    def fresh(self, base: str) -> str:
        if base not in self.used:
            self.used.add(base)
            return base
        root = re.sub(r"_\d+$", "", base)
        for k in itertools.count(1):
            name = f"{root}_{k}"
            if name not in self.used:
                self.used.add(name)
                return name
        raise AssertionError("unreachable")


def substitute(f: Formula, mapping: dict, fresh: FreshNames | None = None) -> Formula:
    """Capture-avoiding substitution of terms for free variables."""
    if fresh is None:
        names = {v.name for v in all_vars(f)}
        for t in mapping.values():
            names |= {v.name for v in term_vars(t)}
        names |= {v.name for v in mapping}
        fresh = FreshNames(names)
    return _subst(f, dict(mapping), fresh)


def _subst(f: Formula, mapping: dict, fresh: FreshNames) -> Formula:
    if isinstance(f, (Top, Bot)):
        return f
    if isinstance(f, Eq):
        return Eq(subst_term(f.lhs, mapping), subst_term(f.rhs, mapping))
    if isinstance(f, Rel):
        return Rel(f.name, tuple(subst_term(a, mapping) for a in f.args))
    if isinstance(f, Not):
        return Not(_subst(f.body, mapping, fresh))
    if isinstance(f, BINARY):
        return type(f)(_subst(f.left, mapping, fresh), _subst(f.right, mapping, fresh))
    inner = {k: v for k, v in mapping.items() if k != f.var}
    incoming = set()
    for k, t in inner.items():
        if k in free_vars(f.body):
            incoming |= term_vars(t)
    var = f.var
    if var in incoming:
        var = Var(fresh.fresh(f.var.name), f.var.sort)
        inner[f.var] = var
    return type(f)(var, _subst(f.body, inner, fresh))


def rename_bound(f: Formula, fresh: FreshNames, mapping: dict | None = None) -> Formula:
    """Rename every bound variable to a fresh name (standardizing apart)."""
    mapping = mapping or {}
    if isinstance(f, (Top, Bot)):
        return f
    if isinstance(f, Eq):
        return Eq(subst_term(f.lhs, mapping), subst_term(f.rhs, mapping))
    if isinstance(f, Rel):
        return Rel(f.name, tuple(subst_term(a, mapping) for a in f.args))
    if isinstance(f, Not):
        return Not(rename_bound(f.body, fresh, mapping))
    if isinstance(f, BINARY):
        return type(f)(rename_bound(f.left, fresh, mapping), rename_bound(f.right, fresh, mapping))
    new = Var(fresh.fresh(f.var.name), f.var.sort)
    return type(f)(new, rename_bound(f.body, fresh, {**mapping, f.var: new}))
