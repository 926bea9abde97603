"""Interpretations given by defining formulas, and formula translation through them.

An interpretation of a one-sorted structure A in a structure B has arity n:
elements of A are represented by n-tuples of B (with fixed coordinate sorts).
It is given by formulas of B's language

* ``domain``    on n variables: the tuples that represent something,
* ``eq``        on 2n variables: two tuples represent the same element,
* per constant  on n variables: the tuples representing the constant,
* per l-ary function on n(l+1) variables: the graph (arguments, then result),
* per l-ary relation on ln variables,

all sharing one tuple of parameter variables of B.  ``translate_formula``
rewrites an A-formula into a B-formula by structural induction, choosing for
every atomic case either an existential or a universal definition.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace

from .algebra.gf import field as gf_field
from .logic.parser import parse_formula, render
from .logic.prenex import FragmentClass, classify_fragment, to_prenex
from .logic.syntax import (TOP, And, App, Bot, Eq, Exists, Formula, Implies, Not,
                           Or, Rel, Signature, Term, Top, Var, builtin_signature, conj, exists_many,
                           forall_many, free_vars, is_quantifier_free, residue_signature,
                           group_signature, ring_signature, substitute, term_vars,
                           valued_field_signature)
from .models import (FiniteStructure, define_set, encode_tuple, extension_field_structure,
                     finite_field_structure, is_irreducible, residue_structure,
                     trivially_valued_structure, two_point_group_structure)

EXISTENTIAL = "existential"
UNIVERSAL = "universal"
MODES = (EXISTENTIAL, UNIVERSAL)
STRATEGIES = ("fixed", "select")


class InterpretationError(ValueError):
    pass


@dataclass(frozen=True)
class Definition:
    vars: tuple          # declared variables, in slot order
    formula: Formula

    def instantiate(self, args) -> Formula:
        args = tuple(args)
        if len(args) != len(self.vars):
            raise InterpretationError(f"definition expects {len(self.vars)} variables, got {len(args)}")
        mapping = {v: a for v, a in zip(self.vars, args) if v != a}
        return substitute(self.formula, mapping) if mapping else self.formula


@dataclass
class Interpretation:
    source: Signature
    target: Signature
    coord_sorts: tuple
    params: tuple                     # parameter variables of the target language
    domain: Definition
    eq: Definition
    constants: dict                   # name -> Definition
    functions: dict                   # name -> Definition
    relations: dict                   # name -> Definition (existential form)
    relations_universal: dict = field(default_factory=dict)  # optional universal forms
    param_values: tuple = ()          # default parameter values in a target structure
    name: str = ""

    def __post_init__(self):
        self.coord_sorts = tuple(self.coord_sorts)
        self.params = tuple(self.params)
        self.param_values = tuple(self.param_values)
        if len(self.source.sorts) != 1:
            raise InterpretationError("the interpreted structure must be one-sorted")
        n = self.n
        for s in self.coord_sorts:
            if s not in self.target.sorts:
                raise InterpretationError(f"coordinate sort {s} is not a target sort")
        self._check_def("domain", self.domain, n)
        self._check_def("eq", self.eq, 2 * n)
        for c in self.source.constants:
            if c not in self.constants:
                raise InterpretationError(f"no defining formula for constant {c}")
            self._check_def(c, self.constants[c], n)
        for f, (args, _) in self.source.functions.items():
            if f not in self.functions:
                raise InterpretationError(f"no defining formula for function {f}")
            self._check_def(f, self.functions[f], n * (len(args) + 1))
        for r, args in self.source.relations.items():
            if r not in self.relations:
                raise InterpretationError(f"no defining formula for relation {r}")
            self._check_def(r, self.relations[r], n * len(args))
            if r in self.relations_universal:
                self._check_def(r, self.relations_universal[r], n * len(args))

    @property
    def n(self) -> int:
        return len(self.coord_sorts)

    @property
    def home_sort(self) -> str:
        return self.source.sorts[0]

    def _check_def(self, name: str, d: Definition, count: int):
        if len(d.vars) != count:
            raise InterpretationError(f"definition of {name} must declare {count} variables, "
                                      f"got {len(d.vars)}")
        sorts = [d.vars[i].sort for i in range(count)]
        want = list(self.coord_sorts) * (count // max(self.n, 1))
        if sorts != want:
            raise InterpretationError(f"definition of {name} has variable sorts {sorts}, expected {want}")
        extra = free_vars(d.formula) - set(d.vars) - set(self.params)
        if extra:
            raise InterpretationError(f"definition of {name} has undeclared free variables "
                                      f"{sorted(v.key for v in extra)}")

    def definitions(self) -> dict:
        out = {"domain": self.domain, "eq": self.eq}
        out.update({f"const:{k}": v for k, v in self.constants.items()})
        out.update({f"fn:{k}": v for k, v in self.functions.items()})
        out.update({f"rel:{k}": v for k, v in self.relations.items()})
        out.update({f"rel-universal:{k}": v for k, v in self.relations_universal.items()})
        return out

    def quantifier_free(self) -> bool:
        return all(is_quantifier_free(d.formula) for d in self.definitions().values())

    def relation_def(self, name: str, mode: str) -> Definition:
        if mode == UNIVERSAL and name in self.relations_universal:
            return self.relations_universal[name]
        return self.relations[name]

    def to_json(self) -> dict:
        def dj(d: Definition):
            return {"vars": [v.key for v in d.vars], "formula": render(d.formula, frozenset(d.vars))}
        return {
            "name": self.name, "source": self.source.to_json(), "target": self.target.to_json(),
            "coord_sorts": list(self.coord_sorts), "params": [v.key for v in self.params],
            "param_values": list(self.param_values),
            "domain": dj(self.domain), "eq": dj(self.eq),
            "constants": {k: dj(v) for k, v in self.constants.items()},
            "functions": {k: dj(v) for k, v in self.functions.items()},
            "relations": {k: dj(v) for k, v in self.relations.items()},
            "relations_universal": {k: dj(v) for k, v in self.relations_universal.items()},
        }

    @classmethod
    def from_json(cls, d: dict) -> Interpretation:
        src = _signature(d["source"])
        tgt = _signature(d["target"])
        params = tuple(_var(k, tgt) for k in d.get("params", []))

        def dj(x):
            vs = tuple(_var(k, tgt) for k in x["vars"])
            sorts = {v.name: v.sort for v in vs + params}
            return Definition(vs, parse_formula(x["formula"], tgt, sorts))
        return cls(src, tgt, tuple(d["coord_sorts"]), params, dj(d["domain"]), dj(d["eq"]),
                   {k: dj(v) for k, v in d.get("constants", {}).items()},
                   {k: dj(v) for k, v in d.get("functions", {}).items()},
                   {k: dj(v) for k, v in d.get("relations", {}).items()},
                   {k: dj(v) for k, v in d.get("relations_universal", {}).items()},
                   tuple(d.get("param_values", ())), d.get("name", ""))


def _signature(x) -> Signature:
    return builtin_signature(x) if isinstance(x, str) else Signature.from_json(x)


def _var(key: str, sig: Signature) -> Var:
    if ":" not in key:
        if len(sig.sorts) != 1:
            raise InterpretationError(f"variable {key!r} needs a sort")
        return Var(key, sig.sorts[0])
    name, sort = key.split(":", 1)
    if sort not in sig.sorts:
        raise InterpretationError(f"unknown sort in {key!r}")
    return Var(name, sort)


# ---------------------------------------------------------------------------
# translation


class _Translator:
    def __init__(self, I: Interpretation, strategy: str):
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}")
        self.I = I
        self.strategy = strategy
        self.counter = itertools.count()
        self.images: dict = {}
        self.reserved = {v.name for v in I.params}

    def image(self, x: Var) -> tuple:
        """The tuple of target variables standing for source variable x."""
        if x.sort != self.I.home_sort:
            raise InterpretationError(f"variable {x.key} is not of the interpreted sort")
        img = self.images.get(x.name)
        if img is None:
            img = tuple(Var(f"{x.name}_{i + 1}", s) for i, s in enumerate(self.I.coord_sorts))
            for v in img:
                if v.name in self.reserved:
                    raise InterpretationError(f"target variable name {v.name} is already in use")
            self.reserved |= {v.name for v in img}
            self.images[x.name] = img
        return img

    def fresh_tuple(self) -> tuple:
        k = next(self.counter)
        return tuple(Var(f"_v{k}_{i + 1}", s) for i, s in enumerate(self.I.coord_sorts))

    # terms ------------------------------------------------------------
    def term(self, t: Term, y: tuple, mode: str) -> Formula:
        I = self.I
        if isinstance(t, Var):
            xs = self.image(t)
            return conj([I.domain.instantiate(xs), I.domain.instantiate(y), I.eq.instantiate(xs + y)])
        if not t.args:
            if t.fn not in I.constants:
                raise InterpretationError(f"interpretation has no definition for constant {t.fn}")
            return And(I.domain.instantiate(y), I.constants[t.fn].instantiate(y))
        if t.fn not in I.functions:
            raise InterpretationError(f"interpretation has no definition for function {t.fn}")
        vs = [self.fresh_tuple() for _ in t.args]
        guards = conj([And(I.domain.instantiate(v), self.term(a, v, EXISTENTIAL))
                       for a, v in zip(t.args, vs)])
        graph = I.functions[t.fn].instantiate(tuple(itertools.chain(*vs)) + y)
        flat = list(itertools.chain(*vs))
        if mode == EXISTENTIAL:
            return exists_many(flat, And(guards, graph))
        return forall_many(flat, Implies(guards, graph))

    # formulas ---------------------------------------------------------
    def formula(self, f: Formula, mode: str) -> Formula:
        I = self.I
        if isinstance(f, (Top, Bot)):
            return f
        if isinstance(f, Rel):
            if f.name not in I.relations:
                raise InterpretationError(f"interpretation has no definition for relation {f.name}")
            vs = [self.fresh_tuple() for _ in f.args]
            guards = conj([And(I.domain.instantiate(v), self.term(a, v, EXISTENTIAL))
                           for a, v in zip(f.args, vs)])
            flat = tuple(itertools.chain(*vs))
            rel = I.relation_def(f.name, mode).instantiate(flat)
            if mode == EXISTENTIAL:
                return exists_many(flat, And(guards, rel))
            return forall_many(flat, Implies(guards, rel))
        if isinstance(f, Eq):
            v = self.fresh_tuple()
            if mode == EXISTENTIAL:
                return exists_many(v, conj([I.domain.instantiate(v), self.term(f.lhs, v, EXISTENTIAL),
                                            self.term(f.rhs, v, EXISTENTIAL)]))
            return forall_many(v, Implies(And(I.domain.instantiate(v), self.term(f.lhs, v, EXISTENTIAL)),
                                          self.term(f.rhs, v, UNIVERSAL)))
        flip = UNIVERSAL if mode == EXISTENTIAL else EXISTENTIAL
        inner = flip if self.strategy == "select" else mode
        if isinstance(f, Not):
            return Not(self.formula(f.body, inner))
        if isinstance(f, And):
            return And(self.formula(f.left, mode), self.formula(f.right, mode))
        if isinstance(f, Or):
            return Or(self.formula(f.left, mode), self.formula(f.right, mode))
        if isinstance(f, Implies):
            return Or(Not(self.formula(f.left, inner)), self.formula(f.right, mode))
        xs = self.image(f.var)
        if isinstance(f, Exists):
            sub = EXISTENTIAL if self.strategy == "select" else mode
            return exists_many(xs, And(I.domain.instantiate(xs), self.formula(f.body, sub)))
        sub = UNIVERSAL if self.strategy == "select" else mode
        return forall_many(xs, Implies(I.domain.instantiate(xs), self.formula(f.body, sub)))


def _check_mode(mode: str):
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected existential or universal")


def translate_term(I: Interpretation, t: Term, mode: str = EXISTENTIAL, result: tuple | None = None) -> Formula:
    """A target formula defining {(images of t's variables, y) : t(Phi(...)) = Phi(y)}.

    The result tuple defaults to variables ``y_1 .. y_n``.
    """
    _check_mode(mode)
    tr = _Translator(I, "fixed")
    y = result or tuple(Var(f"y_{i + 1}", s) for i, s in enumerate(I.coord_sorts))
    tr.reserved |= {v.name for v in y}
    return tr.term(t, y, mode)


def translate_formula(I: Interpretation, f: Formula, mode: str = EXISTENTIAL,
                      strategy: str = "fixed") -> Formula:
    """The target formula psi with  A |= f(Phi(ybar)) <=> B |= psi(ybar, params).

    ``strategy="fixed"`` uses ``mode`` for every atomic case.  ``"select"``
    starts in ``mode``, switches to existential definitions below an
    existential quantifier and universal ones below a universal quantifier,
    and flips the mode under negation; this keeps E(m) inputs in E(m).
    """
    _check_mode(mode)
    return _Translator(I, strategy).formula(f, mode)


def translation_variables(I: Interpretation, f) -> dict:
    """Source free variable of a formula or term -> its tuple of target variables."""
    tr = _Translator(I, "fixed")
    vs = term_vars(f) if isinstance(f, (Var, App)) else free_vars(f)
    return {x: tr.image(x) for x in sorted(vs, key=lambda v: v.name)}


# ---------------------------------------------------------------------------
# standard interpretations


def _poly_mul(a: dict, b: dict, p: int) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = (out.get(e, 0) + ca * cb) % p
    return {e: c for e, c in out.items() if c}


def _poly_add(a: dict, b: dict, p: int) -> dict:
    out = dict(a)
    for e, c in b.items():
        out[e] = (out.get(e, 0) + c) % p
    return {e: c for e, c in out.items() if c}


def multiplication_polynomials(n: int, p: int) -> list:
    """Coefficients of beta^k (k < 2n-1) in the basis 1, beta, ..., beta^(n-1).

    beta is a root of X^n + alpha_(n-1) X^(n-1) + ... + alpha_0 with symbolic
    alpha; each coefficient is a polynomial in alpha (dict exponent -> int mod p).
    Returns r with r[k][i] the i-th coordinate of beta^k.
    """
    zero_e = (0,) * n
    r = []
    for k in range(n):
        r.append([{zero_e: 1} if i == k else {} for i in range(n)])
    top = [{tuple(1 if j == i else 0 for j in range(n)): (p - 1) % p} for i in range(n)]
    for k in range(n, 2 * n - 1):
        prev = r[-1]
        cur = [dict(prev[i - 1]) if i else {} for i in range(n)]
        lead = prev[n - 1]
        for i in range(n):
            cur[i] = _poly_add(cur[i], _poly_mul(lead, top[i], p), p)
        r.append(cur)
    return r


def _sum_terms(terms: list, zero: Term) -> Term:
    if not terms:
        return zero
    out = terms[0]
    for t in terms[1:]:
        out = App("add", (out, t), "K")
    return out


def _product(factors: list, one: Term) -> Term:
    if not factors:
        return one
    out = factors[0]
    for t in factors[1:]:
        out = App("mul", (out, t), "K")
    return out


def field_extension_interp(q: int, minpoly) -> Interpretation:
    """F_q[X]/(minpoly) interpreted in F_q by coordinates in the power basis.

    ``minpoly`` lists coefficients from the constant term up to the leading 1.
    The coordinate tuple (a_0, ..., a_(n-1)) stands for sum a_i beta^i.  The
    parameters alpha_0 .. alpha_(n-1) are the non-leading coefficients.
    """
    F = gf_field(q)
    mp = [int(c) for c in minpoly]
    n = len(mp) - 1
    if n < 1 or mp[-1] != 1:
        raise InterpretationError("minimal polynomial must be monic of degree >= 1")
    if any(not 0 <= c < q for c in mp):
        raise InterpretationError(f"coefficients must be elements 0..{q - 1} of F_{q}")
    if not is_irreducible(q, mp):
        raise InterpretationError(f"polynomial {mp} is reducible over F_{q}")
    sig = ring_signature("K")
    K = "K"
    zero, one = App("0K", (), K), App("1K", (), K)
    alpha = tuple(Var(f"alpha_{i}", K) for i in range(n))
    xs = tuple(Var(f"x_{i + 1}", K) for i in range(n))
    ys = tuple(Var(f"y_{i + 1}", K) for i in range(n))
    zs = tuple(Var(f"z_{i + 1}", K) for i in range(n))
    r = multiplication_polynomials(n, F.p)

    def coeff_term(c: int, factors: list) -> list:
        base = _product(factors, one)
        return [base] * c

    mul_eqs = []
    for i in range(n):
        terms: list = []
        for j in range(n):
            for k in range(n):
                for e, c in sorted(r[j + k][i].items()):
                    factors = [xs[j], ys[k]]
                    for a, m in zip(alpha, e):
                        factors += [a] * m
                    terms += coeff_term(c, factors)
        mul_eqs.append(Eq(zs[i], _sum_terms(terms, zero)))

    def graph(op: str, unary=False):
        if unary:
            return Definition(xs + zs, conj([Eq(z, App(op, (x,), K)) for x, z in zip(xs, zs)]))
        return Definition(xs + ys + zs, conj([Eq(z, App(op, (x, y), K)) for x, y, z in zip(xs, ys, zs)]))

    return Interpretation(
        source=sig, target=ring_signature("K"), coord_sorts=(K,) * n, params=alpha,
        domain=Definition(xs, TOP),
        eq=Definition(xs + ys, conj([Eq(x, y) for x, y in zip(xs, ys)])),
        constants={"0K": Definition(xs, conj([Eq(x, zero) for x in xs])),
                   "1K": Definition(xs, conj([Eq(x, one if i == 0 else zero) for i, x in enumerate(xs)]))},
        functions={"add": graph("add"), "sub": graph("sub"), "neg": graph("neg", unary=True),
                   "mul": Definition(xs + ys + zs, conj(mul_eqs))},
        relations={}, param_values=tuple(mp[:-1]),
        name=f"ext:{q}:{','.join(map(str, mp))}")


def residue_value_interps() -> tuple[Interpretation, Interpretation]:
    """The residue field and the value group interpreted in the three-sorted language.

    Both have arity 1 with coordinates in the home field.  A residue class is
    represented by any element of the valuation ring through ``res``, a value
    by any field element through ``v``.  All defining formulas are
    quantifier-free.
    """
    vf = valued_field_signature()
    K, k, G = "K", "k", "G"
    x, y, z = Var("x", K), Var("y", K), Var("z", K)
    res = lambda t: App("res", (t,), k)
    val = lambda t: App("v", (t,), G)
    in_ring = lambda t: Rel("leG", (App("0G", (), G), val(t)))
    guard = lambda *ts: conj([in_ring(t) for t in ts])

    def rgraph2(op):
        return Definition((x, y, z), And(guard(x, y, z), Eq(App(op, (res(x), res(y)), k), res(z))))

    residue = Interpretation(
        source=residue_signature(), target=vf, coord_sorts=(K,), params=(),
        domain=Definition((x,), in_ring(x)),
        eq=Definition((x, y), And(guard(x, y), Eq(res(x), res(y)))),
        constants={"0k": Definition((x,), And(guard(x), Eq(res(x), App("0k", (), k)))),
                   "1k": Definition((x,), And(guard(x), Eq(res(x), App("1k", (), k))))},
        functions={"addk": rgraph2("addk"), "mulk": rgraph2("mulk"), "subk": rgraph2("subk"),
                   "negk": Definition((x, z), And(guard(x, z), Eq(App("negk", (res(x),), k), res(z))))},
        relations={}, name="residue")
    value = Interpretation(
        source=group_signature(), target=vf, coord_sorts=(K,), params=(),
        domain=Definition((x,), TOP),
        eq=Definition((x, y), Eq(val(x), val(y))),
        constants={"0G": Definition((x,), Eq(val(x), App("0G", (), G))),
                   "inf": Definition((x,), Eq(val(x), App("inf", (), G)))},
        functions={"addG": Definition((x, y, z), Eq(App("addG", (val(x), val(y)), G), val(z))),
                   "negG": Definition((x, z), Eq(App("negG", (val(x),), G), val(z)))},
        relations={"leG": Definition((x, y), Rel("leG", (val(x), val(y)))),
                   "ltG": Definition((x, y), Rel("ltG", (val(x), val(y))))},
        name="value")
    return residue, value


def identity_interp(sig: Signature) -> Interpretation:
    """A one-sorted structure interpreted in itself."""
    (s,) = sig.sorts
    x, y = Var("x", s), Var("y", s)

    def graph(name, args):
        vs = tuple(Var(f"x_{i + 1}", s) for i in range(len(args)))
        return Definition(vs + (y,), Eq(y, App(name, vs, s)))
    return Interpretation(
        source=sig, target=sig, coord_sorts=(s,), params=(),
        domain=Definition((x,), TOP), eq=Definition((x, y), Eq(x, y)),
        constants={c: Definition((x,), Eq(x, App(c, (), s))) for c in sig.constants},
        functions={f: graph(f, a) for f, (a, _) in sig.functions.items()},
        relations={r: Definition(tuple(Var(f"x_{i + 1}", s) for i in range(len(a))),
                                 Rel(r, tuple(Var(f"x_{i + 1}", s) for i in range(len(a)))))
                   for r, a in sig.relations.items()},
        name="identity")


def corrupt_function(I: Interpretation, name: str) -> Interpretation:
    """A copy of I whose definition of ``name`` is deliberately wrong."""
    if name not in I.functions:
        raise InterpretationError(f"no function {name} to corrupt")
    d = I.functions[name]
    n = I.n
    if n >= 2:
        res = d.vars[-n:]
        swapped = d.vars[:-n] + tuple(reversed(res))
        bad = Definition(swapped, d.formula)
    else:
        bad = Definition(d.vars, Not(d.formula))
    return replace(I, functions={**I.functions, name: bad}, name=I.name + f"+corrupt:{name}")


# ---------------------------------------------------------------------------
# verification


@dataclass
class Instance:
    """A concrete interpretation: I with structures A (source), B (target) and Phi."""
    I: Interpretation
    A: FiniteStructure
    B: FiniteStructure
    phi: dict             # target n-tuple -> source element
    param_values: tuple = ()

    def params_env(self) -> dict:
        return {v.key: x for v, x in zip(self.I.params, self.param_values)}


def builtin_instance(spec: str) -> Instance:
    """ext:<q>:<c0,...>, identity:<q>, residue:<q>, value:<q>."""
    parts = spec.split(":")
    kind = parts[0]
    try:
        if kind == "ext":
            q = int(parts[1])
            mp = [int(c) for c in parts[2].split(",")]
            I = field_extension_interp(q, mp)
            A = extension_field_structure(q, mp)
            B = finite_field_structure(q)
            n = I.n
            phi = {t: encode_tuple(t, q) for t in itertools.product(range(q), repeat=n)}
            return Instance(I, A, B, phi, I.param_values)
        if kind == "identity":
            q = int(parts[1])
            S = finite_field_structure(q)
            return Instance(identity_interp(S.signature), S, S, {(a,): a for a in range(q)})
        if kind in ("residue", "value"):
            q = int(parts[1])
            B = trivially_valued_structure(q)
            residue, value = residue_value_interps()
            if kind == "residue":
                return Instance(residue, residue_structure(q), B,
                                {(a,): B.functions["res"][a] for a in range(q)})
            return Instance(value, two_point_group_structure(), B,
                            {(a,): B.functions["v"][a] for a in range(q)})
    except (IndexError, ValueError) as exc:
        if isinstance(exc, InterpretationError):
            raise
        raise InterpretationError(f"bad interpretation spec {spec!r}: {exc}") from None
    raise InterpretationError(f"unknown interpretation spec {spec!r}")


def _structural(inst: Instance) -> dict:
    I, A, B, phi = inst.I, inst.A, inst.B, inst.phi
    env = inst.params_env()
    tuples = list(itertools.product(*(B.carrier(s) for s in I.coord_sorts)))
    dom_def = define_set(B, I.domain.formula, env, I.domain.vars)
    failures = []
    report = {}
    dom = set(phi)
    report["domain"] = dom_def == dom
    if not report["domain"]:
        failures.append("domain: defined set differs from the domain of the map")
    image = set(phi.values())
    report["surjective"] = image == set(A.carrier(I.home_sort))
    if not report["surjective"]:
        failures.append("map is not surjective")
    dom_list = sorted(dom)
    eq_set = define_set(B, I.eq.formula, env, I.eq.vars)
    report["eq"] = all(((a + b) in eq_set) == (phi[a] == phi[b]) for a in dom_list for b in dom_list)
    if not report["eq"]:
        failures.append("eq: kernel mismatch")
    report["constants"] = {}
    for c, d in I.constants.items():
        s = define_set(B, d.formula, env, d.vars)
        ok = all((t in s) == (phi[t] == A.constants[c]) for t in dom_list)
        report["constants"][c] = ok
        if not ok:
            failures.append(f"constant {c}")
    report["functions"] = {}
    for f, d in I.functions.items():
        arity = len(I.source.functions[f][0])
        s = define_set(B, d.formula, env, d.vars)
        ok = True
        for args in itertools.product(dom_list, repeat=arity + 1):
            flat = tuple(itertools.chain(*args))
            want = A.apply(f, tuple(phi[a] for a in args[:-1])) == phi[args[-1]]
            if (flat in s) != want:
                ok = False
                break
        report["functions"][f] = ok
        if not ok:
            failures.append(f"function {f}")
    report["relations"] = {}
    for r, d in list(I.relations.items()) + [(r + "[universal]", d) for r, d in I.relations_universal.items()]:
        base = r.split("[")[0]
        arity = len(I.source.relations[base])
        s = define_set(B, d.formula, env, d.vars)
        rel = A.relations[base]
        ok = all(((tuple(itertools.chain(*args)) in s) == (tuple(phi[a] for a in args) in rel))
                 for args in itertools.product(dom_list, repeat=arity))
        report["relations"][r] = ok
        if not ok:
            failures.append(f"relation {r}")
    report["failures"] = failures
    report["ok"] = not failures
    del tuples
    return report


def source_class(f: Formula) -> FragmentClass:
    return classify_fragment(to_prenex(f))


def fragment_preserved(src: FragmentClass, translated: FragmentClass) -> bool:
    """Whether a translation of a formula of class src stays in src's class.

    A quantifier-free source counts as E(1) (and A(1)): the atomic cases
    introduce one block of quantifiers.
    """
    kind, n = (src.kind, src.n) if src.kind in ("E", "A") else ("E", 1)
    if src.kind == "QF":
        return translated.within("E", 1) or translated.within("A", 1)
    return translated.within(kind, n)


def check_formula(inst: Instance, f: Formula) -> dict:
    """Soundness of the translation of f on all tuples, plus mode and fragment audits."""
    I, A, B, phi = inst.I, inst.A, inst.B, inst.phi
    fv = sorted(free_vars(f), key=lambda v: v.name)
    images = translation_variables(I, f)
    src = source_class(f)
    top_mode = UNIVERSAL if src.kind == "A" else EXISTENTIAL
    variants = {
        "existential": translate_formula(I, f, EXISTENTIAL, "fixed"),
        "universal": translate_formula(I, f, UNIVERSAL, "fixed"),
        "select": translate_formula(I, f, top_mode, "select"),
    }
    fns = {k: B.compiled(v) for k, v in variants.items()}
    src_fn = A.compiled(f)
    env = inst.params_env()
    dom = sorted(inst.phi)
    checked = 0
    counterexample = None
    modes_agree = True
    for combo in itertools.product(dom, repeat=len(fv)):
        src_env = {x.key: phi[t] for x, t in zip(fv, combo)}
        for x, t in zip(fv, combo):
            env.update({v.key: c for v, c in zip(images[x], t)})
        truth = src_fn(src_env)
        vals = {k: fn(env) for k, fn in fns.items()}
        checked += 1
        if len(set(vals.values())) > 1:
            modes_agree = False
        if vals["existential"] != truth and counterexample is None:
            counterexample = {"tuples": {x.key: list(t) for x, t in zip(fv, combo)},
                              "source": truth, "translated": vals}
        if counterexample is not None and not modes_agree:
            break
    classes = {k: classify_fragment(to_prenex(v)) for k, v in variants.items()}
    qf = I.quantifier_free()
    return {
        "formula": render(f),
        "ok": counterexample is None and modes_agree,
        "sound": counterexample is None,
        "modes_agree": modes_agree,
        "checked": checked,
        "counterexample": counterexample,
        "source_class": str(src),
        "translated_class": {k: str(c) for k, c in classes.items()},
        "fragment_preserved": fragment_preserved(src, classes["select"]) if qf else None,
    }


def verify_interpretation(inst: Instance, corpus) -> dict:
    """Structural checks of the defining formulas and soundness on each corpus formula."""
    structural = _structural(inst)
    results = [check_formula(inst, f) for f in corpus]
    failed = [r["formula"] for r in results if not r["ok"]]
    return {
        "interpretation": inst.I.name,
        "arity": inst.I.n,
        "params": [{"var": v.key, "value": x} for v, x in zip(inst.I.params, inst.param_values)],
        "quantifier_free_definitions": inst.I.quantifier_free(),
        "structural": structural,
        "formulas": results,
        "failures": failed,
        "ok": structural["ok"] and not failed,
    }


def load_interpretation(source: str) -> Interpretation:
    if source.endswith(".json"):
        with open(source) as fh:
            return Interpretation.from_json(json.load(fh))
    return builtin_instance(source).I


def load_map(path: str, I: Interpretation, A: FiniteStructure, B: FiniteStructure) -> dict:
    """A JSON list of [[coords...], source element] pairs."""
    with open(path) as fh:
        data = json.load(fh)
    return {tuple(B.element(s, c) for s, c in zip(I.coord_sorts, t)): A.element(I.home_sort, a)
            for t, a in data}
