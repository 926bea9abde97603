"""Finite multi-sorted structures and Tarskian evaluation by exhaustive search.

Elements of each sort are dense integer ids ``0 .. size-1``.  Formulas are
compiled to closures over an environment dict keyed by ``"name:sort"``.

Quantifier blocks are evaluated as a small constraint search: a block
``exists v1 ... vk (C1 and ... and Cm)`` (nested existentials and
conjunctions flattened, universals handled dually) checks each conjunct as
soon as its variables are bound, and a conjunct ``v = t`` with ``t`` already
computable binds ``v`` directly instead of enumerating it.  This is purely an
evaluation order; the semantics is plain enumeration over the carriers.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .algebra.gf import field as gf_field
from .algebra.gf import _has_root_free_factorization
from .logic.syntax import (LAMBDA_SYMBOL, And, Bot, Eq, Exists, Forall, Formula, Implies,
                           Not, Or, Rel, Signature, Term, Top, Var, free_vars, group_signature,
                           ring_signature, term_vars, valued_field_signature)


class UnassignedVariable(KeyError):
    pass


class StructureError(ValueError):
    pass


@dataclass
class FiniteStructure:
    signature: Signature
    sizes: dict                      # sort -> carrier size
    constants: dict                  # name -> id
    functions: dict                  # name -> nested list table (arity >= 1)
    relations: dict                  # name -> set of tuples
    labels: dict = field(default_factory=dict)   # sort -> list of element labels
    lambda_value: int | None = None  # value of every lam_<n>_<m> symbol, if constant
    name: str = ""

    def __post_init__(self):
        sig = self.signature
        for s in sig.sorts:
            if self.sizes.get(s, 0) < 1:
                raise StructureError(f"carrier of sort {s} must be non-empty")
        for c, s in sig.constants.items():
            if c not in self.constants:
                raise StructureError(f"missing constant {c}")
            if not 0 <= self.constants[c] < self.sizes[s]:
                raise StructureError(f"constant {c} out of range")
        for fn, (args, res) in sig.functions.items():
            if fn not in self.functions:
                raise StructureError(f"missing function table {fn}")
            self._check_table(fn, self.functions[fn], args, res)
        for r, args in sig.relations.items():
            rel = {tuple(t) for t in self.relations.get(r, ())}
            for t in rel:
                if len(t) != len(args) or any(not 0 <= x < self.sizes[s] for x, s in zip(t, args)):
                    raise StructureError(f"relation {r} has an ill-sorted tuple {t}")
            self.relations[r] = frozenset(rel)
        self._cache: dict = {}

    def _check_table(self, fn, table, args, res):
        def walk(t, depth):
            if depth == len(args):
                if not isinstance(t, int) or not 0 <= t < self.sizes[res]:
                    raise StructureError(f"function {fn} has an out-of-range value {t!r}")
                return
            if len(t) != self.sizes[args[depth]]:
                raise StructureError(f"function table {fn} is not total")
            for x in t:
                walk(x, depth + 1)
        walk(table, 0)

    def carrier(self, sort: str) -> range:
        return range(self.sizes[sort])

    def label(self, sort: str, x: int) -> str:
        labs = self.labels.get(sort)
        return labs[x] if labs else str(x)

    def element(self, sort: str, token) -> int:
        """Element id from an int or a label."""
        if isinstance(token, int):
            x = token
        elif isinstance(token, str) and token.lstrip("-").isdigit() and not self.labels.get(sort):
            x = int(token)
        else:
            labs = self.labels.get(sort) or []
            if token not in labs:
                if isinstance(token, str) and token.isdigit():
                    x = int(token)
                else:
                    raise StructureError(f"unknown element {token!r} of sort {sort}")
            else:
                x = labs.index(token)
        if not 0 <= x < self.sizes[sort]:
            raise StructureError(f"element {x} outside the carrier of sort {sort}")
        return x

    def function_table(self, name: str):
        if name in self.functions:
            return self.functions[name]
        m = LAMBDA_SYMBOL.match(name)
        if m and self.lambda_value is not None:
            return None
        raise StructureError(f"structure has no interpretation of {name!r}")

    def apply(self, name: str, args: tuple) -> int:
        if not args:
            return self.constants[name]
        table = self.function_table(name)
        if table is None:
            return self.lambda_value
        for a in args:
            table = table[a]
        return table

    # compilation ------------------------------------------------------
    def compiled(self, f: Formula) -> Callable[[dict], bool]:
        fn = self._cache.get(f)
        if fn is None:
            fn = compile_formula(self, f)
            self._cache[f] = fn
        return fn

    def to_json(self) -> dict:
        return {"name": self.name, "signature": self.signature.to_json(), "sizes": self.sizes,
                "constants": self.constants, "functions": self.functions,
                "relations": {k: sorted(list(t) for t in v) for k, v in self.relations.items()},
                "labels": self.labels, "lambda_value": self.lambda_value}

    @classmethod
    def from_json(cls, d: dict) -> FiniteStructure:
        return cls(Signature.from_json(d["signature"]), dict(d["sizes"]), dict(d["constants"]),
                   dict(d["functions"]), {k: {tuple(t) for t in v} for k, v in d.get("relations", {}).items()},
                   dict(d.get("labels", {})), d.get("lambda_value"), d.get("name", ""))


# ---------------------------------------------------------------------------
# compilation


def compile_term(S: FiniteStructure, t: Term) -> Callable[[dict], int]:
    if isinstance(t, Var):
        key = t.key

        def var(env, key=key):
            try:
                return env[key]
            except KeyError:
                raise UnassignedVariable(key) from None
        return var
    if not t.args:
        if t.fn not in S.constants:
            raise StructureError(f"structure has no constant {t.fn!r}")
        c = S.constants[t.fn]
        return lambda env: c
    table = S.function_table(t.fn)
    args = [compile_term(S, a) for a in t.args]
    if table is None:
        c = S.lambda_value
        return lambda env: c
    if len(args) == 1:
        a0 = args[0]
        return lambda env: table[a0(env)]
    if len(args) == 2:
        a0, a1 = args
        return lambda env: table[a0(env)][a1(env)]

    def app(env):
        x = table
        for a in args:
            x = x[a(env)]
        return x
    return app


def compile_formula(S: FiniteStructure, f: Formula) -> Callable[[dict], bool]:
    if isinstance(f, Top):
        return lambda env: True
    if isinstance(f, Bot):
        return lambda env: False
    if isinstance(f, Eq):
        l, r = compile_term(S, f.lhs), compile_term(S, f.rhs)
        return lambda env: l(env) == r(env)
    if isinstance(f, Rel):
        rel = S.relations[f.name]
        args = [compile_term(S, a) for a in f.args]
        if len(args) == 1:
            a0 = args[0]
            return lambda env: (a0(env),) in rel
        if len(args) == 2:
            a0, a1 = args
            return lambda env: (a0(env), a1(env)) in rel
        return lambda env: tuple(a(env) for a in args) in rel
    if isinstance(f, Not):
        b = compile_formula(S, f.body)
        return lambda env: not b(env)
    if isinstance(f, And):
        l, r = compile_formula(S, f.left), compile_formula(S, f.right)
        return lambda env: l(env) and r(env)
    if isinstance(f, Or):
        l, r = compile_formula(S, f.left), compile_formula(S, f.right)
        return lambda env: l(env) or r(env)
    if isinstance(f, Implies):
        l, r = compile_formula(S, f.left), compile_formula(S, f.right)
        return lambda env: (not l(env)) or r(env)
    if isinstance(f, Exists):
        return _compile_block(S, f, positive=True)
    if isinstance(f, Forall):
        search = _compile_block(S, f, positive=False)
        return lambda env: not search(env)
    raise TypeError(f"not a formula: {f!r}")


def _gather(f: Formula, pos: bool, block: list, conjuncts: list, outer_free: set):
    """Flatten f (pos) or not-f (not pos) into block variables and conjuncts."""
    if pos and isinstance(f, And) or (not pos and isinstance(f, Or)):
        _gather(f.left, pos, block, conjuncts, outer_free)
        _gather(f.right, pos, block, conjuncts, outer_free)
        return
    if not pos and isinstance(f, Implies):
        _gather(f.left, True, block, conjuncts, outer_free)
        _gather(f.right, False, block, conjuncts, outer_free)
        return
    if isinstance(f, Not):
        _gather(f.body, not pos, block, conjuncts, outer_free)
        return
    if (pos and isinstance(f, Exists)) or (not pos and isinstance(f, Forall)):
        if f.var not in block and f.var not in outer_free:
            block.append(f.var)
            _gather(f.body, pos, block, conjuncts, outer_free)
            return
    conjuncts.append(f if pos else Not(f))


def _compile_block(S: FiniteStructure, f: Formula, positive: bool) -> Callable[[dict], bool]:
    """Search for an assignment of the block making all conjuncts true.

    For ``positive`` the block is f's existential prefix; otherwise it is the
    universal prefix of f and the conjuncts are those of its negation.
    """
    block = [f.var]
    conjuncts: list = []
    _gather(f.body, positive, block, conjuncts, free_vars(f))
    keys = [v.key for v in block]
    sizes = {v.key: S.sizes[v.sort] for v in block}
    blockset = set(keys)
    info = []
    for c in conjuncts:
        deps = {v.key for v in free_vars(c)} & blockset
        info.append((c, deps))
    bound: set = set()
    remaining = list(range(len(info)))
    steps: list = []
    unbound = list(keys)
    while True:
        ready = [i for i in remaining if info[i][1] <= bound]
        for i in ready:
            steps.append(("check", compile_formula(S, info[i][0])))
            remaining.remove(i)
        if not unbound:
            break
        solved = None
        for i in remaining:
            c, deps = info[i]
            if not isinstance(c, Eq):
                continue
            for side, other in ((c.lhs, c.rhs), (c.rhs, c.lhs)):
                if isinstance(side, Var) and side.key in unbound:
                    odeps = {v.key for v in term_vars(other)} & blockset
                    if side.key not in odeps and odeps <= bound:
                        solved = (i, side.key, other)
                        break
            if solved:
                break
        if solved:
            i, key, other = solved
            steps.append(("assign", key, compile_term(S, other)))
            remaining.remove(i)
            unbound.remove(key)
            bound.add(key)
            continue
        key = unbound.pop(0)
        steps.append(("enum", key, sizes[key]))
        bound.add(key)
    return _chain(steps)


_MISSING = object()


def _chain(steps: list) -> Callable[[dict], bool]:
    nxt: Callable[[dict], bool] = lambda env: True
    for step in reversed(steps):
        nxt = _link(step, nxt)
    return nxt


def _link(step, nxt):
    kind = step[0]
    if kind == "check":
        c = step[1]
        return lambda env: c(env) and nxt(env)
    key = step[1]
    if kind == "assign":
        tf = step[2]

        def assign(env):
            old = env.get(key, _MISSING)
            env[key] = tf(env)
            r = nxt(env)
            if old is _MISSING:
                del env[key]
            else:
                env[key] = old
            return r
        return assign
    size = step[2]

    def enum(env):
        old = env.get(key, _MISSING)
        r = False
        for x in range(size):
            env[key] = x
            if nxt(env):
                r = True
                break
        if old is _MISSING:
            del env[key]
        else:
            env[key] = old
        return r
    return enum


# ---------------------------------------------------------------------------
# public evaluation API


def _normalize_assignment(f_vars: set, assignment: dict | None) -> dict:
    env = {}
    by_name: dict = {}
    for v in f_vars:
        by_name.setdefault(v.name, []).append(v)
    for k, val in (assignment or {}).items():
        if isinstance(k, Var):
            env[k.key] = val
        elif ":" in k:
            env[k] = val
        else:
            cands = by_name.get(k, [])
            if len(cands) > 1:
                raise ValueError(f"variable name {k!r} is ambiguous; use name:sort")
            if cands:
                env[cands[0].key] = val
            else:
                env[k] = val
    return env


def _check_assigned(S: FiniteStructure, f_vars: set, env: dict):
    for v in f_vars:
        if v.key not in env:
            raise UnassignedVariable(f"free variable {v.key} is not assigned")
        if not 0 <= env[v.key] < S.sizes[v.sort]:
            raise StructureError(f"value {env[v.key]} of {v.key} is outside its carrier")


def eval_term(S: FiniteStructure, t: Term, assignment: dict | None = None) -> int:
    vs = term_vars(t)
    env = _normalize_assignment(vs, assignment)
    _check_assigned(S, vs, env)
    return compile_term(S, t)(env)


def eval_formula(S: FiniteStructure, f: Formula, assignment: dict | None = None) -> bool:
    vs = free_vars(f)
    env = _normalize_assignment(vs, assignment)
    _check_assigned(S, vs, env)
    return S.compiled(f)(env)


def define_set(S: FiniteStructure, f: Formula, params: dict | None, free: tuple) -> set:
    """{e : S |= f(e, params)} for the variable tuple ``free``."""
    env = _normalize_assignment(free_vars(f), params)
    rest = free_vars(f) - set(free)
    _check_assigned(S, rest, env)
    fn = S.compiled(f)
    out = set()
    keys = [v.key for v in free]
    for tup in itertools.product(*(S.carrier(v.sort) for v in free)):
        env.update(zip(keys, tup))
        if fn(env):
            out.add(tup)
    return out


# ---------------------------------------------------------------------------
# standard structures


def finite_field_structure(q: int) -> FiniteStructure:
    """F_q in the ring language, elements in the integer encoding of GF(q)."""
    F = gf_field(q)
    sig = ring_signature()
    els = range(q)
    return FiniteStructure(
        sig, {"K": q}, {"0K": 0, "1K": 1},
        {"add": [[F.add(a, b) for b in els] for a in els],
         "mul": [[F.mul(a, b) for b in els] for a in els],
         "sub": [[F.sub(a, b) for b in els] for a in els],
         "neg": [F.neg(a) for a in els]},
        {}, name=f"gf:{q}")


def _poly_mulmod(F, a: list, b: list, mod: list) -> list:
    n = len(mod) - 1
    prod = [0] * (2 * n - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = F.add(prod[i + j], F.mul(x, y))
    for k in range(len(prod) - 1, n - 1, -1):
        c = prod[k]
        if c:
            for i in range(n + 1):
                prod[k - n + i] = F.sub(prod[k - n + i], F.mul(c, mod[i]))
    return prod[:n]


def is_irreducible(q: int, minpoly: Iterable[int]) -> bool:
    """Brute-force irreducibility of a monic polynomial (low-to-high) over F_q."""
    F = gf_field(q)
    f = list(minpoly)
    n = len(f) - 1
    if n < 1 or f[-1] != 1:
        raise ValueError("minimal polynomial must be monic of degree >= 1")
    if n == 1:
        return True
    if F.d == 1:
        return _has_root_free_factorization([c % F.p for c in f], F.p)
    for deg in range(1, n // 2 + 1):
        for tail in itertools.product(range(q), repeat=deg):
            g = list(tail) + [1]
            r = list(f)
            for k in range(len(r) - 1, deg - 1, -1):
                c = r[k]
                if c:
                    for i in range(deg + 1):
                        r[k - deg + i] = F.sub(r[k - deg + i], F.mul(c, g[i]))
            if not any(r[:deg]):
                return False
    return True


def encode_tuple(coords: Iterable[int], q: int) -> int:
    x = 0
    for c in reversed(list(coords)):
        x = x * q + c
    return x


def decode_tuple(x: int, q: int, n: int) -> tuple:
    out = []
    for _ in range(n):
        out.append(x % q)
        x //= q
    return tuple(out)


def extension_field_structure(q: int, minpoly: Iterable[int]) -> FiniteStructure:
    """F_q[X]/(minpoly) in the ring language; a0 + a1 X + ... has id sum a_i q^i."""
    F = gf_field(q)
    mod = list(minpoly)
    n = len(mod) - 1
    if not is_irreducible(q, mod):
        raise ValueError(f"polynomial {mod} is reducible over F_{q}")
    size = q ** n
    tuples = [decode_tuple(x, q, n) for x in range(size)]
    enc = lambda t: encode_tuple(t, q)
    add = [[enc([F.add(a, b) for a, b in zip(tuples[x], tuples[y])]) for y in range(size)]
           for x in range(size)]
    sub = [[enc([F.sub(a, b) for a, b in zip(tuples[x], tuples[y])]) for y in range(size)]
           for x in range(size)]
    neg = [enc([F.neg(a) for a in tuples[x]]) for x in range(size)]
    mul = [[enc(_poly_mulmod(F, list(tuples[x]), list(tuples[y]), mod)) if n > 1
            else enc([F.mul(tuples[x][0], tuples[y][0])]) for y in range(size)] for x in range(size)]
    one = enc([1] + [0] * (n - 1))
    return FiniteStructure(ring_signature(), {"K": size}, {"0K": 0, "1K": one},
                           {"add": add, "mul": mul, "sub": sub, "neg": neg}, {},
                           name=f"ext:{q}:{','.join(map(str, mod))}")


def trivially_valued_structure(q: int) -> FiniteStructure:
    """F_q with the trivial valuation in the three-sorted language.

    K = k = F_q, G = {0, inf}; v(x) = 0 for x != 0, res = ac = identity, and
    every lambda symbol is 0 (a perfect field has no p-independent tuples).
    """
    F = gf_field(q)
    els = range(q)
    ring = {
        "add": [[F.add(a, b) for b in els] for a in els],
        "mul": [[F.mul(a, b) for b in els] for a in els],
        "sub": [[F.sub(a, b) for b in els] for a in els],
        "neg": [F.neg(a) for a in els],
    }
    funcs = dict(ring)
    funcs.update({k + "k": v for k, v in ring.items()})
    funcs.update({
        "addG": [[0, 1], [1, 1]],
        "negG": [0, 1],
        "v": [1 if a == 0 else 0 for a in els],
        "res": list(els),
        "ac": list(els),
    })
    rels = {"leG": {(0, 0), (0, 1), (1, 1)}, "ltG": {(0, 1)}}
    consts = {"0K": 0, "1K": 1, "0k": 0, "1k": 1, "0G": 0, "inf": 1}
    return FiniteStructure(valued_field_signature(), {"K": q, "k": q, "G": 2}, consts, funcs, rels,
                           labels={"G": ["0", "inf"]}, lambda_value=0, name=f"vf:{q}")


def residue_structure(q: int) -> FiniteStructure:
    """F_q in the residue-field language (sort k)."""
    base = finite_field_structure(q)
    from .logic.syntax import residue_signature
    return FiniteStructure(residue_signature(), {"k": q}, {"0k": 0, "1k": 1},
                           {k + "k": v for k, v in base.functions.items()}, {}, name=f"residue:{q}")


def two_point_group_structure() -> FiniteStructure:
    """The value group {0, inf} of a trivial valuation in the group language."""
    return FiniteStructure(group_signature(), {"G": 2}, {"0G": 0, "inf": 1},
                           {"addG": [[0, 1], [1, 1]], "negG": [0, 1]},
                           {"leG": {(0, 0), (0, 1), (1, 1)}, "ltG": {(0, 1)}},
                           labels={"G": ["0", "inf"]}, name="group:trivial")


def baldwin_saxl_structure() -> FiniteStructure:
    """(Z/2)^3 with a membership relation for the subgroups <e1>, <e2>, <e3>."""
    sig = Signature(["D", "P"], {"0D": "D"}, {"addD": (("D", "D"), "D")},
                    {"In": ("D", "P")}, name="bs")
    add = [[a ^ b for b in range(8)] for a in range(8)]
    gens = [1, 2, 4]
    rel = {(x, i) for i, g in enumerate(gens) for x in (0, g)}
    return FiniteStructure(sig, {"D": 8, "P": 3}, {"0D": 0}, {"addD": add}, {"In": rel},
                           labels={"P": ["e1", "e2", "e3"]}, name="bs")


def builtin_structure(spec: str) -> FiniteStructure:
    """Structures by name: gf:<q>, ext:<q>:<c0,c1,...>, vf:<q>, residue:<q>, group:trivial, bs."""
    parts = spec.split(":")
    kind = parts[0]
    try:
        if kind == "gf":
            return finite_field_structure(int(parts[1]))
        if kind == "ext":
            return extension_field_structure(int(parts[1]), [int(c) for c in parts[2].split(",")])
        if kind == "vf":
            return trivially_valued_structure(int(parts[1]))
        if kind == "residue":
            return residue_structure(int(parts[1]))
        if kind == "group":
            return two_point_group_structure()
        if kind == "bs":
            return baldwin_saxl_structure()
    except (IndexError, ValueError) as exc:
        raise StructureError(f"bad structure spec {spec!r}: {exc}") from None
    raise StructureError(f"unknown structure spec {spec!r}")


def load_structure(source: str) -> FiniteStructure:
    """A builtin spec or a path to a JSON structure file."""
    if source.endswith(".json"):
        with open(source) as fh:
            return FiniteStructure.from_json(json.load(fh))
    return builtin_structure(source)
