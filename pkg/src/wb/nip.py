"""Finite-scale independence-property experiments.

Trace families of a partitioned formula f(x; y) in a finite structure, VC
dimension by two independent exhaustive methods, alternation numbers along
sequences, IP witness search and Baldwin-Saxl intersection checks for
uniformly definable families of subgroups.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from .logic.syntax import Formula, Var, free_vars
from .models import FiniteStructure


class SplitError(ValueError):
    pass


class SubgroupError(ValueError):
    pass


@dataclass
class TraceFamily:
    ground: list                      # list of x-tuples
    members: list                     # distinct frozensets of indices into ground
    witnesses: list = field(default_factory=list)   # a parameter tuple per member

    def masks(self) -> list[int]:
        return [sum(1 << i for i in m) for m in self.members]

    def to_json(self) -> dict:
        return {"ground": [list(g) for g in self.ground],
                "members": [sorted(list(self.ground[i]) for i in m) for m in self.members],
                "witnesses": [list(w) for w in self.witnesses]}


def split_variables(f: Formula, x_names, y_names) -> tuple[tuple, tuple]:
    """Resolve names (or name:sort keys) into the x and y variable tuples of f."""
    fv = {v.name: v for v in free_vars(f)}
    keys = {v.key: v for v in free_vars(f)}

    def resolve(names):
        out = []
        for n in names:
            v = keys.get(n) or fv.get(n)
            if v is None:
                if ":" in n:
                    name, sort = n.split(":", 1)
                    v = Var(name, sort)
                else:
                    raise SplitError(f"variable {n!r} does not occur free and has no sort")
            out.append(v)
        return tuple(out)
    xs, ys = resolve(x_names), resolve(y_names)
    if set(xs) & set(ys):
        raise SplitError("the x and y variables overlap")
    missing = free_vars(f) - set(xs) - set(ys)
    if missing:
        raise SplitError(f"free variables {sorted(v.key for v in missing)} are in neither part of the split")
    return xs, ys


def parse_split(text: str) -> tuple[list, list]:
    """'x1,x2|y1' -> (['x1','x2'], ['y1'])."""
    if "|" not in text:
        raise SplitError("split must look like 'x1,x2|y1,y2'")
    left, right = text.split("|", 1)
    part = lambda s: [t.strip() for t in s.split(",") if t.strip()]
    return part(left), part(right)


def _tuples(S: FiniteStructure, vs) -> list:
    return list(itertools.product(*(S.carrier(v.sort) for v in vs)))


def trace_family(S: FiniteStructure, f: Formula, xs: tuple, ys: tuple, ground=None) -> TraceFamily:
    """{ {a in ground : S |= f(a, b)} : b }, deduplicated, with one witness b each."""
    if set(free_vars(f)) - set(xs) - set(ys):
        raise SplitError("formula has free variables outside the split")
    ground = list(ground) if ground is not None else _tuples(S, xs)
    fn = S.compiled(f)
    seen: dict = {}
    members, witnesses = [], []
    env: dict = {}
    for b in _tuples(S, ys):
        env.update({v.key: x for v, x in zip(ys, b)})
        idx = []
        for i, a in enumerate(ground):
            env.update({v.key: x for v, x in zip(xs, a)})
            if fn(env):
                idx.append(i)
        m = frozenset(idx)
        if m not in seen:
            seen[m] = len(members)
            members.append(m)
            witnesses.append(b)
    return TraceFamily(ground, members, witnesses)


def family_from_sets(ground, sets) -> TraceFamily:
    ground = list(ground)
    pos = {g: i for i, g in enumerate(ground)}
    members = []
    for s in sets:
        m = frozenset(pos[x] for x in s)
        if m not in members:
            members.append(m)
    return TraceFamily(ground, members, [() for _ in members])


def is_shattered(masks, subset) -> bool:
    a = 0
    for i in subset:
        a |= 1 << i
    return len({m & a for m in masks}) == 1 << len(subset)


def vc_dimension(T: TraceFamily) -> int:
    """Largest size of a shattered subset, by enumerating subsets by size."""
    if not T.members:
        return -1
    masks = set(T.masks())
    n = len(T.ground)
    best = 0
    for d in range(1, n + 1):
        if (1 << d) > len(masks):
            break
        if any(is_shattered(masks, s) for s in itertools.combinations(range(n), d)):
            best = d
        else:
            break
    return best


def shattered_sets(T: TraceFamily) -> frozenset:
    """All shattered subsets (as bitmasks) via the split on one point at a time.

    With F0 and F1 the members without and with the point x, both restricted
    to the remaining points, Sh(F) = Sh(F0 | F1) | {A + x : A in Sh(F0) & Sh(F1)}.
    """
    n = len(T.ground)

    @lru_cache(maxsize=None)
    def sh(fam: frozenset, k: int) -> frozenset:
        if not fam:
            return frozenset()
        if k == n:
            return frozenset({0})
        bit = 1 << k
        f0 = frozenset(m for m in fam if not m & bit)
        f1 = frozenset(m & ~bit for m in fam if m & bit)
        both = sh(f0, k + 1) & sh(f1, k + 1)
        return sh(f0 | f1, k + 1) | frozenset(a | bit for a in both)
    return sh(frozenset(T.masks()), 0)


def vc_dimension_by_shattered_sets(T: TraceFamily) -> int:
    sets = shattered_sets(T)
    if not sets:
        return -1
    return max(bin(a).count("1") for a in sets)


# ---------------------------------------------------------------------------
# alternation


@dataclass
class AlternationData:
    sequence: list
    parameter: tuple
    trace: list


def alternation_number(trace) -> int:
    """Number of truth-value switches along a boolean sequence."""
    trace = list(trace)
    return sum(1 for a, b in zip(trace, trace[1:]) if a != b)


def alternation_along(S: FiniteStructure, f: Formula, xs: tuple, ys: tuple, sequence, d) -> AlternationData:
    fn = S.compiled(f)
    env = {v.key: x for v, x in zip(ys, d)}
    trace = []
    for a in sequence:
        env.update({v.key: x for v, x in zip(xs, a)})
        trace.append(bool(fn(env)))
    return AlternationData(list(sequence), tuple(d), trace)


def max_alternation(S: FiniteStructure, f: Formula, xs: tuple, ys: tuple, sequence) -> tuple[int, tuple]:
    """Maximal alternation number over all parameters, with a parameter attaining it."""
    best, arg = -1, None
    for d in _tuples(S, ys):
        a = alternation_number(alternation_along(S, f, xs, ys, sequence, d).trace)
        if a > best:
            best, arg = a, d
    return best, arg


# ---------------------------------------------------------------------------
# IP witnesses


@dataclass
class IPWitness:
    points: list                 # a_1 .. a_k
    parameters: dict             # frozenset of indices (0-based) -> b_S

    def to_json(self) -> dict:
        return {"a": [list(a) for a in self.points],
                "b": [{"S": sorted(s), "b": list(b)} for s, b in
                      sorted(self.parameters.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))]}


def ip_witness_search(S: FiniteStructure, f: Formula, xs: tuple, ys: tuple, k: int) -> IPWitness | None:
    """Points a_1..a_k and parameters b_S with f(a_i, b_S) iff i in S, for all S."""
    if k < 0:
        raise ValueError("k must be non-negative")
    T = trace_family(S, f, xs, ys)
    if k == 0:
        b = T.witnesses[0] if T.witnesses else next(iter(_tuples(S, ys)))
        return IPWitness([], {frozenset(): b})
    masks = T.masks()
    for combo in itertools.combinations(range(len(T.ground)), k):
        pattern_of = {}
        for m, w in zip(masks, T.witnesses):
            pat = frozenset(j for j, i in enumerate(combo) if m >> i & 1)
            pattern_of.setdefault(pat, w)
        if len(pattern_of) == 1 << k:
            return IPWitness([T.ground[i] for i in combo], pattern_of)
    return None


# ---------------------------------------------------------------------------
# Baldwin-Saxl


@dataclass
class GroupSpec:
    sort: str
    op: str
    identity: str


def _instance(S: FiniteStructure, f: Formula, x: Var, ys: tuple, a) -> frozenset:
    fn = S.compiled(f)
    env = {v.key: c for v, c in zip(ys, a)}
    out = []
    for g in S.carrier(x.sort):
        env[x.key] = g
        if fn(env):
            out.append(g)
    return frozenset(out)


def check_subgroup(S: FiniteStructure, group: GroupSpec, H: frozenset) -> bool:
    e = S.constants[group.identity]
    table = S.functions[group.op]
    return e in H and all(table[a][b] in H for a in H for b in H)


@dataclass
class BaldwinSaxlReport:
    holds: bool
    n: int
    counterexample: list | None = None
    intersection: list | None = None
    subgroups: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"holds": self.holds, "n": self.n,
                "counterexample": [list(a) for a in self.counterexample] if self.counterexample else None,
                "intersection": self.intersection,
                "subgroups": {str(list(k)): sorted(v) for k, v in self.subgroups.items()}}


def baldwin_saxl_check(S: FiniteStructure, group: GroupSpec, f: Formula, x: Var, ys: tuple,
                       params: list, n: int) -> BaldwinSaxlReport:
    """Whether every (n+1)-subfamily has the intersection of one of its n-subfamilies."""
    if x.sort != group.sort:
        raise SubgroupError(f"variable {x.key} is not of the group sort {group.sort}")
    full = frozenset(S.carrier(group.sort))
    subs = {}
    for a in params:
        a = tuple(a)
        H = _instance(S, f, x, ys, a)
        if not check_subgroup(S, group, H):
            raise SubgroupError(f"instance for parameter {list(a)} is not a subgroup")
        subs[a] = H
    keys = list(subs)

    def meet(idx) -> frozenset:
        out = full
        for i in idx:
            out = out & subs[keys[i]]
        return out
    for combo in itertools.combinations(range(len(keys)), n + 1):
        whole = meet(combo)
        if not any(meet(sub) == whole for sub in itertools.combinations(combo, n)):
            return BaldwinSaxlReport(False, n, [keys[i] for i in combo], sorted(whole), subs)
    return BaldwinSaxlReport(True, n, subgroups=subs)
