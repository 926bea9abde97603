"""Parameterized lambda functions in K = F_q(t_1, ..., t_e), char p.

For a p-independent tuple b of length k, every a in the K^p-span of the
monomials b^m (m in Mon(k), exponents < p) is uniquely

    a = sum_m lambda_m(a; b)^p * b^m,

and the coordinates are defined to be 0 when a lies outside that span.  The
canonical p-basis of K is (t_1, ..., t_e), which gives the *ambient*
coordinates; every other coordinate system is obtained from it by solving a
linear system with an explicit adjugate left inverse.

Mon(n) is enumerated by base-p digits, index(m) = sum_j m_j p^j, so the first
p^nu entries of Mon(mu) are exactly Mon(nu) padded with zeros.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .algebra.matrix import ExactMatrix
from .algebra.poly import Poly, gcd
from .algebra.ratfunc import FieldElement, RationalFunctionField, evaluate, function_field


class LambdaPremiseError(ValueError):
    """A p-independence premise needed for rewriting fails at this instance."""


# ---------------------------------------------------------------------------
# monomials


def mon(n: int, p: int) -> list[tuple[int, ...]]:
    """Mon(n): all exponent vectors in [0, p)^n in base-p digit order."""
    out = []
    for idx in range(p ** n):
        digits = []
        for _ in range(n):
            digits.append(idx % p)
            idx //= p
        out.append(tuple(digits))
    return out


def mon_index(m: Sequence[int], p: int) -> int:
    return sum(a * p ** j for j, a in enumerate(m))


def monomial_value(b: Sequence[FieldElement], m: Sequence[int], K: RationalFunctionField) -> FieldElement:
    out = K.one()
    for x, a in zip(b, m):
        if a:
            out = out * x ** a
    return out


def _mon_label(m: tuple[int, ...], names: Sequence[str]) -> str:
    parts = [n if a == 1 else f"{n}^{a}" for n, a in zip(names, m) if a]
    return "*".join(parts) if parts else "1"


@dataclass(frozen=True)
class LambdaCoords:
    """Coordinates of an element with respect to a base tuple."""

    base: tuple
    monomials: tuple
    coords: tuple
    defined: bool = True

    def __getitem__(self, m) -> FieldElement:
        return self.coords[self.monomials.index(tuple(m))]

    def reconstruct(self) -> FieldElement:
        K = self.coords[0].K
        p = K.p
        total = K.zero()
        for m, c in zip(self.monomials, self.coords):
            if c:
                total = total + c ** p * monomial_value(self.base, m, K)
        return total

    def as_dict(self, names: Sequence[str] | None = None) -> dict[str, str]:
        names = names or [f"b{i + 1}" for i in range(len(self.base))]
        return {_mon_label(m, names): str(c) for m, c in zip(self.monomials, self.coords)}


# ---------------------------------------------------------------------------
# ambient coordinates


def _residue_buckets(a: FieldElement) -> tuple[dict, Poly]:
    """Split a = G / h^p with G bucketed by exponent residues mod p."""
    K = a.K
    p = K.p
    h = a.den
    G = a.num * h ** (p - 1)
    buckets: dict[tuple, dict] = {}
    for e, c in G.terms.items():
        r = tuple(x % p for x in e)
        buckets.setdefault(r, {})[tuple(x - y for x, y in zip(e, r))] = c
    return {r: Poly(K.F, K.nvars, t) for r, t in buckets.items()}, h


def ambient_lambda(a: FieldElement) -> LambdaCoords:
    """Coordinates of a with respect to the canonical p-basis (t_1, ..., t_e)."""
    K = a.K
    monos = mon(K.nvars, K.p)
    gens = tuple(K.gens())
    if a.is_zero():
        return LambdaCoords(gens, tuple(monos), tuple(K.zero() for _ in monos))
    buckets, h = _residue_buckets(a)
    hK = K(h)
    coords = []
    for m in monos:
        B = buckets.get(m)
        if B is None:
            coords.append(K.zero())
            continue
        root = B.frobenius_root()
        assert root is not None
        coords.append(K(root) / hK)
    return LambdaCoords(gens, tuple(monos), tuple(coords))


def frobenius_root(a: FieldElement) -> FieldElement | None:
    return a.frobenius_root()


def kp_coordinates(a: FieldElement) -> list[FieldElement]:
    """The K^p-coefficients c_m = lambda_m(a)^p, computed without p-th roots."""
    K = a.K
    monos = mon(K.nvars, K.p)
    if a.is_zero():
        return [K.zero() for _ in monos]
    buckets, h = _residue_buckets(a)
    hp = K(h) ** K.p
    return [K(buckets[m]) / hp if m in buckets else K.zero() for m in monos]


# ---------------------------------------------------------------------------
# p-independence


def coordinate_matrix(b: Sequence[FieldElement], K: RationalFunctionField) -> ExactMatrix:
    """A_{i,j} = lambda_{m_i}(b^{m_j}; t): ambient coordinates of the b-monomials."""
    cols = [ambient_lambda(monomial_value(b, m, K)).coords for m in mon(len(b), K.p)]
    return ExactMatrix([[c[i] for c in cols] for i in range(len(cols[0]))], K.zero(), K.one())


def _lcm(a: Poly, b: Poly) -> Poly:
    return (a * b).exquo(gcd(a, b))


def cleared_rank(columns: Sequence[Sequence[FieldElement]], K: RationalFunctionField) -> int:
    """Rank over K of the given columns, after scaling each to polynomial entries.

    Scaling a column by a nonzero element keeps the rank, and on polynomial
    entries the fraction-free elimination divides exactly, so no rational
    function normalization is needed.
    """
    if not columns:
        return 0
    polys = []
    for col in columns:
        L = Poly.const(K.F, K.nvars, 1)
        for x in col:
            if not x.den.is_const():
                L = _lcm(L, x.den)
        polys.append([x.num * L.exquo(x.den) for x in col])
    rows = [[col[i] for col in polys] for i in range(len(polys[0]))]
    return ExactMatrix(rows, Poly.zero(K.F, K.nvars), Poly.const(K.F, K.nvars, 1)).rank()


def _field_of(b: Sequence[FieldElement], K: RationalFunctionField | None) -> RationalFunctionField:
    if K is not None:
        return K
    if not b:
        raise ValueError("cannot infer the field of an empty tuple")
    return b[0].K


def is_p_independent(b: Sequence[FieldElement], K: RationalFunctionField | None = None) -> bool:
    """Whether {b^m : m in Mon(k)} is linearly independent over K^p."""
    K = _field_of(b, K)
    k = len(b)
    if k == 0:
        return True
    if k > K.nvars:
        return False
    cols = [ambient_lambda(monomial_value(b, m, K)).coords for m in mon(k, K.p)]
    return cleared_rank(cols, K) == K.p ** k


def is_p_independent_direct(b: Sequence[FieldElement], K: RationalFunctionField | None = None) -> bool:
    """Independent route: elimination on K^p-coordinates, no roots taken.

    The K^p-coordinates of one element share the denominator h^p, so each
    vector is scaled to the polynomial buckets of its numerator and
    eliminated by cross-multiplication with row content removal.
    """
    K = _field_of(b, K)
    k = len(b)
    if k == 0:
        return True
    vectors = []
    for m in mon(k, K.p):
        a = monomial_value(b, m, K)
        buckets, _ = _residue_buckets(a)
        vectors.append([buckets.get(r, Poly.zero(K.F, K.nvars)) for r in mon(K.nvars, K.p)])
    return _cross_rank(vectors) == len(vectors)


def _row_content(row: list[Poly]) -> Poly:
    g = None
    for x in row:
        if not x.is_zero():
            g = x if g is None else gcd(g, x)
            if g.is_const():
                break
    return g


def _cross_rank(rows: list[list[Poly]]) -> int:
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        live = [i for i in range(rank, len(rows)) if not rows[i][c].is_zero()]
        if not live:
            continue
        piv = min(live, key=lambda i: sum(len(x.terms) for x in rows[i]))
        rows[rank], rows[piv] = rows[piv], rows[rank]
        P = rows[rank]
        for i in range(rank + 1, len(rows)):
            a = rows[i][c]
            if a.is_zero():
                continue
            g = gcd(a, P[c])
            u, v = P[c].exquo(g), a.exquo(g)
            row = [u * x - v * y for x, y in zip(rows[i], P)]
            g = _row_content(row)
            rows[i] = row if g is None or g.is_const() else [x.exquo(g) for x in row]
        rank += 1
    return rank


def is_p_independent_jacobian(b: Sequence[FieldElement], K: RationalFunctionField | None = None) -> bool:
    """Differential criterion: b is p-independent iff (d b_i / d t_j) has rank |b|."""
    K = _field_of(b, K)
    if not b:
        return True
    J = ExactMatrix([[x.derivative(j) for j in range(K.nvars)] for x in b], K.zero(), K.one())
    return J.rank() == len(b)


# ---------------------------------------------------------------------------
# left inverse


def left_inverse(A: ExactMatrix) -> tuple[ExactMatrix, list[int]]:
    """Left inverse A^mu_L built from the adjugate of an invertible row block.

    mu is the lexicographically least set of row indices whose square
    submatrix is invertible (found greedily, which is optimal for the row
    matroid).  Column mu_k of the result is column k of adj(A^mu)/det(A^mu);
    every other column is zero.
    """
    m, n = A.shape
    if m < n:
        raise ValueError(f"left inverse needs at least as many rows as columns, got {m}x{n}")
    mu: list[int] = []
    for i in range(m):
        if len(mu) == n:
            break
        if A.submatrix(mu + [i]).rank() == len(mu) + 1:
            mu.append(i)
    if len(mu) < n:
        raise ValueError(f"matrix has rank {A.submatrix(mu).rank()} < {n} columns")
    Amu = A.submatrix(mu)
    det = Amu.det()
    inv = Amu.adjugate().map(lambda x: x / det)
    out = [[A.zero] * m for _ in range(n)]
    for k, row in enumerate(mu):
        for i in range(n):
            out[i][row] = inv[i, k]
    return A.like(out), mu


# ---------------------------------------------------------------------------
# coordinates with respect to an arbitrary base


def lambda_coords(a: FieldElement, b: Sequence[FieldElement], K: RationalFunctionField | None = None) -> LambdaCoords:
    """lambda_m(a; b) for all m in Mon(|b|), zero when undefined."""
    K = K or a.K
    b = tuple(K(x) for x in b)
    monos = tuple(mon(len(b), K.p))
    zeros = tuple(K.zero() for _ in monos)
    if a.is_zero():
        return LambdaCoords(b, monos, zeros, True)
    if not is_p_independent(b, K):
        return LambdaCoords(b, monos, zeros, False)
    A = coordinate_matrix(b, K)
    target = list(ambient_lambda(a).coords)
    AL, _ = left_inverse(A)
    x = AL @ target
    if A @ x != target:
        return LambdaCoords(b, monos, zeros, False)
    return LambdaCoords(b, monos, tuple(x), True)


def in_span(a: FieldElement, b: Sequence[FieldElement], K: RationalFunctionField | None = None) -> bool:
    """Whether a lies in K^p(b), for a p-independent b."""
    K = K or a.K
    if a.is_zero():
        return True
    return lambda_coords(a, b, K).defined


# ---------------------------------------------------------------------------
# support sequences


@dataclass
class SupportSequence:
    """Greedy supports S_0 ⊇ S_1 ⊇ ... for a finite window of tuples.

    Index sets are 0-based internally; reports use 1-based coordinates.
    """

    seq: list
    params: tuple
    supports: list          # list of tuples of coordinate indices
    l1: int
    l2: int
    b_prime: tuple          # indices into params
    K: RationalFunctionField = field(repr=False)

    @property
    def l(self) -> int:
        return max(self.l1, self.l2)

    def chosen_before(self, n: int) -> list[FieldElement]:
        """a_{<n}^{S_{<n}} in order."""
        return [self.seq[j][i] for j in range(n) for i in self.supports[j]]

    def basis(self, n: int) -> list[FieldElement]:
        """a_n^{S_l} a_{<l}^{S_{<l}} b' for an index n >= l."""
        l = self.l
        if n < l:
            raise ValueError(f"index {n} is below the stabilization index {l}")
        return [self.seq[n][i] for i in self.supports[l]] + self.chosen_before(l) \
            + [self.params[i] for i in self.b_prime]

    def report(self) -> dict:
        return {
            "supports": [[i + 1 for i in s] for s in self.supports],
            "l1": self.l1,
            "l2": self.l2,
            "l": self.l,
            "b_prime": [i + 1 for i in self.b_prime],
        }


def support_sequence(seq: Sequence[Sequence[FieldElement]], params: Sequence[FieldElement] = (),
                     K: RationalFunctionField | None = None) -> SupportSequence:
    if not seq:
        raise ValueError("empty sequence")
    K = K or seq[0][0].K
    N = len(seq[0])
    if any(len(a) != N for a in seq):
        raise ValueError("all tuples of the sequence must have the same length")
    chosen: list[FieldElement] = []
    supports: list[tuple[int, ...]] = []
    allowed = tuple(range(N))
    for a in seq:
        S = []
        for i in allowed:
            if is_p_independent(chosen + [a[i]], K):
                chosen.append(a[i])
                S.append(i)
        supports.append(tuple(S))
        allowed = tuple(S)
    l2 = 0
    for n in range(len(supports)):
        if all(supports[j] == supports[n] for j in range(n, len(supports))):
            l2 = n
            break
    b_prime = []
    extended = list(chosen)
    for i, x in enumerate(params):
        if is_p_independent(extended + [x], K):
            extended.append(x)
            b_prime.append(i)
    bp = [params[i] for i in b_prime]
    l1 = len(seq)
    for l in range(len(seq) + 1):
        base = [seq[j][i] for j in range(l) for i in supports[j]] + bp
        if all(in_span(x, base, K) for x in params):
            l1 = l
            break
    return SupportSequence([tuple(a) for a in seq], tuple(params), supports, l1, l2,
                           tuple(b_prime), K)


# ---------------------------------------------------------------------------
# rewriting through the base-change system


def term_field(p: int, N: int, m: int) -> RationalFunctionField:
    """F_p(X1..XN, Y1..Ym): the ring where rewriting terms f_i live."""
    names = tuple(f"X{i + 1}" for i in range(N)) + tuple(f"Y{i + 1}" for i in range(m))
    return function_field(p, names)


def instantiate(f, data: SupportSequence, n: int) -> FieldElement:
    """f(a_n, b) for a term f in F_p(X, Y)."""
    values = list(data.seq[n]) + list(data.params)
    if f.K.nvars == 0:
        return data.K.const(f.num.const_value()) / data.K.const(f.den.const_value())
    return evaluate(f, values)


@dataclass
class RewriteResult:
    coords: LambdaCoords
    direct: LambdaCoords
    mu: list
    basis: list
    nu: int
    in_span: bool

    @property
    def agree(self) -> bool:
        return self.coords.coords == self.direct.coords


def lambda_rewrite(fs: Sequence, data: SupportSequence, n: int) -> RewriteResult:
    """lambda(f_0(a_n, b); f_1(a_n, b), ..., f_k(a_n, b)) via the base-change system.

    With c = a_n^{S_l} a_{<l}^{S_{<l}} b' and F = (f_1, ..., f_k)(a_n, b), the
    matrix A_n[i][j] = lambda_{m_i}(F^{m_j}; c) satisfies
    A_n . lambda(f_0; F) = lambda(f_0; c), solved with the adjugate left inverse.
    """
    K = data.K
    if len(fs) < 2:
        raise ValueError("need f_0 and at least one f_i")
    c = data.basis(n)
    if not is_p_independent(c, K):
        raise LambdaPremiseError(f"the support basis at index {n} is not p-independent")
    try:
        vals = [instantiate(f, data, n) for f in fs]
    except ZeroDivisionError:
        raise LambdaPremiseError(f"a term has a vanishing denominator at index {n}") from None
    f0, F = vals[0], vals[1:]
    k, nu = len(F), len(c)
    if k > nu:
        raise LambdaPremiseError(f"{k} elements cannot be p-independent over a basis of size {nu}")
    target = lambda_coords(f0, c, K)
    if not target.defined:
        raise LambdaPremiseError(f"f_0(a_{n}, b) is outside the K^p-span of the support basis")
    cols = []
    for m in mon(k, K.p):
        lc = lambda_coords(monomial_value(F, m, K), c, K)
        if not lc.defined:
            raise LambdaPremiseError(f"F^{m} at index {n} is outside the span of the support basis")
        cols.append(lc.coords)
    A = ExactMatrix([[col[i] for col in cols] for i in range(K.p ** nu)], K.zero(), K.one())
    if A.rank() < K.p ** k:
        raise LambdaPremiseError(f"rank collapse at index {n}: (f_1, ..., f_k) is not p-independent")
    AL, mu = left_inverse(A)
    x = AL @ list(target.coords)
    monos = tuple(mon(k, K.p))
    spanned = A @ x == list(target.coords)
    if not spanned:
        x = [K.zero() for _ in monos]
    coords = LambdaCoords(tuple(F), monos, tuple(x), spanned or f0.is_zero())
    direct = lambda_coords(f0, F, K)
    return RewriteResult(coords, direct, mu, c, nu, spanned)


# ---------------------------------------------------------------------------
# lambda closure


def _degree1(x: FieldElement) -> int:
    return max(x.num.total_degree(), x.den.total_degree())


def field_membership(x: FieldElement, gens: Sequence[FieldElement], degree: int | None = None) -> bool | None:
    """Decide x in F_q(gens) by searching x = P(gens)/Q(gens) with bounded degrees.

    Returns True with a certificate found, False when the bound is provably
    sufficient (no generators, or one generator in one variable), and None
    when the search is inconclusive.
    """
    K = x.K
    gens = [g for g in gens if not g.is_const()]
    if x.is_const():
        return True
    if not gens:
        return False
    single = len(gens) == 1 and K.nvars == 1
    if degree is None:
        degree = max(1, _degree1(x) // max(1, min(_degree1(g) for g in gens))) if single else 2
    r = len(gens)
    expts = list(itertools.product(range(degree + 1), repeat=r))
    # basis polynomials M_mu = prod u_i^mu_i w_i^(D - mu_i), so P(G) W = sum p_mu M_mu
    basis = []
    for mu_ in expts:
        poly = Poly.const(K.F, K.nvars, 1)
        for g, a in zip(gens, mu_):
            poly = poly * g.num ** a * g.den ** (degree - a)
        basis.append(poly)
    columns = [b * x.den for b in basis] + [-(b * x.num) for b in basis]
    keys = sorted({e for col in columns for e in col.terms})
    rows = [[col.terms.get(e, 0) for col in columns] for e in keys]
    null = K.F.nullspace(rows, len(columns))
    nb = len(basis)
    for v in null:
        Q = Poly.zero(K.F, K.nvars)
        for coeff, b in zip(v[nb:], basis):
            if coeff:
                Q = Q + b.scale(coeff)
        if not Q.is_zero():
            return True
    if single:
        return False
    return None


def _candidate_bases(gens: Sequence[FieldElement], K: RationalFunctionField) -> list[tuple]:
    """All p-independent tuples (including the empty one) drawn in order from gens."""
    out: list[tuple] = [()]
    pool = [g for g in dict.fromkeys(gens) if not g.is_const()]
    for size in range(1, min(len(pool), K.nvars) + 1):
        for combo in itertools.combinations(pool, size):
            if is_p_independent(combo, K):
                out.append(combo)
    return out


def _span_elements(gens: Sequence[FieldElement], K: RationalFunctionField) -> list[FieldElement]:
    """Monomials g^m, m in Mon(|gens|): they span F over F^p."""
    gens = [g for g in dict.fromkeys(gens) if not g.is_const()]
    return [monomial_value(gens, m, K) for m in mon(len(gens), K.p)]


@dataclass
class ClosureReport:
    generators: list
    iterations: int
    stabilized: bool
    added: list = field(default_factory=list)
    inconclusive: int = 0


def lambda_closure(F_gens: Sequence[FieldElement], b: FieldElement, max_iter: int = 5,
                   K: RationalFunctionField | None = None) -> ClosureReport:
    """Close F(b) under lambda_m(.; c) for p-independent tuples c from the field."""
    K = K or b.K
    gens = [K(g) for g in F_gens]
    if not field_membership(b, gens):
        gens.append(b)
    added: list = []
    inconclusive = 0
    for it in range(max_iter + 1):
        new = []
        for c in _candidate_bases(gens, K):
            for a in _span_elements(gens, K):
                for y in lambda_coords(a, c, K).coords:
                    if y.is_const() or y in gens or y in new:
                        continue
                    status = field_membership(y, gens + new)
                    if status is None:
                        inconclusive += 1
                    if not status:
                        new.append(y)
        if not new:
            return ClosureReport(gens, it, True, added, inconclusive)
        if it == max_iter:
            break
        gens.extend(new)
        added.extend(new)
    return ClosureReport(gens, max_iter, False, added, inconclusive)


@dataclass
class ClosednessReport:
    closed: bool | None
    witness: dict | None = None
    checked: int = 0


def is_lambda_closed(F_gens: Sequence[FieldElement], K: RationalFunctionField,
                     degree: int | None = None) -> ClosednessReport:
    """Search lambda_m(a; c), a a spanning monomial of F and c from F, escaping F."""
    gens = [K(g) for g in F_gens]
    checked = 0
    unknown = None
    for c in _candidate_bases(gens, K):
        for a in _span_elements(gens, K):
            lc = lambda_coords(a, c, K)
            for m, y in zip(lc.monomials, lc.coords):
                checked += 1
                status = field_membership(y, gens, degree)
                if status is False:
                    return ClosednessReport(False, {"a": str(a), "b": [str(x) for x in c],
                                                    "m": list(m), "value": str(y)}, checked)
                if status is None and unknown is None:
                    unknown = {"a": str(a), "b": [str(x) for x in c], "m": list(m), "value": str(y)}
    if unknown is not None:
        return ClosednessReport(None, unknown, checked)
    return ClosednessReport(True, None, checked)
