"""Sparse multivariate polynomials over F_q.

Terms are stored as ``{exponent tuple: coefficient}`` with coefficients in the
integer encoding of :class:`~wb.algebra.gf.GF`.  The term order used for
leading terms and monic normalization is lex with the first variable most
significant, i.e. plain tuple comparison.
"""

from __future__ import annotations

import itertools

from typing import Iterable

from .gf import GF


class Poly:
    __slots__ = ("F", "n", "terms", "_hash")

    def __init__(self, F: GF, n: int, terms: dict | None = None):
        self.F = F
        self.n = n
        self.terms = {e: c for e, c in (terms or {}).items() if c}
        self._hash = None

    # construction -----------------------------------------------------
    @classmethod
    def zero(cls, F: GF, n: int) -> Poly:
        return cls(F, n)

    @classmethod
    def const(cls, F: GF, n: int, c: int) -> Poly:
        return cls(F, n, {(0,) * n: c})

    @classmethod
    def var(cls, F: GF, n: int, i: int, power: int = 1) -> Poly:
        e = [0] * n
        e[i] = power
        return cls(F, n, {tuple(e): 1})

    @classmethod
    def monomial(cls, F: GF, n: int, exp: Iterable[int], c: int = 1) -> Poly:
        return cls(F, n, {tuple(exp): c})

    def _new(self, terms: dict) -> Poly:
        p = Poly.__new__(Poly)
        p.F, p.n, p.terms, p._hash = self.F, self.n, terms, None
        return p

    # predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def const_value(self) -> int:
        if not self.terms:
            return 0
        if not self.is_const():
            raise ValueError("not a constant polynomial")
        return next(iter(self.terms.values()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self == Poly.const(self.F, self.n, self.F.from_int(other))
        return isinstance(other, Poly) and self.n == other.n and self.F == other.F \
            and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, self.F.q, frozenset(self.terms.items())))
        return self._hash

    # arithmetic -------------------------------------------------------
    def __add__(self, other: Poly) -> Poly:
        add = self.F.add_table
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = add[out.get(e, 0)][c]
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return self._new(out)

    def __neg__(self) -> Poly:
        neg = self.F.neg_table
        return self._new({e: neg[c] for e, c in self.terms.items()})

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def __mul__(self, other: Poly) -> Poly:
        if not self.terms or not other.terms:
            return self._new({})
        add, mul = self.F.add_table, self.F.mul_table
        out: dict = {}
        for e1, c1 in self.terms.items():
            row = mul[c1]
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = add[out.get(e, 0)][row[c2]]
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return self._new(out)

    def scale(self, c: int) -> Poly:
        if c == 0:
            return self._new({})
        row = self.F.mul_table[c]
        return self._new({e: row[x] for e, x in self.terms.items()})

    def shift(self, exp: tuple) -> Poly:
        """Multiply by the monomial with exponent ``exp``."""
        return self._new({tuple(a + b for a, b in zip(e, exp)): c for e, c in self.terms.items()})

    def __pow__(self, k: int) -> Poly:
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.const(self.F, self.n, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # structure --------------------------------------------------------
    def lead(self) -> tuple[tuple, int]:
        e = max(self.terms)
        return e, self.terms[e]

    def trailing(self) -> tuple[tuple, int]:
        """Lex-least term: exponent and coefficient."""
        e = min(self.terms)
        return e, self.terms[e]

    def monic(self) -> Poly:
        if not self.terms:
            return self
        _, c = self.lead()
        return self if c == 1 else self.scale(self.F.inv(c))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def deg_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=-1)

    def variables(self) -> set[int]:
        return {i for e in self.terms for i, a in enumerate(e) if a}

    def min_exponents(self) -> tuple:
        return tuple(min(e[i] for e in self.terms) for i in range(self.n))

    def coeffs_in(self, i: int) -> dict[int, Poly]:
        """Split as sum_k c_k * x_i^k with c_k free of x_i."""
        out: dict[int, dict] = {}
        for e, c in self.terms.items():
            k = e[i]
            out.setdefault(k, {})[e[:i] + (0,) + e[i + 1:]] = c
        return {k: self._new(t) for k, t in out.items()}

    def exquo(self, other: Poly) -> Poly:
        """Exact quotient self / other; raises ValueError if not exact."""
        if not other.terms:
            raise ZeroDivisionError("division by zero polynomial")
        if other.is_const():
            return self.scale(self.F.inv(other.const_value()))
        if other.is_monomial():
            (eo, co), = other.terms.items()
            inv = self.F.inv(co)
            out = {}
            for e, c in self.terms.items():
                d = tuple(a - b for a, b in zip(e, eo))
                if min(d) < 0:
                    raise ValueError("inexact polynomial division")
                out[d] = self.F.mul(c, inv)
            return self._new(out)
        F = self.F
        le, lc = other.lead()
        inv = F.inv(lc)
        rem = dict(self.terms)
        quot: dict = {}
        while rem:
            e = max(rem)
            d = tuple(a - b for a, b in zip(e, le))
            if min(d) < 0:
                raise ValueError("inexact polynomial division")
            c = F.mul(rem[e], inv)
            quot[d] = c
            for eo, co in other.terms.items():
                k = tuple(a + b for a, b in zip(eo, d))
                s = F.sub(rem.get(k, 0), F.mul(c, co))
                if s:
                    rem[k] = s
                else:
                    rem.pop(k, None)
        return self._new(quot)

    def __truediv__(self, other: Poly) -> Poly:
        """Exact division (used by fraction-free elimination over polynomial rings)."""
        return self.exquo(other)

    def derivative(self, i: int) -> Poly:
        out: dict = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                cc = self.F.mul(c, self.F.from_int(k))
                if cc:
                    out[e[:i] + (k - 1,) + e[i + 1:]] = cc
        return self._new(out)

    def frobenius_root(self) -> Poly | None:
        """The polynomial r with r^p = self, or None when none exists."""
        p = self.F.p
        out = {}
        for e, c in self.terms.items():
            if any(a % p for a in e):
                return None
            out[tuple(a // p for a in e)] = self.F.root(c)
        return self._new(out)

    def __repr__(self) -> str:
        return f"Poly({self.to_str()})"

    def to_str(self, names: list[str] | None = None) -> str:
        names = names or [f"x{i + 1}" for i in range(self.n)]
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(names[i] if a == 1 else f"{names[i]}^{a}"
                            for i, a in enumerate(e) if a)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts)


def _content(a: Poly, i: int) -> Poly:
    g = None
    for c in a.coeffs_in(i).values():
        g = c.monic() if g is None else gcd(g, c)
        if g.is_const():
            return g
    return g


def _prem(a: Poly, b: Poly, i: int) -> Poly:
    """Sparse pseudo-remainder of a by b with respect to x_i."""
    db = b.deg_in(i)
    lcb = b.coeffs_in(i)[db]
    r = a
    while r.terms:
        dr = r.deg_in(i)
        if dr < db:
            break
        lcr = r.coeffs_in(i)[dr]
        shift = [0] * r.n
        shift[i] = dr - db
        r = lcb * r - (lcr * b).shift(tuple(shift))
    return r


def _specialize(P: Poly, i: int, point: dict) -> Poly:
    """Substitute point[j] for x_j (j != i), leaving a polynomial in x_i alone."""
    F = P.F
    out: dict = {}
    for e, c in P.terms.items():
        v = c
        for j, a in enumerate(e):
            if j != i and a:
                v = F.mul(v, F.pow(point[j], a))
                if not v:
                    break
        if v:
            k = (0,) * i + (e[i],) + (0,) * (P.n - i - 1)
            s = F.add(out.get(k, 0), v)
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return P._new(out)


def _coprime_in(a: Poly, b: Poly, i: int, tries: int = 12) -> bool:
    """Certificate that gcd(a, b) has degree 0 in x_i.

    At a point of F_q for the other variables where neither leading
    coefficient in x_i vanishes, the degree in x_i of gcd(a, b) is at most
    that of the gcd of the specialized univariate polynomials.  Returns False
    when no such point certifies coprimality (which proves nothing).
    """
    others = sorted((a.variables() | b.variables()) - {i})
    la, lb = a.coeffs_in(i)[a.deg_in(i)], b.coeffs_in(i)[b.deg_in(i)]
    q = a.F.q
    for count, pt in enumerate(itertools.product(range(q), repeat=len(others))):
        if count >= tries:
            break
        point = dict(zip(others, pt))
        if _specialize(la, i, point).is_zero() or _specialize(lb, i, point).is_zero():
            continue
        if gcd(_specialize(a, i, point), _specialize(b, i, point)).is_const():
            return True
    return False


def gcd(a: Poly, b: Poly) -> Poly:
    """Monic greatest common divisor by recursive primitive PRS."""
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    one = Poly.const(a.F, a.n, 1)
    if a.is_const() or b.is_const():
        return one
    if a.is_monomial() or b.is_monomial():
        m = a if a.is_monomial() else b
        other = b if m is a else a
        lo = tuple(min(x, y) for x, y in zip(next(iter(m.terms)), other.min_exponents()))
        return Poly.monomial(a.F, a.n, lo)
    va, vb = a.variables(), b.variables()
    i = max(va | vb)
    if i not in va:
        return gcd(a, _content(b, i))
    if i not in vb:
        return gcd(_content(a, i), b)
    ca, cb = _content(a, i), _content(b, i)
    pa, pb = a.exquo(ca), b.exquo(cb)
    if len(va | vb) > 1 and _coprime_in(pa, pb, i):
        return gcd(ca, cb)
    if pa.deg_in(i) < pb.deg_in(i):
        pa, pb = pb, pa
    while pb.terms and pb.deg_in(i) > 0:
        r = _prem(pa, pb, i)
        pa = pb
        if not r.terms:
            pb = r
            break
        pb = r.exquo(_content(r, i)) if r.deg_in(i) > 0 else r
    if pb.terms:
        # remainder free of x_i: the primitive parts are coprime
        pa = one
    else:
        pa = pa.exquo(_content(pa, i))
    return (gcd(ca, cb) * pa).monic()
