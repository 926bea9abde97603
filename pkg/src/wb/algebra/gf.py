"""Finite fields F_q, q = p^d, with elements encoded as integers.

An element of F_{p^d} is the integer whose base-p digits are the coefficients
(constant term first) of its residue modulo a fixed monic irreducible
polynomial of degree d.  For d = 1 this is the usual residue mod p.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

MAX_ORDER = 4096


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, d) with q = p**d, or raise ValueError."""
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            break
    d, r = 0, q
    while r % p == 0:
        r //= p
        d += 1
    if r != 1 or not is_prime(p):
        raise ValueError(f"{q} is not a prime power")
    return p, d


def _poly_mulmod(a: list[int], b: list[int], mod: list[int], p: int) -> list[int]:
    d = len(mod) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    # mod is monic
    for k in range(len(prod) - 1, d - 1, -1):
        c = prod[k]
        if c:
            for i in range(d + 1):
                prod[k - d + i] = (prod[k - d + i] - c * mod[i]) % p
    return (prod + [0] * d)[:d]


def _has_root_free_factorization(f: list[int], p: int) -> bool:
    """True iff the monic polynomial f (low-to-high) over F_p is irreducible."""
    n = len(f) - 1
    for deg in range(1, n // 2 + 1):
        for tail in itertools.product(range(p), repeat=deg):
            g = list(tail) + [1]
            # polynomial remainder of f by g over F_p
            r = list(f)
            for k in range(len(r) - 1, deg - 1, -1):
                c = r[k]
                if c:
                    for i in range(deg + 1):
                        r[k - deg + i] = (r[k - deg + i] - c * g[i]) % p
            if not any(r[:deg]):
                return False
    return True


@lru_cache(maxsize=None)
def conway_like_modulus(p: int, d: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible polynomial of degree d over F_p."""
    if d == 1:
        return (0, 1)
    for tail in itertools.product(range(p), repeat=d):
        f = list(reversed(tail)) + [1]
        if f[0] == 0:
            continue
        if _has_root_free_factorization(f, p):
            return tuple(f)
    raise ValueError(f"no irreducible polynomial of degree {d} over F_{p}")


class GF:
    """The finite field with q = p**d elements, operations by table lookup."""

    def __init__(self, q: int):
        p, d = prime_power(q)
        if q > MAX_ORDER:
            raise ValueError(f"field order {q} exceeds {MAX_ORDER}")
        self.p, self.d, self.q = p, d, q
        self.modulus = conway_like_modulus(p, d)
        digits = [self._digits(x) for x in range(q)]
        self.add_table = [[self._encode([(u + v) % p for u, v in zip(digits[a], digits[b])])
                           for b in range(q)] for a in range(q)]
        self.neg_table = [self._encode([(-u) % p for u in digits[a]]) for a in range(q)]
        self.mul_table = [[self._encode(_poly_mulmod(digits[a], digits[b], list(self.modulus), p))
                           for b in range(q)] for a in range(q)]
        self.inv_table = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if self.mul_table[a][b] == 1:
                    self.inv_table[a] = b
                    break
        # inverse Frobenius x -> x^(p^(d-1))
        e = p ** (d - 1)
        self.root_table = [self.pow(a, e) for a in range(q)]

    def _digits(self, x: int) -> list[int]:
        out = []
        for _ in range(self.d):
            out.append(x % self.p)
            x //= self.p
        return out

    def _encode(self, digits) -> int:
        x = 0
        for c in reversed(list(digits)):
            x = x * self.p + c
        return x

    def __repr__(self) -> str:
        return f"GF({self.q})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GF) and other.q == self.q

    def __hash__(self) -> int:
        return hash(("GF", self.q))

    @property
    def elements(self) -> range:
        return range(self.q)

    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.add_table[a][self.neg_table[b]]

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in " + repr(self))
        return self.inv_table[a]

    def div(self, a: int, b: int) -> int:
        return self.mul_table[a][self.inv(b)]

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        r = 1
        while e:
            if e & 1:
                r = self.mul_table[r][a]
            a = self.mul_table[a][a]
            e >>= 1
        return r

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> F_q."""
        return n % self.p

    def root(self, a: int) -> int:
        """The unique p-th root of a (Frobenius is bijective on F_q)."""
        return self.root_table[a]

    def nullspace(self, rows: list[list[int]], ncols: int) -> list[list[int]]:
        """Basis of {x : rows . x = 0} by Gauss-Jordan elimination over F_q."""
        m = [list(r) for r in rows]
        pivots: list[int] = []
        r = 0
        for c in range(ncols):
            piv = next((i for i in range(r, len(m)) if m[i][c]), None)
            if piv is None:
                continue
            m[r], m[piv] = m[piv], m[r]
            inv = self.inv(m[r][c])
            m[r] = [self.mul(inv, x) for x in m[r]]
            for i in range(len(m)):
                if i != r and m[i][c]:
                    f = m[i][c]
                    m[i] = [self.sub(x, self.mul(f, y)) for x, y in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == len(m):
                break
        free = [c for c in range(ncols) if c not in pivots]
        basis = []
        for fc in free:
            v = [0] * ncols
            v[fc] = 1
            for i, pc in enumerate(pivots):
                v[pc] = self.neg(m[i][fc])
            basis.append(v)
        return basis


@lru_cache(maxsize=None)
def field(q: int) -> GF:
    return GF(q)
