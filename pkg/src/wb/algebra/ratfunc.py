"""Rational function fields F_q(t_1, ..., t_e) with canonical-form elements."""

from __future__ import annotations

from functools import lru_cache

from .gf import GF, field as gf_field
from .poly import Poly, gcd


class RationalFunctionField:
    """K = F_q(t_1, ..., t_e); ``e = 0`` gives F_q itself."""

    def __init__(self, q: int, names: tuple[str, ...] | list[str] = ()):
        self.F: GF = gf_field(q)
        self.q = q
        self.p = self.F.p
        self.names = tuple(names)
        self.nvars = len(self.names)
        if len(set(self.names)) != self.nvars:
            raise ValueError("variable names must be distinct")

    def __repr__(self) -> str:
        if not self.names:
            return f"F_{self.q}"
        return f"F_{self.q}({', '.join(self.names)})"

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalFunctionField) and other.q == self.q \
            and other.names == self.names

    def __hash__(self) -> int:
        return hash((self.q, self.names))

    def poly(self, terms: dict) -> Poly:
        return Poly(self.F, self.nvars, terms)

    def __call__(self, x) -> FieldElement:
        if isinstance(x, FieldElement):
            if x.K != self:
                raise ValueError(f"{x} does not belong to {self}")
            return x
        if isinstance(x, int):
            return self.const(self.F.from_int(x))
        if isinstance(x, Poly):
            return FieldElement(self, x, Poly.const(self.F, self.nvars, 1), canonical=True)
        if isinstance(x, str):
            from .exprparse import parse_element
            return parse_element(x, self)
        raise TypeError(f"cannot coerce {x!r} into {self}")

    def const(self, c: int) -> FieldElement:
        """The F_q element with integer encoding c."""
        return FieldElement(self, Poly.const(self.F, self.nvars, c),
                            Poly.const(self.F, self.nvars, 1), canonical=True)

    def zero(self) -> FieldElement:
        return self.const(0)

    def one(self) -> FieldElement:
        return self.const(1)

    def gen(self, i: int) -> FieldElement:
        return self(Poly.var(self.F, self.nvars, i))

    def gens(self) -> list[FieldElement]:
        return [self.gen(i) for i in range(self.nvars)]

    def monomial(self, exp, c: int = 1) -> FieldElement:
        """c * t^exp, with exp allowed to have negative entries."""
        exp = tuple(exp)
        num = tuple(max(a, 0) for a in exp)
        den = tuple(max(-a, 0) for a in exp)
        return FieldElement(self, Poly.monomial(self.F, self.nvars, num, c),
                            Poly.monomial(self.F, self.nvars, den, 1), canonical=True)


class FieldElement:
    """An element num/den of a rational function field in canonical form.

    Canonical form: gcd(num, den) = 1 and den monic (lex leading coefficient 1).
    """

    __slots__ = ("K", "num", "den", "_hash")

    def __init__(self, K: RationalFunctionField, num: Poly, den: Poly, canonical: bool = False):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        self.K = K
        self._hash = None
        if canonical:
            self.num, self.den = num, den
            return
        if num.is_zero():
            self.num, self.den = num, Poly.const(K.F, K.nvars, 1)
            return
        if not den.is_const():
            g = gcd(num, den)
            if not g.is_const():
                num, den = num.exquo(g), den.exquo(g)
        _, lc = den.lead()
        if lc != 1:
            inv = K.F.inv(lc)
            num, den = num.scale(inv), den.scale(inv)
        self.num, self.den = num, den

    def _wrap(self, num: Poly, den: Poly) -> FieldElement:
        return FieldElement(self.K, num, den)

    def _coerce(self, other) -> FieldElement:
        if isinstance(other, FieldElement):
            if other.K is not self.K and other.K != self.K:
                raise ValueError(f"mixed fields {self.K} and {other.K}")
            return other
        return self.K(other)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def is_const(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = self.K(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.K == other.K and self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.K, self.num, self.den))
        return self._hash

    def _monic(self, num: Poly, den: Poly) -> FieldElement:
        """Wrap an already coprime pair, normalizing the leading coefficient of den."""
        if num.is_zero():
            return self.K.zero()
        _, lc = den.lead()
        if lc != 1:
            inv = self.K.F.inv(lc)
            num, den = num.scale(inv), den.scale(inv)
        return FieldElement(self.K, num, den, canonical=True)

    def __add__(self, other) -> FieldElement:
        o = self._coerce(other)
        a, b, c, d = self.num, self.den, o.num, o.den
        if b.is_const() and d.is_const():
            return self._monic(a.scale(d.const_value()) + c.scale(b.const_value()),
                               Poly.const(self.K.F, self.K.nvars, self.K.F.mul(b.const_value(), d.const_value())))
        # Henrici: only the common factor g of the denominators can cancel
        g = gcd(b, d)
        if g.is_const():
            return self._monic(a * d + c * b, b * d)
        b1, d1 = b.exquo(g), d.exquo(g)
        t = a * d1 + c * b1
        if t.is_zero():
            return self.K.zero()
        g2 = gcd(t, g)
        if not g2.is_const():
            t, g = t.exquo(g2), g.exquo(g2)
        return self._monic(t, b1 * d1 * g)

    __radd__ = __add__

    def __neg__(self) -> FieldElement:
        return FieldElement(self.K, -self.num, self.den, canonical=True)

    def __sub__(self, other) -> FieldElement:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> FieldElement:
        return self._coerce(other) - self

    def __mul__(self, other) -> FieldElement:
        o = self._coerce(other)
        if self.is_zero() or o.is_zero():
            return self.K.zero()
        a, b, c, d = self.num, self.den, o.num, o.den
        g1, g2 = gcd(a, d), gcd(c, b)
        if not g1.is_const():
            a, d = a.exquo(g1), d.exquo(g1)
        if not g2.is_const():
            c, b = c.exquo(g2), b.exquo(g2)
        return self._monic(a * c, b * d)

    __rmul__ = __mul__

    def inverse(self) -> FieldElement:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return self._wrap(self.den, self.num)

    def __truediv__(self, other) -> FieldElement:
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other) -> FieldElement:
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int) -> FieldElement:
        if k < 0:
            return self.inverse() ** (-k)
        return FieldElement(self.K, self.num ** k, self.den ** k, canonical=True)

    def frobenius_root(self) -> FieldElement | None:
        """The unique c with c^p = self, or None if self is not a p-th power."""
        rn = self.num.frobenius_root()
        if rn is None:
            return None
        rd = self.den.frobenius_root()
        if rd is None:
            return None
        return FieldElement(self.K, rn, rd, canonical=True)

    def derivative(self, i: int) -> FieldElement:
        """Partial derivative with respect to t_{i+1}."""
        n, d = self.num, self.den
        return self._wrap(n.derivative(i) * d - n * d.derivative(i), d * d)

    def __repr__(self) -> str:
        return str(self)

    def __str__(self) -> str:
        names = list(self.K.names)
        n = self.num.to_str(names)
        if self.den.is_const():
            return n
        d = self.den.to_str(names)
        n = n if len(self.num.terms) <= 1 else f"({n})"
        d = d if len(self.den.terms) <= 1 else f"({d})"
        return f"{n}/{d}"


@lru_cache(maxsize=None)
def function_field(q: int, names: tuple[str, ...]) -> RationalFunctionField:
    return RationalFunctionField(q, names)


def evaluate(f: FieldElement, values: list[FieldElement]) -> FieldElement:
    """Substitute values[i] for the i-th variable of f's field."""
    if len(values) != f.K.nvars:
        raise ValueError(f"expected {f.K.nvars} values, got {len(values)}")
    if not values:
        raise ValueError("nothing to substitute")
    target = values[0].K
    lift = _lift_coefficients(f.K, target)
    num = _eval_poly(f.num, values, target, lift)
    den = _eval_poly(f.den, values, target, lift)
    return num / den


def _lift_coefficients(src: RationalFunctionField, dst: RationalFunctionField):
    if src.q != dst.q and not (src.F.d == 1 and dst.p == src.p):
        raise ValueError(f"cannot map coefficients of {src} into {dst}")
    return dst.const


def _eval_poly(P: Poly, values, target, lift) -> FieldElement:
    total = target.zero()
    powers: dict = {}
    for e, c in P.terms.items():
        term = lift(c)
        for i, a in enumerate(e):
            if a:
                key = (i, a)
                if key not in powers:
                    powers[key] = values[i] ** a
                term = term * powers[key]
        total = total + term
    return total
