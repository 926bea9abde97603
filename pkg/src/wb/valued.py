"""Gauss valuations on F_q(t_1, ..., t_k) and the dominant-monomial law.

The value group is Q^k ordered lexicographically.  v reads off the lex-least
exponent vector of numerator and denominator; ac is the ratio of the
corresponding coefficients, so ac is multiplicative and agrees with the
residue map on units.

Along an affine sequence a_{i,j} = c_j t^(beta_j + i delta_j) every monomial
of a polynomial P contributes a value line C + i D.  When the slopes
delta_j are rationally independent, distinct monomials have distinct slope
vectors, so exactly one line is eventually minimal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Sequence

from .algebra.matrix import ExactMatrix
from .algebra.ratfunc import FieldElement, RationalFunctionField, function_field


@total_ordering
class ValueVector:
    """An element of Q^k (lex order) or the absorbing top element."""

    __slots__ = ("coords",)

    def __init__(self, coords: Sequence | None):
        self.coords = None if coords is None else tuple(Fraction(c) for c in coords)

    @classmethod
    def inf(cls) -> ValueVector:
        return cls(None)

    @classmethod
    def zero(cls, k: int) -> ValueVector:
        return cls((0,) * k)

    @property
    def is_inf(self) -> bool:
        return self.coords is None

    def __add__(self, other: ValueVector) -> ValueVector:
        if self.is_inf or other.is_inf:
            return ValueVector.inf()
        return ValueVector(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> ValueVector:
        if self.is_inf:
            raise ArithmeticError("-inf is not a value")
        return ValueVector(tuple(-a for a in self.coords))

    def __sub__(self, other: ValueVector) -> ValueVector:
        return self + (-other)

    def scale(self, n) -> ValueVector:
        if self.is_inf:
            return self
        return ValueVector(tuple(a * n for a in self.coords))

    def __eq__(self, other) -> bool:
        return isinstance(other, ValueVector) and self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    def __lt__(self, other: ValueVector) -> bool:
        if self.is_inf:
            return False
        if other.is_inf:
            return True
        return self.coords < other.coords

    def is_integral(self) -> bool:
        return not self.is_inf and all(c.denominator == 1 for c in self.coords)

    def to_json(self):
        if self.is_inf:
            return "inf"
        return [str(c) if c.denominator != 1 else int(c) for c in self.coords]

    def __repr__(self) -> str:
        if self.is_inf:
            return "inf"
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


# ---------------------------------------------------------------------------
# valuation, residue, angular component


def valuation(f: FieldElement) -> ValueVector:
    if f.is_zero():
        return ValueVector.inf()
    return ValueVector(tuple(a - b for a, b in zip(min(f.num.terms), min(f.den.terms))))


def angular(f: FieldElement) -> int:
    """Coefficient ratio of the valuation-minimal terms; ac(0) = 0."""
    if f.is_zero():
        return 0
    F = f.K.F
    return F.div(f.num.terms[min(f.num.terms)], f.den.terms[min(f.den.terms)])


def residue(f: FieldElement) -> int:
    """Residue of an element of the valuation ring."""
    v = valuation(f)
    if v.is_inf:
        return 0
    zero = ValueVector.zero(len(v.coords))
    if v < zero:
        raise ValueError(f"{f} is not in the valuation ring")
    return angular(f) if v == zero else 0


def in_valuation_ring(f: FieldElement) -> bool:
    v = valuation(f)
    return v.is_inf or v >= ValueVector.zero(len(v.coords))


def in_maximal_ideal(f: FieldElement) -> bool:
    v = valuation(f)
    return v.is_inf or v > ValueVector.zero(len(v.coords))


# ---------------------------------------------------------------------------
# affine value sequences


def rank_over_q(vectors: Sequence[ValueVector]) -> int:
    if not vectors:
        return 0
    return ExactMatrix.rational([list(v.coords) for v in vectors]).rank()


@dataclass
class AffineValueSequence:
    """a_{i,j} = c_j * t^(beta_j + i * delta_j) for j = 1..N."""

    betas: list
    deltas: list
    coeffs: list   # FieldElements c_j (nonzero)
    K: RationalFunctionField

    def __post_init__(self):
        self.betas = [b if isinstance(b, ValueVector) else ValueVector(b) for b in self.betas]
        self.deltas = [d if isinstance(d, ValueVector) else ValueVector(d) for d in self.deltas]
        if not (len(self.betas) == len(self.deltas) == len(self.coeffs)):
            raise ValueError("betas, deltas and coeffs must have the same length")
        k = self.K.nvars
        for v in self.betas + self.deltas:
            if v.is_inf or len(v.coords) != k:
                raise ValueError(f"value vectors must have length {k}")
        if any(c.is_zero() for c in self.coeffs):
            raise ValueError("coefficients c_j must be nonzero")

    @property
    def N(self) -> int:
        return len(self.betas)

    def slopes_independent(self) -> bool:
        return rank_over_q(self.deltas) == self.N

    def value(self, i: int, j: int) -> ValueVector:
        return valuation(self.coeffs[j]) + self.betas[j] + self.deltas[j].scale(i)

    def ac(self, j: int) -> int:
        return angular(self.coeffs[j])

    def element(self, i: int, j: int) -> FieldElement:
        e = self.betas[j] + self.deltas[j].scale(i)
        if not e.is_integral():
            raise ValueError(f"exponent {e} of a_{{{i},{j + 1}}} is not integral")
        return self.coeffs[j] * self.K.monomial(tuple(int(c) for c in e.coords))


class RationalDependenceError(ValueError):
    pass


# ---------------------------------------------------------------------------
# polynomials over K in X_1..X_N


def parse_polynomial(text: str, K: RationalFunctionField, N: int) -> dict[tuple, FieldElement]:
    """Parse a polynomial in X1..XN with coefficients in K (given as infix text)."""
    xnames = tuple(f"X{j + 1}" for j in range(N))
    if set(xnames) & set(K.names):
        raise ValueError("field variables clash with X1..XN")
    L = function_field(K.q, K.names + xnames)
    f = L(text)
    e = K.nvars
    if any(any(ex[e:]) for ex in f.den.terms):
        raise ValueError(f"{text!r} is not a polynomial in {', '.join(xnames)}")
    den = K(K.poly({ex[:e]: c for ex, c in f.den.terms.items()}))
    out: dict[tuple, dict] = {}
    for ex, c in f.num.terms.items():
        out.setdefault(ex[e:], {})[ex[:e]] = c
    return {m: K(K.poly(t)) / den for m, t in out.items()}


def polynomial_to_str(P: dict, N: int) -> str:
    parts = []
    for m in sorted(P, reverse=True):
        mono = "*".join(f"X{j + 1}" if a == 1 else f"X{j + 1}^{a}" for j, a in enumerate(m) if a)
        c = str(P[m])
        if not mono:
            parts.append(c)
        elif c == "1":
            parts.append(mono)
        else:
            parts.append(f"({c})*{mono}")
    return " + ".join(parts) if parts else "0"


@dataclass
class DominanceResult:
    r: tuple
    gamma: ValueVector
    nu: tuple
    alpha: int
    i_star: int

    def to_json(self) -> dict:
        return {"r": list(self.r), "gamma": self.gamma.to_json(), "alpha": self.alpha,
                "i_star": self.i_star}


def _lines(P: dict, s: AffineValueSequence) -> dict[tuple, tuple[ValueVector, ValueVector]]:
    """Per monomial: (intercept C, slope D) of i -> v(b_m prod a_{i,j}^{m_j})."""
    k = s.K.nvars
    out = {}
    for m, b in P.items():
        C = valuation(b)
        D = ValueVector.zero(k)
        for j, a in enumerate(m):
            C = C + (valuation(s.coeffs[j]) + s.betas[j]).scale(a)
            D = D + s.deltas[j].scale(a)
        out[m] = (C, D)
    return out


def _line_at(line, i: int) -> ValueVector:
    C, D = line
    return C + D.scale(i)


def _eventual_key(line) -> tuple:
    """Lex key of C + i D for large i: compare (D_1, C_1, D_2, C_2, ...)."""
    C, D = line
    return tuple(x for pair in zip(D.coords, C.coords) for x in pair)


def _pair_threshold(win, other) -> int:
    """Least i0 >= 0 with line(win, i) < line(other, i) for all i >= i0."""
    (Cw, Dw), (Co, Do) = win, other
    bound = 0
    for cw, dw, co, do in zip(Cw.coords, Dw.coords, Co.coords, Do.coords):
        dd, dc = do - dw, co - cw
        if dd == 0 and dc == 0:
            continue
        if dd > 0:
            bound = max(0, (-dc) // dd + 1)
        break
    i = bound
    while i > 0 and _line_at(win, i - 1) < _line_at(other, i - 1):
        i -= 1
    return i


def dominant_monomial(P: dict, s: AffineValueSequence) -> DominanceResult:
    """The eventually dominant monomial of P along s, with its threshold i*."""
    P = {m: b for m, b in P.items() if not b.is_zero()}
    if not P:
        raise ValueError("P is the zero polynomial")
    if any(len(m) != s.N for m in P):
        raise ValueError(f"monomials must have {s.N} exponents")
    if not s.slopes_independent():
        raise RationalDependenceError("the slopes delta_1, ..., delta_N are rationally dependent")
    lines = _lines(P, s)
    nu = min(lines, key=lambda m: _eventual_key(lines[m]))
    i_star = max((_pair_threshold(lines[nu], lines[m]) for m in lines if m != nu), default=0)
    b = P[nu]
    return DominanceResult(nu, valuation(b), nu, angular(b), i_star)


def evaluate_polynomial(P: dict, values: Sequence[FieldElement], K: RationalFunctionField) -> FieldElement:
    total = K.zero()
    for m, b in P.items():
        term = b
        for x, a in zip(values, m):
            if a:
                term = term * x ** a
        total = total + term
    return total


def dominance_oracle(P: dict, s: AffineValueSequence, i_range: Sequence[int]) -> list[tuple[ValueVector, int]]:
    """Literal expansion of P(a_{i,1}, ..., a_{i,N}) read through v and ac."""
    out = []
    for i in i_range:
        vals = [s.element(i, j) for j in range(s.N)]
        f = evaluate_polynomial(P, vals, s.K)
        out.append((valuation(f), angular(f)))
    return out


def monomial_values(P: dict, s: AffineValueSequence, i: int) -> dict[tuple, ValueVector]:
    return {m: _line_at(line, i) for m, line in _lines(P, s).items() if not P[m].is_zero()}


def predict(res: DominanceResult, s: AffineValueSequence, i: int) -> tuple[ValueVector, int]:
    """gamma + sum r_j v(a_{i,j}) and alpha * prod ac(a_{i,j})^{r_j}."""
    F = s.K.F
    v = res.gamma
    a = res.alpha
    for j, rj in enumerate(res.r):
        v = v + s.value(i, j).scale(rj)
        a = F.mul(a, F.pow(s.ac(j), rj))
    return v, a


def residue_monomial_str(alpha: int, r: Sequence[int]) -> str:
    parts = [] if alpha == 1 and any(r) else [str(alpha)]
    parts += [f"C{j + 1}" if a == 1 else f"C{j + 1}^{a}" for j, a in enumerate(r) if a]
    return "*".join(parts)


def acv_instance_check(s: AffineValueSequence, polys: Sequence[dict], i_range: Sequence[int]) -> dict:
    """Check both clauses of the value/ac condition for each polynomial."""
    i_range = list(i_range)
    if not s.slopes_independent():
        return {"premise": False, "satisfied": None,
                "reason": "slopes are rationally dependent", "polys": []}
    entries = []
    ok_all = True
    for P in polys:
        res = dominant_monomial(P, s)
        checked = [i for i in i_range if i >= res.i_star]
        oracle = dominance_oracle(P, s, checked)
        failures = []
        for i, (v, a) in zip(checked, oracle):
            pv, q = predict(res, s, i)
            if v != pv or a != q:
                failures.append(i)
        ok = not failures
        ok_all = ok_all and ok
        entries.append({"r": list(res.r), "gamma": res.gamma.to_json(), "alpha": res.alpha,
                        "q": residue_monomial_str(res.alpha, res.r), "threshold": res.i_star,
                        "checked": len(checked), "failures": failures, "ok": ok})
    return {"premise": True, "satisfied": ok_all,
            "thresholds": [e["threshold"] for e in entries], "polys": entries}
