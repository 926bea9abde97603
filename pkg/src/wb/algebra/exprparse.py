"""Infix rational-function literals such as ``"t1^2*t2 + 3/(t1 + 1)"``."""

from __future__ import annotations

import re

from .ratfunc import FieldElement, RationalFunctionField

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


class ExpressionError(ValueError):
    pass


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ExpressionError(f"unexpected character {text[pos]!r} at position {pos}")
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", num, m.start(1)))
        elif name is not None:
            out.append(("name", name, m.start(2)))
        else:
            out.append(("op", "^" if op == "**" else op, m.start(3)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, K: RationalFunctionField, extra: dict | None = None):
        self.toks = _tokenize(text)
        self.i = 0
        self.K = K
        self.env = {name: K.gen(i) for i, name in enumerate(K.names)}
        self.env.update(extra or {})

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, value: str | None = None):
        tok = self.peek()
        if tok is None or (value is not None and tok[1] != value):
            where = tok[2] if tok else "end"
            raise ExpressionError(f"expected {value or 'token'} at {where}")
        self.i += 1
        return tok

    def parse(self) -> FieldElement:
        v = self.expr()
        if self.peek() is not None:
            raise ExpressionError(f"trailing input at position {self.peek()[2]}")
        return v

    def expr(self) -> FieldElement:
        v = self.term()
        while (tok := self.peek()) and tok[1] in "+-" and tok[0] == "op":
            self.i += 1
            rhs = self.term()
            v = v + rhs if tok[1] == "+" else v - rhs
        return v

    def term(self) -> FieldElement:
        v = self.unary()
        while (tok := self.peek()) and tok[0] == "op" and tok[1] in "*/":
            self.i += 1
            rhs = self.unary()
            if tok[1] == "*":
                v = v * rhs
            else:
                if rhs.is_zero():
                    raise ExpressionError(f"division by zero at position {tok[2]}")
                v = v / rhs
        return v

    def power(self) -> FieldElement:
        base = self.atom()
        if (tok := self.peek()) and tok[1] == "^":
            self.i += 1
            sign = 1
            if (t2 := self.peek()) and t2[1] == "-":
                self.i += 1
                sign = -1
            exp = int(self.take()[1]) * sign
            if exp < 0 and base.is_zero():
                raise ExpressionError("negative power of zero")
            return base ** exp
        return base

    def unary(self) -> FieldElement:
        tok = self.peek()
        if tok and tok[1] == "-":
            self.i += 1
            return -self.unary()
        if tok and tok[1] == "+":
            self.i += 1
            return self.unary()
        return self.power()

    def atom(self) -> FieldElement:
        tok = self.take()
        kind, val, pos = tok
        if kind == "num":
            return self.K(int(val))
        if kind == "name":
            if val not in self.env:
                raise ExpressionError(f"unknown variable {val!r} at position {pos}")
            return self.env[val]
        if val == "(":
            v = self.expr()
            self.take(")")
            return v
        raise ExpressionError(f"unexpected {val!r} at position {pos}")


def parse_element(text: str, K: RationalFunctionField, extra: dict | None = None) -> FieldElement:
    """Parse an infix expression over the variables of K."""
    return _Parser(text, K, extra).parse()
