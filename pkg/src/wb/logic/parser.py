"""Prefix s-expression syntax for formulas and its printer.

Grammar::

    formula := top | bot | (= term term) | (R term ...) | (not formula)
             | (and formula formula ...) | (or formula formula ...)
             | (implies formula formula)
             | (forall x:S ... formula) | (exists x:S ... formula)
    term    := x | x:S | c | (f term ...)

Free variables get their sort from an ``x:S`` annotation, from the argument
position they occur in, or from a caller-supplied mapping.  The printer
annotates every free occurrence, so ``parse(render(f)) == f``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (BOT, TOP, And, App, Bot, Eq, Exists, Forall, Formula, Implies, Not, Or, Rel,
                     Signature, SortError, Term, Top, Var)

_TOKEN = re.compile(r"\s*(?:(;[^\n]*)|(\()|(\))|([^\s()]+))")
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_']*$")


class ParseError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


@dataclass
class _Atom:
    text: str
    pos: int


@dataclass
class _List:
    items: list
    pos: int


def _read(text: str):
    stack: list[_List] = []
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        comment, lp, rp, atom = m.groups()
        if lp:
            stack.append(_List([], m.start(2)))
        elif rp:
            if not stack:
                raise ParseError("unbalanced ')'", m.start(3))
            node = stack.pop()
            (stack[-1].items if stack else out).append(node)
        elif atom:
            node = _Atom(atom, m.start(4))
            (stack[-1].items if stack else out).append(node)
        pos = m.end()
    if stack:
        raise ParseError("unbalanced '('", stack[-1].pos)
    return out


class _Unknown(Exception):
    def __init__(self, name: str, pos: int):
        self.name, self.pos = name, pos


class _Converter:
    def __init__(self, sig: Signature, free: dict, strict: bool):
        self.sig = sig
        self.free = free          # name -> sort, shared across passes
        self.strict = strict
        self.changed = False

    # variables ----------------------------------------------------------
    def _split(self, atom: _Atom) -> tuple[str, str | None]:
        if ":" in atom.text:
            name, sort = atom.text.split(":", 1)
            if not _NAME.match(name):
                raise ParseError(f"bad variable name {name!r}", atom.pos)
            if sort not in self.sig.sorts:
                raise ParseError(f"unknown sort {sort!r}", atom.pos)
            return name, sort
        return atom.text, None

    def _record_free(self, name: str, sort: str, pos: int):
        old = self.free.get(name)
        if old is None:
            self.free[name] = sort
            self.changed = True
        elif old != sort:
            raise SortError(f"variable {name!r} used with sorts {old} and {sort} (at position {pos})")

    # terms --------------------------------------------------------------
    def term(self, sx, scope: dict, expected: str | None) -> Term:
        if isinstance(sx, _Atom):
            name, sort = self._split(sx)
            if sort is None and name in self.sig.constants:
                t = App(name, (), self.sig.constants[name])
                return self._expect(t, expected, name, sx.pos)
            if sort is None and (self.sig.function(name) or name in self.sig.relations):
                raise ParseError(f"symbol {name!r} used without arguments", sx.pos)
            if not _NAME.match(name):
                raise ParseError(f"bad term {sx.text!r}", sx.pos)
            if name in scope:
                v = scope[name]
                if sort is not None and sort != v.sort:
                    raise SortError(f"variable {name!r} is bound with sort {v.sort}, annotated {sort}")
                return self._expect(v, expected, name, sx.pos)
            if sort is not None:
                self._record_free(name, sort, sx.pos)
            elif name in self.free:
                sort = self.free[name]
            elif expected is not None:
                self._record_free(name, expected, sx.pos)
                sort = expected
            else:
                raise _Unknown(name, sx.pos)
            return self._expect(Var(name, sort), expected, name, sx.pos)
        if not sx.items:
            raise ParseError("empty term", sx.pos)
        head = sx.items[0]
        if not isinstance(head, _Atom):
            raise ParseError("term head must be a symbol", sx.pos)
        fsig = self.sig.function(head.text)
        if fsig is None:
            raise ParseError(f"unknown function symbol {head.text!r}", head.pos)
        argsorts, res = fsig
        args = sx.items[1:]
        if len(args) != len(argsorts):
            raise SortError(f"{head.text!r} expects {len(argsorts)} arguments, got {len(args)}")
        conv = tuple(self.term(a, scope, s) for a, s in zip(args, argsorts))
        return self._expect(App(head.text, conv, res), expected, head.text, head.pos)

    def _expect(self, t: Term, expected: str | None, name: str, pos: int) -> Term:
        if expected is not None and t.sort != expected:
            raise SortError(f"sort mismatch at {name!r}: expected {expected}, got {t.sort} "
                            f"(at position {pos})")
        return t

    # formulas -----------------------------------------------------------
    def formula(self, sx, scope: dict) -> Formula:
        if isinstance(sx, _Atom):
            if sx.text == "top":
                return TOP
            if sx.text == "bot":
                return BOT
            if sx.text in self.sig.relations and not self.sig.relations[sx.text]:
                return Rel(sx.text, ())
            raise ParseError(f"expected a formula, got {sx.text!r}", sx.pos)
        if not sx.items:
            raise ParseError("empty formula", sx.pos)
        head = sx.items[0]
        if not isinstance(head, _Atom):
            raise ParseError("formula head must be a keyword or relation symbol", sx.pos)
        op, rest = head.text, sx.items[1:]
        if op == "=":
            if len(rest) != 2:
                raise ParseError("= takes two arguments", head.pos)
            return self._equation(rest[0], rest[1], scope, head.pos)
        if op == "not":
            if len(rest) != 1:
                raise ParseError("not takes one argument", head.pos)
            return Not(self.formula(rest[0], scope))
        if op in ("and", "or"):
            if len(rest) < 2:
                raise ParseError(f"{op} takes at least two arguments", head.pos)
            parts = [self.formula(r, scope) for r in rest]
            cls = And if op == "and" else Or
            out = parts[0]
            for p in parts[1:]:
                out = cls(out, p)
            return out
        if op == "implies":
            if len(rest) != 2:
                raise ParseError("implies takes two arguments", head.pos)
            return Implies(self.formula(rest[0], scope), self.formula(rest[1], scope))
        if op in ("forall", "exists"):
            if len(rest) < 2:
                raise ParseError(f"{op} needs a variable and a body", head.pos)
            binders = []
            inner = dict(scope)
            for b in rest[:-1]:
                if not isinstance(b, _Atom):
                    raise ParseError("binder must be a variable x:S", b.pos)
                name, sort = self._split(b)
                if sort is None:
                    if len(self.sig.sorts) == 1:
                        sort = self.sig.sorts[0]
                    else:
                        raise ParseError(f"bound variable {name!r} needs a sort annotation", b.pos)
                v = Var(name, sort)
                binders.append(v)
                inner[name] = v
            body = self.formula(rest[-1], inner)
            cls = Forall if op == "forall" else Exists
            for v in reversed(binders):
                body = cls(v, body)
            return body
        if op in self.sig.relations:
            argsorts = self.sig.relations[op]
            if len(rest) != len(argsorts):
                raise SortError(f"{op!r} expects {len(argsorts)} arguments, got {len(rest)}")
            return Rel(op, tuple(self.term(a, scope, s) for a, s in zip(rest, argsorts)))
        if self.sig.function(op) is not None or op in self.sig.constants:
            raise ParseError(f"{op!r} is a function symbol, not a formula", head.pos)
        raise ParseError(f"unknown relation or keyword {op!r}", head.pos)

    def _equation(self, a, b, scope: dict, pos: int) -> Formula:
        try:
            lhs = self.term(a, scope, None)
            return Eq(lhs, self.term(b, scope, lhs.sort))
        except _Unknown:
            pass
        try:
            rhs = self.term(b, scope, None)
            return Eq(self.term(a, scope, rhs.sort), rhs)
        except _Unknown as exc:
            if len(self.sig.sorts) == 1:
                s = self.sig.sorts[0]
                return Eq(self.term(a, scope, s), self.term(b, scope, s))
            if self.strict:
                raise SortError(f"cannot infer the sort of variable {exc.name!r} "
                                f"(at position {exc.pos}); annotate it as {exc.name}:S")
            return TOP


def parse_formula(text: str, sig: Signature, free_sorts: dict | None = None) -> Formula:
    """Parse a formula; free_sorts optionally fixes sorts of free variables."""
    nodes = _read(text)
    if len(nodes) != 1:
        raise ParseError(f"expected exactly one formula, found {len(nodes)}", 0)
    free = dict(free_sorts or {})
    while True:
        conv = _Converter(sig, free, strict=False)
        conv.formula(nodes[0], {})
        if not conv.changed:
            break
    return _Converter(sig, free, strict=True).formula(nodes[0], {})


def parse_term(text: str, sig: Signature, free_sorts: dict | None = None,
               expected: str | None = None) -> Term:
    nodes = _read(text)
    if len(nodes) != 1:
        raise ParseError(f"expected exactly one term, found {len(nodes)}", 0)
    conv = _Converter(sig, dict(free_sorts or {}), strict=True)
    if expected is None and len(sig.sorts) == 1:
        expected = sig.sorts[0]
    try:
        return conv.term(nodes[0], {}, expected)
    except _Unknown as exc:
        raise SortError(f"cannot infer the sort of variable {exc.name!r}") from None


# ---------------------------------------------------------------------------
# printing


def render_term(t: Term, bound: frozenset = frozenset()) -> str:
    if isinstance(t, Var):
        return t.name if t in bound else f"{t.name}:{t.sort}"
    if not t.args:
        return t.fn
    return "(" + " ".join([t.fn] + [render_term(a, bound) for a in t.args]) + ")"


def render(f: Formula, bound: frozenset = frozenset()) -> str:
    if isinstance(f, Top):
        return "top"
    if isinstance(f, Bot):
        return "bot"
    if isinstance(f, Eq):
        return f"(= {render_term(f.lhs, bound)} {render_term(f.rhs, bound)})"
    if isinstance(f, Rel):
        if not f.args:
            return f"({f.name})"
        return "(" + " ".join([f.name] + [render_term(a, bound) for a in f.args]) + ")"
    if isinstance(f, Not):
        return f"(not {render(f.body, bound)})"
    if isinstance(f, (And, Or, Implies)):
        op = {And: "and", Or: "or", Implies: "implies"}[type(f)]
        return f"({op} {render(f.left, bound)} {render(f.right, bound)})"
    op = "forall" if isinstance(f, Forall) else "exists"
    inner = frozenset(v for v in bound if v.name != f.var.name) | {f.var}
    return f"({op} {f.var.name}:{f.var.sort} {render(f.body, inner)})"
