"""Polynomial text parser.

Grammar (EBNF)::

    expr     = term , { ("+" | "-") , term } ;
    term     = unary , { ("*" | "/") , unary } ;
    unary    = ("+" | "-") , unary | power ;
    power    = atom , [ "^" , exponent ] ;
    exponent = integer | "(" , [ "+" | "-" ] , integer , ")" | "-" , integer ;
    atom     = integer | variable | "(" , expr , ")" | element ;
    element  = "[" , integer , { "," , integer } , "]" ;   (* F_{p^a} coefficient vector *)
    variable = ("x" | "y" | "z") , digit , { digit } ;

Division is only allowed by nonzero constants, so ``3/2*x0`` is a rational
literal times ``x0``.  The Unicode minus sign and middle dot are accepted as
``-`` and ``*``.
"""

from __future__ import annotations

import re

from .errors import NegativeExponent, PolySyntaxError, UnknownVariable
from .poly import MultiPoly, VarSpec

_TOKEN = re.compile(r"(\d+)|([A-Za-z_]\w*)|(\S)")


def _tokenize(text):
    text = text.replace("−", "-").replace("·", "*")
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        num, name, op = m.groups()
        if num is not None:
            tokens.append(("num", int(num), pos))
        elif name is not None:
            tokens.append(("name", name, pos))
        else:
            if op not in "+-*/^()[],":
                raise PolySyntaxError(f"unexpected character {op!r}", pos)
            tokens.append((op, op, pos))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text, vs, field):
        self.toks = _tokenize(text)
        self.i = 0
        self.vs = vs
        self.field = field

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            expected = "end of input" if kind == "end" else repr(kind)
            raise PolySyntaxError(f"expected {expected}", tok[2])
        self.i += 1
        return tok

    def const(self, c):
        return MultiPoly.const(self.vs, self.field, c)

    def expr(self):
        value = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek()[0] in ("*", "/"):
            op, _, pos = self.take()
            rhs = self.unary()
            if op == "*":
                value = value * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero():
                    raise PolySyntaxError("division by a non-constant or zero", pos)
                try:
                    value = value / rhs
                except ZeroDivisionError:
                    raise PolySyntaxError("division by zero in this field", pos) from None
        return value

    def unary(self):
        kind = self.peek()[0]
        if kind == "-":
            self.take()
            return -self.unary()
        if kind == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            base = base ** self.exponent()
        return base

    def exponent(self):
        kind, val, pos = self.peek()
        if kind == "num":
            self.take()
            return val
        if kind == "-":
            raise NegativeExponent(f"negative exponent at position {pos}", pos=pos)
        if kind == "(":
            self.take()
            sign_kind, _, spos = self.peek()
            if sign_kind == "-":
                raise NegativeExponent(f"negative exponent at position {spos}", pos=spos)
            if sign_kind == "+":
                self.take()
            e = self.take("num")[1]
            self.take(")")
            return e
        raise PolySyntaxError("expected exponent", pos)

    def atom(self):
        kind, val, pos = self.peek()
        if kind == "num":
            self.take()
            return self.const(val)
        if kind == "name":
            self.take()
            if val not in self.vs.names:
                raise UnknownVariable(f"unknown variable {val!r} at position {pos}", variable=val, pos=pos)
            return MultiPoly.var(self.vs, self.field, val)
        if kind == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        if kind == "[":
            self.take()
            digits = [self.signed_int()]
            while self.peek()[0] == ",":
                self.take()
                digits.append(self.signed_int())
            self.take("]")
            if not self.field.is_finite:
                raise PolySyntaxError("coefficient vectors need a finite field", pos)
            return self.const(self.field(digits))
        if kind == "end":
            raise PolySyntaxError("unexpected end of input", pos)
        raise PolySyntaxError(f"unexpected {val!r}", pos)

    def signed_int(self):
        neg = False
        if self.peek()[0] == "-":
            self.take()
            neg = True
        v = self.take("num")[1]
        return -v if neg else v


def parse_poly(text: str, vs: VarSpec, field) -> MultiPoly:
    if not text or not text.strip():
        raise PolySyntaxError("empty polynomial", 0)
    p = _Parser(text, vs, field)
    result = p.expr()
    p.take("end")
    return result
